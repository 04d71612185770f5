"""Flat pixel morphology and the Lantuéjoul skeleton, used as a baseline.

Images are 2-D boolean arrays; pixels outside the raster count as
background.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Iterator, Tuple

import numpy as np


class FlatSE(enum.Enum):
    CROSS3 = "cross3"
    BOX3 = "box3"

    @classmethod
    def coerce(cls, value) -> "FlatSE":
        if isinstance(value, cls):
            return value
        key = str(value).strip().lower()
        aliases = {"cross": "cross3", "box": "box3"}
        return cls(aliases.get(key, key))


def footprint(se, n: int = 1) -> np.ndarray:
    """``nB``: the origin-centered element dilated with itself ``n`` times (``0B`` is the origin)."""
    se = FlatSE.coerce(se)
    if n < 0:
        raise ValueError("n must be non-negative")
    base = np.ones((3, 3), dtype=bool)
    if se is FlatSE.CROSS3:
        base[0, 0] = base[0, 2] = base[2, 0] = base[2, 2] = False
    offsets = {(0, 0)}
    steps = [(r - 1, c - 1) for r, c in zip(*np.nonzero(base))]
    for _ in range(n):
        offsets = {(a + dr, b + dc) for a, b in offsets for dr, dc in steps}
    out = np.zeros((2 * n + 1, 2 * n + 1), dtype=bool)
    for a, b in offsets:
        out[a + n, b + n] = True
    return out


def _offsets(fp: np.ndarray):
    n = fp.shape[0] // 2
    return [(int(r) - n, int(c) - n) for r, c in zip(*np.nonzero(fp))]


def _as_image(img) -> np.ndarray:
    img = np.asarray(img, dtype=bool)
    if img.ndim != 2:
        raise ValueError(f"expected a 2-D raster, got shape {img.shape}")
    return img


def _erode_fp(img: np.ndarray, fp: np.ndarray) -> np.ndarray:
    n = fp.shape[0] // 2
    h, w = img.shape
    pad = np.pad(img, n, constant_values=False)
    out = np.ones_like(img)
    for dr, dc in _offsets(fp):
        out &= pad[n + dr : n + dr + h, n + dc : n + dc + w]
    return out


def _dilate_fp(img: np.ndarray, fp: np.ndarray) -> np.ndarray:
    n = fp.shape[0] // 2
    h, w = img.shape
    pad = np.pad(img, n, constant_values=False)
    out = np.zeros_like(img)
    for dr, dc in _offsets(fp):
        out |= pad[n - dr : n - dr + h, n - dc : n - dc + w]
    return out


def erode_px(img, se="box3", n: int = 1) -> np.ndarray:
    """Minkowski erosion by ``nB``."""
    return _erode_fp(_as_image(img), footprint(se, n))


def dilate_px(img, se="box3", n: int = 1) -> np.ndarray:
    """Minkowski dilation by ``nB``."""
    return _dilate_fp(_as_image(img), footprint(se, n))


def open_px(img, se="box3", n: int = 1) -> np.ndarray:
    fp = footprint(se, n)
    return _dilate_fp(_erode_fp(_as_image(img), fp), fp)


@dataclass(frozen=True)
class PixelSkeleton:
    """Layers ``(n, skel_n)`` of a pixel skeleton together with the raster shape."""

    shape: Tuple[int, int]
    se: FlatSE
    layers: Tuple[Tuple[int, np.ndarray], ...]

    def __len__(self) -> int:
        return len(self.layers)

    def __iter__(self) -> Iterator[Tuple[int, np.ndarray]]:
        return iter(self.layers)

    def __getitem__(self, n: int) -> np.ndarray:
        return self.layers[n][1]

    @property
    def depth(self) -> int:
        """Largest layer index ``N``; ``-1`` when there are no layers."""
        return len(self.layers) - 1

    def union(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=bool)
        for _, layer in self.layers:
            out |= layer
        return out


def skel_px(img, se="box3") -> PixelSkeleton:
    """``skel_n = (M - nB) minus its opening by B``, while ``M - nB`` is nonempty."""
    img = _as_image(img)
    se = FlatSE.coerce(se)
    b = footprint(se, 1)
    layers = []
    n = 0
    eroded = img.copy()
    while eroded.any():
        opened = _dilate_fp(_erode_fp(eroded, b), b)
        layers.append((n, eroded & ~opened))
        n += 1
        eroded = _erode_fp(img, footprint(se, n))
    return PixelSkeleton(img.shape, se, tuple(layers))


def recon_px(skel: PixelSkeleton, k: int = 0) -> np.ndarray:
    """Union of ``skel_n`` dilated by ``nB`` over ``k <= n <= N``.

    ``k = 0`` gives back the image; ``k >= 1`` gives its opening by ``kB``.
    An empty skeleton reconstructs to the empty raster for ``k = 0``.
    """
    top = max(skel.depth, 0)
    if not 0 <= k <= top:
        raise ValueError(f"k must lie in 0..{top}, got {k}")
    out = np.zeros(skel.shape, dtype=bool)
    for n, layer in skel.layers:
        if n >= k:
            out |= _dilate_fp(layer, footprint(skel.se, n))
    return out
