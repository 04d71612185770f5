"""Multiscale skeletons, reconstruction and erosion-count distance maps."""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from .grid import Connectivity, EdgeSet, GridGraph, build_grid, edgeset_to_image, image_to_edgeset
from .morph import VacuousPolicy, dilate, erode
from .sgraph import StructuringGraph, builtin

INF = np.iinfo(np.int64).max


class Termination(enum.Enum):
    EMPTIED = "emptied"
    FIXPOINT = "fixpoint"
    CYCLE_DETECTED = "cycle_detected"
    MAX_ITERATIONS = "max_iterations"


def default_max_iter(grid: GridGraph) -> int:
    return 4 * (grid.width + grid.height)


@dataclass(frozen=True)
class SkeletonDecomposition:
    """Layers ``skel_n`` for ``n = 0..depth-1`` plus the last erosion ``E_depth``.

    ``layers[n]`` is ``E_n - dilate(E_{n+1})`` with ``E_0 = M`` and
    ``E_{n+1} = erode(E_n)``.  Keeping ``residue`` makes reconstruction at
    ``k = 0`` return ``M`` exactly, whatever stopped the iteration.
    """

    layers: Tuple[EdgeSet, ...]
    residue: EdgeSet
    termination: Termination
    policy: VacuousPolicy
    sgraph: StructuringGraph

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def grid(self) -> GridGraph:
        return self.residue.grid

    @property
    def sgraph_id(self) -> str:
        return self.sgraph.name

    def skeleton(self) -> EdgeSet:
        """Union of all layers."""
        out = EdgeSet.empty(self.grid)
        for layer in self.layers:
            out = out | layer
        return out

    def scale_labels(self) -> np.ndarray:
        """Per pixel: 1 + smallest layer index whose edges touch it, 0 elsewhere."""
        labels = np.zeros(self.grid.shape, dtype=np.int64)
        for n in reversed(range(self.depth)):
            labels[edgeset_to_image(self.layers[n])] = n + 1
        return labels


def skeletonize(
    m: EdgeSet,
    sg: StructuringGraph,
    grid: Optional[GridGraph] = None,
    policy=VacuousPolicy.INCLUDE,
    max_iter: Optional[int] = None,
) -> SkeletonDecomposition:
    grid = grid or m.grid
    if m.grid != grid:
        raise ValueError("edge set does not live on the given grid")
    policy = VacuousPolicy.coerce(policy)
    if max_iter is None:
        max_iter = default_max_iter(grid)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")

    current = m
    layers = []
    if not current:
        return SkeletonDecomposition((), current, Termination.EMPTIED, policy, sg)
    seen = {current}
    while True:
        nxt = erode(current, sg, grid, policy)
        layers.append(current - dilate(nxt, sg, grid))
        if not nxt:
            reason = Termination.EMPTIED
        elif nxt == current:
            reason = Termination.FIXPOINT
        elif nxt in seen:
            reason = Termination.CYCLE_DETECTED
        elif len(layers) >= max_iter:
            reason = Termination.MAX_ITERATIONS
        else:
            seen.add(nxt)
            current = nxt
            continue
        return SkeletonDecomposition(tuple(layers), nxt, reason, policy, sg)


def reconstruct(d: SkeletonDecomposition, grid: Optional[GridGraph] = None, k: int = 0) -> EdgeSet:
    """Union of ``dilate^n(layers[n])`` for ``k <= n < depth``, plus ``dilate^depth(residue)``."""
    grid = grid or d.grid
    if grid != d.grid:
        raise ValueError("decomposition was computed on a different grid")
    if not 0 <= k <= d.depth:
        raise ValueError(f"k must lie in 0..{d.depth}, got {k}")
    # Horner form: dilation distributes over union
    acc = d.residue
    for n in range(d.depth - 1, k - 1, -1):
        acc = d.layers[n] | dilate(acc, d.sgraph, grid)
    for _ in range(k):
        acc = dilate(acc, d.sgraph, grid)
    return acc


@dataclass(frozen=True)
class DistanceMap:
    """Per-pixel erosion count.

    0 on pixels not touched by the input edges; otherwise the first ``n``
    at which the pixel no longer touches ``erode^n(M)``; :data:`INF` when it
    still does after ``max_iter`` erosions or the erosions settle.
    """

    grid: GridGraph
    values: np.ndarray

    @property
    def finite(self) -> np.ndarray:
        return self.values != INF

    def __array__(self, dtype=None, copy=None):
        return self.values if dtype is None else self.values.astype(dtype)


def distance_map(
    m: EdgeSet,
    sg: StructuringGraph,
    grid: Optional[GridGraph] = None,
    policy=VacuousPolicy.INCLUDE,
    max_iter: Optional[int] = None,
) -> DistanceMap:
    grid = grid or m.grid
    if m.grid != grid:
        raise ValueError("edge set does not live on the given grid")
    if max_iter is None:
        max_iter = default_max_iter(grid)
    if max_iter < 1:
        raise ValueError("max_iter must be at least 1")
    values = np.zeros(grid.shape, dtype=np.int64)
    alive = edgeset_to_image(m)
    current = m
    seen = {current}
    for n in range(1, max_iter + 1):
        if not alive.any():
            break
        current = erode(current, sg, grid, policy)
        touched = edgeset_to_image(current)
        values[alive & ~touched] = n
        alive &= touched
        if current in seen:
            break  # periodic from here on: survivors never leave
        seen.add(current)
    values[alive] = INF
    values.setflags(write=False)
    return DistanceMap(grid, values)


class DistanceVariant(enum.Enum):
    ODD = "odd"    # axis steps
    EVEN = "even"  # diagonal steps

    @classmethod
    def coerce(cls, value) -> "DistanceVariant":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())

    @property
    def steps(self):
        if self is DistanceVariant.ODD:
            return ((0, 1), (1, 0), (0, -1), (-1, 0))
        return ((1, 1), (1, -1), (-1, 1), (-1, -1))

    @property
    def sgraph(self) -> StructuringGraph:
        return builtin("triangle_odd" if self is DistanceVariant.ODD else "triangle_even")


def local_maxima(values, img, variant) -> np.ndarray:
    """Foreground pixels whose value is >= every in-bounds neighbor's (plateaus kept)."""
    values = np.asarray(values)
    fg = np.asarray(img, dtype=bool)
    if values.shape != fg.shape:
        raise ValueError("values and image differ in shape")
    h, w = fg.shape
    keep = fg.copy()
    for dr, dc in DistanceVariant.coerce(variant).steps:
        r0, r1 = max(0, -dr), h - max(0, dr)
        c0, c1 = max(0, -dc), w - max(0, dc)
        keep[r0:r1, c0:c1] &= values[r0:r1, c0:c1] >= values[r0 + dr : r1 + dr, c0 + dc : c1 + dc]
    return keep


def skeleton_by_distance(img, variant="odd", policy=VacuousPolicy.EXCLUDE, max_iter=None) -> np.ndarray:
    """Local maxima of the triangle erosion distance map on the 8-connected grid.

    ``variant`` picks the triangle (``"odd"``: axis root, ``"even"``: diagonal
    root) and the neighborhood used for the maxima test.
    """
    variant = DistanceVariant.coerce(variant)
    fg = np.asarray(img, dtype=bool)
    if fg.ndim != 2:
        raise ValueError("expected a 2-D raster")
    grid = build_grid(fg.shape[1], fg.shape[0], Connectivity.EIGHT)
    dm = distance_map(image_to_edgeset(fg, grid), variant.sgraph, grid, policy, max_iter)
    return local_maxima(dm.values, fg, variant)
