"""Pixel-adjacency grid graphs and edge-set images over them.

A binary image is carried as a set of grid edges: an edge belongs to the
image when both of its endpoint pixels are foreground.  Edge sets are stored
as boolean planes of shape ``(n_directions, height, width)``; slot
``[d, r, c]`` is the edge from pixel ``(r, c)`` to ``(r, c) + DIRECTIONS[d]``.
The lexicographically smaller endpoint is always the slot pixel, so the
plane layout doubles as the canonical edge form.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Iterator, Tuple

import numpy as np

Pixel = Tuple[int, int]
Edge = Tuple[Pixel, Pixel]

# Order matters: it fixes canonical edge indices.
DIRECTIONS: Tuple[Pixel, ...] = ((0, 1), (1, 0), (1, 1), (1, -1))
AXIS_DIRECTIONS = (0, 1)
DIAGONAL_DIRECTIONS = (2, 3)


class Connectivity(enum.IntEnum):
    FOUR = 4
    EIGHT = 8

    @classmethod
    def coerce(cls, value) -> "Connectivity":
        if isinstance(value, cls):
            return value
        if isinstance(value, str):
            key = value.strip().lower()
            if key in ("4", "four"):
                return cls.FOUR
            if key in ("8", "eight"):
                return cls.EIGHT
            raise ValueError(f"unknown connectivity {value!r}")
        return cls(int(value))

    @property
    def n_directions(self) -> int:
        return 2 if self is Connectivity.FOUR else 4


def canonical_edge(u: Pixel, v: Pixel) -> Tuple[int, int, int]:
    """Return ``(direction, row, col)`` of the undirected edge ``{u, v}``.

    Raises ``ValueError`` if the pixels are not 8-adjacent.
    """
    if v < u:
        u, v = v, u
    step = (v[0] - u[0], v[1] - u[1])
    try:
        d = DIRECTIONS.index(step)
    except ValueError:
        raise ValueError(f"pixels {u} and {v} are not adjacent") from None
    return d, u[0], u[1]


@dataclass(frozen=True)
class GridGraph:
    """Regular 4- or 8-connected pixel grid."""

    width: int
    height: int
    connectivity: Connectivity = Connectivity.FOUR

    def __post_init__(self):
        if int(self.width) < 1 or int(self.height) < 1:
            raise ValueError(
                f"grid dimensions must be positive, got {self.width}x{self.height}"
            )
        object.__setattr__(self, "width", int(self.width))
        object.__setattr__(self, "height", int(self.height))
        object.__setattr__(self, "connectivity", Connectivity.coerce(self.connectivity))

    @property
    def shape(self) -> Tuple[int, int]:
        return (self.height, self.width)

    @property
    def n_directions(self) -> int:
        return self.connectivity.n_directions

    @property
    def directions(self) -> Tuple[Pixel, ...]:
        return DIRECTIONS[: self.n_directions]

    @cached_property
    def valid(self) -> np.ndarray:
        """Boolean ``(D, H, W)`` mask of slots that hold a real edge."""
        h, w = self.shape
        mask = np.zeros((self.n_directions, h, w), dtype=bool)
        for d, (dr, dc) in enumerate(self.directions):
            r0, r1 = 0, h - dr
            c0, c1 = max(0, -dc), w - max(0, dc)
            mask[d, r0:r1, c0:c1] = True
        mask.setflags(write=False)
        return mask

    @cached_property
    def _slot_index(self) -> np.ndarray:
        idx = np.full(self.valid.shape, -1, dtype=np.int64)
        idx[self.valid] = np.arange(int(self.valid.sum()))
        idx.setflags(write=False)
        return idx

    @cached_property
    def _slots(self) -> np.ndarray:
        slots = np.argwhere(self.valid)
        slots.setflags(write=False)
        return slots

    @property
    def n_edges(self) -> int:
        return int(self._slots.shape[0])

    @property
    def n_vertices(self) -> int:
        return self.width * self.height

    def contains_pixel(self, p: Pixel) -> bool:
        return 0 <= p[0] < self.height and 0 <= p[1] < self.width

    def are_adjacent(self, u: Pixel, v: Pixel) -> bool:
        if not (self.contains_pixel(u) and self.contains_pixel(v)):
            return False
        dr, dc = abs(u[0] - v[0]), abs(u[1] - v[1])
        if self.connectivity is Connectivity.FOUR:
            return dr + dc == 1
        return max(dr, dc) == 1

    def neighbors(self, p: Pixel) -> Iterator[Pixel]:
        r, c = p
        for dr, dc in self.directions:
            for q in ((r + dr, c + dc), (r - dr, c - dc)):
                if self.contains_pixel(q):
                    yield q

    def edge_index(self, u: Pixel, v: Pixel) -> int:
        """Canonical index of edge ``{u, v}``; ``ValueError`` if not a grid edge."""
        if not self.are_adjacent(u, v):
            raise ValueError(f"{u}-{v} is not an edge of {self}")
        return int(self._slot_index[canonical_edge(u, v)])

    def edge(self, index: int) -> Edge:
        """Endpoints of the edge with canonical ``index``, smaller pixel first."""
        d, r, c = (int(x) for x in self._slots[index])
        dr, dc = DIRECTIONS[d]
        return (r, c), (r + dr, c + dc)

    def edges(self) -> Iterator[Edge]:
        for i in range(self.n_edges):
            yield self.edge(i)


def build_grid(width: int, height: int, connectivity=Connectivity.FOUR) -> GridGraph:
    return GridGraph(width, height, Connectivity.coerce(connectivity))


class EdgeSet:
    """Immutable set of edges of a :class:`GridGraph`.

    Supports ``|``, ``&``, ``-``, ``<=``, ``>=``, ``in``, ``len`` and iteration
    over ``(u, v)`` pairs in canonical order.
    """

    __slots__ = ("grid", "planes", "_hash")

    def __init__(self, grid: GridGraph, planes: np.ndarray):
        planes = np.asarray(planes, dtype=bool)
        if planes.shape != grid.valid.shape:
            raise ValueError(
                f"planes of shape {planes.shape} do not fit grid {grid.valid.shape}"
            )
        planes = planes & grid.valid
        planes.setflags(write=False)
        self.grid = grid
        self.planes = planes
        self._hash = None

    @classmethod
    def empty(cls, grid: GridGraph) -> "EdgeSet":
        return cls(grid, np.zeros(grid.valid.shape, dtype=bool))

    @classmethod
    def full(cls, grid: GridGraph) -> "EdgeSet":
        return cls(grid, grid.valid)

    @classmethod
    def from_edges(cls, grid: GridGraph, edges: Iterable[Edge]) -> "EdgeSet":
        planes = np.zeros(grid.valid.shape, dtype=bool)
        for u, v in edges:
            u, v = tuple(u), tuple(v)
            if not grid.are_adjacent(u, v):
                raise ValueError(f"{u}-{v} is not an edge of the grid")
            planes[canonical_edge(u, v)] = True
        return cls(grid, planes)

    @classmethod
    def from_indices(cls, grid: GridGraph, indices: Iterable[int]) -> "EdgeSet":
        mask = np.zeros(grid.n_edges, dtype=bool)
        idx = np.asarray(list(indices), dtype=np.int64)
        if idx.size and (idx.min() < 0 or idx.max() >= grid.n_edges):
            raise ValueError("edge index out of range")
        mask[idx] = True
        return cls.from_mask(grid, mask)

    @classmethod
    def from_mask(cls, grid: GridGraph, mask) -> "EdgeSet":
        """Build from a flat boolean vector in canonical edge order."""
        mask = np.asarray(mask, dtype=bool)
        if mask.shape != (grid.n_edges,):
            raise ValueError(f"mask must have shape ({grid.n_edges},)")
        planes = np.zeros(grid.valid.shape, dtype=bool)
        planes[grid.valid] = mask
        return cls(grid, planes)

    @property
    def mask(self) -> np.ndarray:
        return self.planes[self.grid.valid]

    def indices(self) -> np.ndarray:
        return np.flatnonzero(self.mask)

    def __len__(self) -> int:
        return int(self.planes.sum())

    def __bool__(self) -> bool:
        return bool(self.planes.any())

    def __iter__(self) -> Iterator[Edge]:
        for d, r, c in np.argwhere(self.planes):
            dr, dc = DIRECTIONS[d]
            yield (int(r), int(c)), (int(r + dr), int(c + dc))

    def __contains__(self, edge) -> bool:
        u, v = edge
        u, v = tuple(u), tuple(v)
        if not self.grid.are_adjacent(u, v):
            return False
        return bool(self.planes[canonical_edge(u, v)])

    def _check(self, other: "EdgeSet") -> None:
        if not isinstance(other, EdgeSet):
            raise TypeError(f"expected EdgeSet, got {type(other).__name__}")
        if other.grid != self.grid:
            raise ValueError("edge sets live on different grids")

    def __or__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.grid, self.planes | other.planes)

    def __and__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.grid, self.planes & other.planes)

    def __sub__(self, other: "EdgeSet") -> "EdgeSet":
        self._check(other)
        return EdgeSet(self.grid, self.planes & ~other.planes)

    def __le__(self, other: "EdgeSet") -> bool:
        self._check(other)
        return not bool((self.planes & ~other.planes).any())

    def __ge__(self, other: "EdgeSet") -> bool:
        return other <= self

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeSet):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.planes, other.planes)

    def __hash__(self) -> int:
        if self._hash is None:
            self._hash = hash((self.grid, np.packbits(self.planes).tobytes()))
        return self._hash

    def issubset(self, other: "EdgeSet") -> bool:
        return self <= other

    def complement(self) -> "EdgeSet":
        return EdgeSet(self.grid, ~self.planes)

    def __repr__(self) -> str:
        g = self.grid
        return f"EdgeSet({len(self)} of {g.n_edges} edges on {g.width}x{g.height}/{int(g.connectivity)})"


def _as_raster(img) -> np.ndarray:
    arr = np.asarray(img)
    if arr.ndim != 2:
        raise ValueError(f"expected a 2-D raster, got shape {arr.shape}")
    return arr.astype(bool)


def image_to_edgeset(img, grid: GridGraph) -> EdgeSet:
    """Edges whose two endpoint pixels are both foreground."""
    fg = _as_raster(img)
    if fg.shape != grid.shape:
        raise ValueError(f"raster shape {fg.shape} does not match grid {grid.shape}")
    planes = np.zeros(grid.valid.shape, dtype=bool)
    h, w = grid.shape
    for d, (dr, dc) in enumerate(grid.directions):
        c0, c1 = max(0, -dc), w - max(0, dc)
        planes[d, : h - dr, c0:c1] = fg[: h - dr, c0:c1] & fg[dr:, c0 + dc : c1 + dc]
    return EdgeSet(grid, planes)


def edgeset_to_image(es: EdgeSet) -> np.ndarray:
    """Pixels incident to at least one member edge."""
    grid = es.grid
    h, w = grid.shape
    out = np.zeros((h, w), dtype=bool)
    for d, (dr, dc) in enumerate(grid.directions):
        plane = es.planes[d]
        c0, c1 = max(0, -dc), w - max(0, dc)
        out[: h - dr, c0:c1] |= plane[: h - dr, c0:c1]
        out[dr:, c0 + dc : c1 + dc] |= plane[: h - dr, c0:c1]
    return out
