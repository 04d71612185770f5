"""Edge-based structured morphology on grid graphs.

Dilation sends every member edge to its neighborhood ``N_S(e|G)``; erosion is
its upper adjoint, keeping the edges whose neighborhood lies inside the
input.  Edges without any root-anchored embedding have an empty
neighborhood, so under :attr:`VacuousPolicy.INCLUDE` they always survive
erosion.  That is why erosion here is not anti-extensive in general.
"""

from __future__ import annotations

import enum
from functools import lru_cache
from typing import NamedTuple, Optional

import numpy as np
from scipy import ndimage

from .embed import _minimal_boxes, _region, _shift_slices, neighborhood_table
from .grid import Connectivity, EdgeSet, GridGraph, canonical_edge
from .sgraph import StructuringGraph

BOTTOM = 0
TOP = 255


class VacuousPolicy(enum.Enum):
    INCLUDE = "include"
    EXCLUDE = "exclude"

    @classmethod
    def coerce(cls, value) -> "VacuousPolicy":
        if isinstance(value, cls):
            return value
        return cls(str(value).strip().lower())


def _grid_of(m: EdgeSet, grid: Optional[GridGraph]) -> GridGraph:
    if grid is None:
        return m.grid
    if m.grid != grid:
        raise ValueError(f"edge set lives on {m.grid}, not on {grid}")
    return grid


def _require_roles(sg: StructuringGraph) -> None:
    if not sg.roots or not sg.buds:
        raise ValueError(f"{sg.name}: dilation and erosion need nonempty roots and buds")


def dilate(m: EdgeSet, sg: StructuringGraph, grid: Optional[GridGraph] = None) -> EdgeSet:
    grid = _grid_of(m, grid)
    _require_roles(sg)
    out = np.zeros(grid.valid.shape, dtype=bool)
    planes = m.planes
    for link in neighborhood_table(sg, grid.connectivity).links(grid):
        out[link.bud_dir][link.dst] |= planes[link.anchor_dir][link.src] & link.region
    return EdgeSet(grid, out)


def erode(
    p: EdgeSet,
    sg: StructuringGraph,
    grid: Optional[GridGraph] = None,
    policy=VacuousPolicy.INCLUDE,
) -> EdgeSet:
    grid = _grid_of(p, grid)
    _require_roles(sg)
    policy = VacuousPolicy.coerce(policy)
    table = neighborhood_table(sg, grid.connectivity)
    missing = ~p.planes
    bad = np.zeros(grid.valid.shape, dtype=bool)
    for link in table.links(grid):
        bad[link.anchor_dir][link.src] |= missing[link.bud_dir][link.dst] & link.region
    keep = grid.valid & ~bad
    if policy is VacuousPolicy.EXCLUDE:
        keep &= table.nonempty(grid)
    return EdgeSet(grid, keep)


def open_adjoint(m, sg, grid=None, policy=VacuousPolicy.INCLUDE) -> EdgeSet:
    """Dilation of the erosion."""
    return dilate(erode(m, sg, grid, policy), sg, grid)


def close_adjoint(m, sg, grid=None, policy=VacuousPolicy.INCLUDE) -> EdgeSet:
    """Erosion of the dilation."""
    return erode(dilate(m, sg, grid), sg, grid, policy)


@lru_cache(maxsize=64)
def _bud_placements(sg: StructuringGraph, connectivity: Connectivity):
    """Distinct bud images of ``sg``'s embeddings, up to translation.

    Returns ``[(d_ref, bud_keys, boxes)]``.  Each image is pinned at its
    first bud slot (direction ``d_ref``); ``bud_keys`` are the bud images
    as ``(direction, d_row, d_col)`` relative to that slot and ``boxes`` the
    minimal pixel extents, over all embeddings producing the image, that
    must fit in the grid.
    """
    table = neighborhood_table(sg, connectivity)
    keys = table.edge_keys()
    buds = sorted(sg.buds)
    groups = {}
    for k, vmap in enumerate(table.placements):
        image = sorted((int(keys[k, b, 0]), int(keys[k, b, 1]), int(keys[k, b, 2])) for b in buds)
        d_ref, r0, c0 = image[0]
        rel = tuple((d, r - r0, c - c0) for d, r, c in image)
        mins, maxs = vmap.min(axis=0), vmap.max(axis=0)
        box = (int(mins[0]) - r0, int(maxs[0]) - r0, int(mins[1]) - c0, int(maxs[1]) - c0)
        groups.setdefault((d_ref, rel), set()).add(box)
    return [(d_ref, rel, _minimal_boxes(boxes)) for (d_ref, rel), boxes in sorted(groups.items())]


@lru_cache(maxsize=64)
def _structural_plan(sg: StructuringGraph, grid: GridGraph):
    """Bud images that fit somewhere in ``grid``: reference region plus per-bud slices."""
    h, w = grid.shape
    plan = []
    for d_ref, rel, boxes in _bud_placements(sg, grid.connectivity):
        region = _region(boxes, grid.valid[d_ref])
        if region.any():
            region.setflags(write=False)
            shifts = tuple((db,) + _shift_slices(dr, dc, h, w) for db, dr, dc in rel)
            plan.append((region, shifts))
    return tuple(plan)


def open_structural(m: EdgeSet, sg: StructuringGraph, grid: Optional[GridGraph] = None) -> EdgeSet:
    """Union of the bud images ``h(B_S)`` over all embeddings ``h`` with ``h(B_S) ⊆ m``."""
    grid = _grid_of(m, grid)
    if not sg.buds:
        raise ValueError(f"{sg.name}: structural opening needs bud edges")
    if not sg.is_connected():
        raise ValueError(f"{sg.name}: structural opening needs a connected structuring graph")
    out = np.zeros(grid.valid.shape, dtype=bool)
    planes = m.planes
    for region, shifts in _structural_plan(sg, grid):
        # a fitting box keeps every bud on the grid, so region lies inside each src
        hit = region.copy()
        for db, src, dst in shifts:
            hit[src] &= planes[db][dst]
        if hit.any():
            for db, src, dst in shifts:
                out[db][dst] |= hit[src]
    return EdgeSet(grid, out)


class EdgeWeightMap:
    """Gray value in ``0..255`` for every edge of a grid."""

    __slots__ = ("grid", "planes")

    def __init__(self, grid: GridGraph, planes):
        planes = np.asarray(planes)
        if planes.shape != grid.valid.shape:
            raise ValueError(f"weights of shape {planes.shape} do not fit {grid.valid.shape}")
        if planes.size and (planes.min() < BOTTOM or planes.max() > TOP):
            raise ValueError("gray values must lie in 0..255")
        planes = np.where(grid.valid, planes, BOTTOM).astype(np.uint8)
        planes.setflags(write=False)
        self.grid = grid
        self.planes = planes

    @classmethod
    def from_values(cls, grid: GridGraph, values) -> "EdgeWeightMap":
        """Build from a flat vector in canonical edge order."""
        values = np.asarray(values)
        if values.shape != (grid.n_edges,):
            raise ValueError(f"expected {grid.n_edges} weights")
        planes = np.zeros(grid.valid.shape, dtype=np.int64)
        planes[grid.valid] = values
        return cls(grid, planes)

    @classmethod
    def constant(cls, grid: GridGraph, value: int) -> "EdgeWeightMap":
        return cls(grid, np.full(grid.valid.shape, value))

    @property
    def values(self) -> np.ndarray:
        return self.planes[self.grid.valid]

    def __getitem__(self, edge) -> int:
        u, v = edge
        if not self.grid.are_adjacent(tuple(u), tuple(v)):
            raise KeyError(edge)
        return int(self.planes[canonical_edge(tuple(u), tuple(v))])

    def __le__(self, other: "EdgeWeightMap") -> bool:
        if other.grid != self.grid:
            raise ValueError("weight maps live on different grids")
        return bool(np.all(self.values <= other.values))

    def __eq__(self, other) -> bool:
        if not isinstance(other, EdgeWeightMap):
            return NotImplemented
        return self.grid == other.grid and np.array_equal(self.planes, other.planes)

    __hash__ = None

    def __repr__(self) -> str:
        return f"EdgeWeightMap({self.grid.width}x{self.grid.height}, range {self.values.min()}..{self.values.max()})"


def gray_dilate(f: EdgeWeightMap, sg: StructuringGraph, grid: Optional[GridGraph] = None) -> EdgeWeightMap:
    """``out(e') = max{f(e) : e' in N_S(e)}``, ``0`` where no edge reaches ``e'``."""
    grid = _grid_of(f, grid)
    _require_roles(sg)
    out = np.zeros(grid.valid.shape, dtype=np.uint8)
    for link in neighborhood_table(sg, grid.connectivity).links(grid):
        src = np.where(link.region, f.planes[link.anchor_dir][link.src], BOTTOM)
        np.maximum(out[link.bud_dir][link.dst], src, out=out[link.bud_dir][link.dst])
    return EdgeWeightMap(grid, out)


def gray_erode(g: EdgeWeightMap, sg: StructuringGraph, grid: Optional[GridGraph] = None) -> EdgeWeightMap:
    """``out(e) = min{g(e') : e' in N_S(e)}``, ``255`` on empty neighborhoods."""
    grid = _grid_of(g, grid)
    _require_roles(sg)
    out = np.full(grid.valid.shape, TOP, dtype=np.uint8)
    for link in neighborhood_table(sg, grid.connectivity).links(grid):
        val = np.where(link.region, g.planes[link.bud_dir][link.dst], TOP)
        np.minimum(out[link.anchor_dir][link.src], val, out=out[link.anchor_dir][link.src])
    return EdgeWeightMap(grid, out)


class ConnectedCheck(NamedTuple):
    connected: bool
    witness: Optional[np.ndarray]  # mask of an input flat zone split by the output


def _structure(connectivity) -> np.ndarray:
    if Connectivity.coerce(connectivity) is Connectivity.FOUR:
        return ndimage.generate_binary_structure(2, 1)
    return np.ones((3, 3), dtype=bool)


def flat_zones(img, connectivity=Connectivity.FOUR) -> np.ndarray:
    """Label map of the flat zones (foreground and background components)."""
    img = np.asarray(img, dtype=bool)
    st = _structure(connectivity)
    fg, nfg = ndimage.label(img, structure=st)
    bg, _ = ndimage.label(~img, structure=st)
    return np.where(img, fg, bg + nfg)


def check_connected_instance(inp, out, connectivity=Connectivity.FOUR) -> ConnectedCheck:
    """Does ``out`` only merge flat zones of ``inp``?

    True iff each flat zone of ``inp`` falls inside a single flat zone of
    ``out``.  This certifies one input/output pair, not an operator.
    """
    inp = np.asarray(inp, dtype=bool)
    out = np.asarray(out, dtype=bool)
    if inp.shape != out.shape:
        raise ValueError(f"shape mismatch: {inp.shape} vs {out.shape}")
    zin = flat_zones(inp, connectivity).ravel()
    zout = flat_zones(out, connectivity).ravel()
    pairs = np.unique(np.stack([zin, zout]), axis=1)
    zones, counts = np.unique(pairs[0], return_counts=True)
    split = zones[counts > 1]
    if split.size == 0:
        return ConnectedCheck(True, None)
    witness = (zin == split[0]).reshape(inp.shape)
    return ConnectedCheck(False, witness)
