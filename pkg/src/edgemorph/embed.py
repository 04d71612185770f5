"""Injective homomorphisms of structuring graphs into pixel grids.

Two routes compute the edge neighborhood ``N_S(e|G)``:

* :func:`embeddings_at` / :func:`direct_neighborhood` search the finite grid
  at one anchor edge.
* :class:`NeighborhoodTable` enumerates every embedding of ``S`` into the
  unbounded grid once (up to translation) and records, per bud image, the
  bounding boxes that must fit inside the raster.  On a concrete grid this
  yields one boolean "anchor region" per (root direction, bud offset), so
  whole-image operators become a handful of shifted array operations.

Both routes agree everywhere, border included, because an embedding into a
finite grid is exactly an embedding into the plane whose pixels all land in
bounds.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .grid import (
    DIRECTIONS,
    Connectivity,
    Edge,
    EdgeSet,
    GridGraph,
    Pixel,
    canonical_edge,
)
from .sgraph import AXIS, DIAGONAL, StructuringGraph

Box = Tuple[int, int, int, int]  # min_row, max_row, min_col, max_col
Key = Tuple[int, int, int, int]  # anchor direction, bud direction, d_row, d_col


@dataclass(frozen=True)
class Embedding:
    vertex_map: Tuple[Pixel, ...]
    edge_map: Tuple[Edge, ...]

    def image(self, edge_positions) -> Tuple[Edge, ...]:
        return tuple(self.edge_map[i] for i in edge_positions)


def _kind_ok(kind: Optional[str], u: Pixel, v: Pixel) -> bool:
    if kind is None:
        return True
    diagonal = u[0] != v[0] and u[1] != v[1]
    return diagonal if kind == DIAGONAL else not diagonal


def _adjacent(connectivity: Connectivity, u: Pixel, v: Pixel) -> bool:
    dr, dc = abs(u[0] - v[0]), abs(u[1] - v[1])
    if connectivity is Connectivity.FOUR:
        return dr + dc == 1
    return max(dr, dc) == 1


def _search_order(sg: StructuringGraph, a: int, b: int) -> List[int]:
    adj = sg.adjacency()
    order, seen = [a, b], {a, b}
    i = 0
    while i < len(order):
        for y in sorted(adj[order[i]]):
            if y not in seen:
                seen.add(y)
                order.append(y)
        i += 1
    # vertices unreachable from the seed edge come last, placed anywhere
    order += [x for x in range(sg.n_vertices) if x not in seen]
    return order


def _anchored_maps(
    sg: StructuringGraph,
    connectivity: Connectivity,
    shape: Optional[Tuple[int, int]],
    seed: int,
    p: Pixel,
    q: Pixel,
) -> List[Tuple[Pixel, ...]]:
    """Vertex maps of all injective homomorphisms sending edge ``seed`` onto {p, q}.

    ``shape`` bounds the host grid; ``None`` means the unbounded grid, which
    requires ``sg`` to be connected.
    """
    a, b = sg.edges[seed]
    if not _adjacent(connectivity, p, q) or not _kind_ok(sg.kinds[seed], p, q):
        return []
    if shape is not None:
        h, w = shape
        if not all(0 <= x[0] < h and 0 <= x[1] < w for x in (p, q)):
            return []
    order = _search_order(sg, a, b)
    adj = sg.adjacency()
    kind = {}
    for i, (u, v) in enumerate(sg.edges):
        kind[(u, v)] = kind[(v, u)] = sg.kinds[i]
    steps = DIRECTIONS[: connectivity.n_directions]
    steps = steps + tuple((-dr, -dc) for dr, dc in steps)
    if shape is None and not sg.is_connected():
        raise ValueError("unbounded enumeration needs a connected structuring graph")

    found = []
    theta: Dict[int, Pixel] = {}
    used = set()

    def candidates(x):
        placed = [y for y in adj[x] if y in theta]
        if placed:
            base = theta[placed[0]]
            pool = [(base[0] + dr, base[1] + dc) for dr, dc in steps]
        else:
            h, w = shape
            pool = [(r, c) for r in range(h) for c in range(w)]
        for cand in pool:
            if cand in used:
                continue
            if shape is not None and not (0 <= cand[0] < shape[0] and 0 <= cand[1] < shape[1]):
                continue
            if all(
                _adjacent(connectivity, cand, theta[y]) and _kind_ok(kind[(x, y)], cand, theta[y])
                for y in placed
            ):
                yield cand

    def extend(k):
        if k == len(order):
            found.append(tuple(theta[x] for x in range(sg.n_vertices)))
            return
        x = order[k]
        for cand in candidates(x):
            theta[x] = cand
            used.add(cand)
            extend(k + 1)
            del theta[x]
            used.discard(cand)

    for s, t in ((p, q), (q, p)):
        theta.clear()
        used.clear()
        theta[a], theta[b] = s, t
        used.update((s, t))
        extend(2)
    return found


def _edge_map(sg: StructuringGraph, vmap: Sequence[Pixel]) -> Tuple[Edge, ...]:
    out = []
    for u, v in sg.edges:
        x, y = vmap[u], vmap[v]
        out.append((x, y) if x < y else (y, x))
    return tuple(out)


def _resolve_anchor(grid: GridGraph, anchor) -> Edge:
    if isinstance(anchor, (int, np.integer)):
        return grid.edge(int(anchor))
    u, v = anchor
    u, v = tuple(u), tuple(v)
    if not grid.are_adjacent(u, v):
        raise ValueError(f"anchor {u}-{v} is not an edge of the grid")
    return (u, v) if u < v else (v, u)


def _resolve_root(sg: StructuringGraph, root) -> int:
    if isinstance(root, (int, np.integer)):
        i = int(root)
    else:
        i = sg.edge_position(*root)
    if i not in sg.roots:
        raise ValueError(f"edge {sg.edges[i]} is not a root of {sg.name}")
    return i


def embeddings_at(
    sg: StructuringGraph,
    grid: GridGraph,
    root: Union[int, Tuple[int, int]],
    anchor: Union[int, Edge],
) -> List[Embedding]:
    """All injective homomorphisms mapping the root edge onto ``anchor``.

    ``root`` is an edge position in ``sg.edges`` (or the vertex pair) and must
    be a root; ``anchor`` is a canonical edge index or a pixel pair.  Results
    are sorted by vertex map.
    """
    i = _resolve_root(sg, root)
    p, q = _resolve_anchor(grid, anchor)
    maps = _anchored_maps(sg, grid.connectivity, grid.shape, i, p, q)
    return [Embedding(m, _edge_map(sg, m)) for m in sorted(maps)]


def direct_neighborhood(sg: StructuringGraph, grid: GridGraph, anchor) -> EdgeSet:
    """``N_S(anchor|G)`` by searching embeddings at this one anchor."""
    edges = set()
    for r in sorted(sg.roots):
        for emb in embeddings_at(sg, grid, r, anchor):
            edges.update(emb.image(sorted(sg.buds)))
    return EdgeSet.from_edges(grid, edges)


def _minimal_boxes(boxes) -> Tuple[Box, ...]:
    # a smaller box fits at more anchors, so drop boxes containing another one
    boxes = sorted(set(boxes), key=lambda b: (b[1] - b[0]) + (b[3] - b[2]))
    keep: List[Box] = []
    for b in boxes:
        if not any(
            k[0] >= b[0] and k[1] <= b[1] and k[2] >= b[2] and k[3] <= b[3] for k in keep
        ):
            keep.append(b)
    return tuple(sorted(keep))


def _region(boxes: Sequence[Box], valid: np.ndarray) -> np.ndarray:
    """Anchor slots at which at least one box, taken relative to the slot, fits."""
    h, w = valid.shape
    out = np.zeros((h, w), dtype=bool)
    for mnr, mxr, mnc, mxc in boxes:
        r0, r1 = -mnr, h - mxr
        c0, c1 = -mnc, w - mxc
        if r0 < r1 and c0 < c1:
            out[r0:r1, c0:c1] = True
    return out & valid


def _shift_slices(dr: int, dc: int, h: int, w: int):
    """Slices ``(src, dst)`` with ``dst`` pixel = ``src`` pixel + (dr, dc)."""
    src = (slice(max(0, -dr), max(0, h - max(0, dr))), slice(max(0, -dc), max(0, w - max(0, dc))))
    dst = (slice(max(0, dr), max(0, h - max(0, -dr))), slice(max(0, dc), max(0, w - max(0, -dc))))
    return src, dst


@dataclass(frozen=True)
class _Link:
    anchor_dir: int
    bud_dir: int
    src: tuple
    dst: tuple
    region: np.ndarray  # anchor-region restricted to src


class NeighborhoodTable:
    """Translation templates of ``N_S`` for one structuring graph and connectivity.

    Use :func:`neighborhood_table` to get a shared, memoized instance.
    """

    def __init__(self, sg: StructuringGraph, connectivity: Connectivity):
        if not sg.is_connected():
            raise ValueError(
                f"{sg.name}: bulk operators need a connected structuring graph"
            )
        self.sg = sg
        self.connectivity = Connectivity.coerce(connectivity)
        self.placements = self._enumerate()
        self.boxes: Dict[Key, Tuple[Box, ...]] = self._bud_boxes()

    def _enumerate(self) -> np.ndarray:
        """Every embedding of ``sg`` into the plane, up to translation.

        Returned as an ``(n, |V_S|, 2)`` array; edge 0's image sits at the
        origin slot of its direction.
        """
        maps = []
        for d in range(self.connectivity.n_directions):
            maps += _anchored_maps(self.sg, self.connectivity, None, 0, (0, 0), DIRECTIONS[d])
        if not maps:
            return np.zeros((0, self.sg.n_vertices, 2), dtype=np.int64)
        return np.array(sorted(maps), dtype=np.int64)

    def edge_keys(self) -> np.ndarray:
        """``(n, |E_S|, 3)`` canonical ``(direction, row, col)`` of every edge image."""
        out = np.zeros((len(self.placements), len(self.sg.edges), 3), dtype=np.int64)
        for k, vmap in enumerate(self.placements):
            for i, (u, v) in enumerate(self.sg.edges):
                out[k, i] = canonical_edge(tuple(vmap[u]), tuple(vmap[v]))
        return out

    def _bud_boxes(self) -> Dict[Key, Tuple[Box, ...]]:
        acc: Dict[Key, set] = {}
        keys = self.edge_keys()
        buds = sorted(self.sg.buds)
        for k, vmap in enumerate(self.placements):
            mins = vmap.min(axis=0)
            maxs = vmap.max(axis=0)
            for r in self.sg.roots:
                da, ra, ca = keys[k, r]
                box = (mins[0] - ra, maxs[0] - ra, mins[1] - ca, maxs[1] - ca)
                box = tuple(int(x) for x in box)
                for b in buds:
                    db, rb, cb = keys[k, b]
                    acc.setdefault((int(da), int(db), int(rb - ra), int(cb - ca)), set()).add(box)
        return {key: _minimal_boxes(v) for key, v in sorted(acc.items())}

    def offsets(self, anchor_dir: int):
        """Bud ``(direction, d_row, d_col)`` offsets reachable from an anchor direction."""
        return [(k[1], k[2], k[3]) for k in self.boxes if k[0] == anchor_dir]

    def links(self, grid: GridGraph) -> Tuple[_Link, ...]:
        return _links(self, grid)

    def neighborhood(self, grid: GridGraph, anchor) -> EdgeSet:
        p, q = _resolve_anchor(grid, anchor)
        d, r, c = canonical_edge(p, q)
        planes = np.zeros(grid.valid.shape, dtype=bool)
        for link in self.links(grid):
            if link.anchor_dir != d:
                continue
            i, j = r - link.src[0].start, c - link.src[1].start
            if 0 <= i < link.region.shape[0] and 0 <= j < link.region.shape[1] and link.region[i, j]:
                planes[link.bud_dir, i + link.dst[0].start, j + link.dst[1].start] = True
        return EdgeSet(grid, planes)

    def nonempty(self, grid: GridGraph) -> np.ndarray:
        """``(D, H, W)`` mask of edges whose neighborhood is nonempty."""
        return _nonempty(self, grid)


@lru_cache(maxsize=64)
def _links(table: NeighborhoodTable, grid: GridGraph) -> Tuple[_Link, ...]:
    if grid.connectivity is not table.connectivity:
        raise ValueError("grid connectivity does not match the neighborhood table")
    h, w = grid.shape
    out = []
    regions: Dict[Tuple[int, Tuple[Box, ...]], np.ndarray] = {}
    for (da, db, dr, dc), boxes in table.boxes.items():
        region = regions.get((da, boxes))
        if region is None:
            region = regions[(da, boxes)] = _region(boxes, grid.valid[da])
        src, dst = _shift_slices(dr, dc, h, w)
        sub = np.ascontiguousarray(region[src])
        if not sub.any():
            continue
        sub.setflags(write=False)
        out.append(_Link(da, db, src, dst, sub))
    return tuple(out)


@lru_cache(maxsize=64)
def _nonempty(table: NeighborhoodTable, grid: GridGraph) -> np.ndarray:
    mask = np.zeros(grid.valid.shape, dtype=bool)
    for link in _links(table, grid):
        mask[link.anchor_dir][link.src] |= link.region
    mask.setflags(write=False)
    return mask


@lru_cache(maxsize=128)
def neighborhood_table(sg: StructuringGraph, connectivity) -> NeighborhoodTable:
    return NeighborhoodTable(sg, Connectivity.coerce(connectivity))


def neighborhood(sg: StructuringGraph, grid: GridGraph, anchor) -> EdgeSet:
    """Edge neighborhood ``N_S(anchor|G)``: union of bud images over root-anchored embeddings."""
    if not sg.is_connected():
        return direct_neighborhood(sg, grid, anchor)
    return neighborhood_table(sg, grid.connectivity).neighborhood(grid, anchor)
