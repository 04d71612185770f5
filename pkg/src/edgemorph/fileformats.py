"""Text formats for edge sets, skeleton decompositions and pixel skeletons.

Edge set::

    GME1 <width> <height> <4|8>
    <u_row> <u_col> <v_row> <v_col>        one line per edge, canonical order

Decomposition::

    GMSKEL1 <width> <height> <4|8>
    POLICY <include|exclude>
    SGRAPH <name>
    <structuring graph text>
    END
    LAYER <n>
    <edge lines>
    RESIDUE <N>
    <edge lines>
    TERMINATION <reason>

Pixel skeleton::

    PXSKEL1 <width> <height> <cross3|box3>
    LAYER <n>
    <row> <col>
"""

from __future__ import annotations

from typing import List, Optional, Tuple

import numpy as np

from .classical import FlatSE, PixelSkeleton
from .grid import EdgeSet, GridGraph, build_grid
from .morph import VacuousPolicy
from .sgraph import parse_sgraph, serialize_sgraph
from .skeleton import SkeletonDecomposition, Termination


class FormatError(ValueError):
    pass


def _edge_lines(es: EdgeSet) -> List[str]:
    return [f"{u[0]} {u[1]} {v[0]} {v[1]}" for u, v in es]


def _grid_header(tag: str, grid: GridGraph) -> str:
    return f"{tag} {grid.width} {grid.height} {int(grid.connectivity)}"


def _parse_grid_header(line: str, tag: str) -> GridGraph:
    parts = line.split()
    if len(parts) != 4 or parts[0] != tag:
        raise FormatError(f"expected '{tag} <width> <height> <4|8>' header")
    try:
        w, h, conn = int(parts[1]), int(parts[2]), int(parts[3])
        return build_grid(w, h, conn)
    except ValueError as exc:
        raise FormatError(f"bad {tag} header: {exc}") from None


def _parse_edge(grid: GridGraph, line: str, lineno: int):
    parts = line.split()
    if len(parts) != 4:
        raise FormatError(f"line {lineno}: expected four integers")
    try:
        a, b, c, d = (int(x) for x in parts)
    except ValueError:
        raise FormatError(f"line {lineno}: expected four integers") from None
    u, v = (a, b), (c, d)
    if not grid.are_adjacent(u, v):
        raise FormatError(f"line {lineno}: {u}-{v} is not an edge of the grid")
    return u, v


def _content_lines(text: str):
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if line:
            yield lineno, line


def write_edges(es: EdgeSet) -> str:
    return "\n".join([_grid_header("GME1", es.grid)] + _edge_lines(es)) + "\n"


def read_edges(text: str) -> EdgeSet:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty edge file")
    grid = _parse_grid_header(lines[0][1], "GME1")
    return EdgeSet.from_edges(grid, (_parse_edge(grid, line, no) for no, line in lines[1:]))


def write_decomposition(d: SkeletonDecomposition) -> str:
    out = [_grid_header("GMSKEL1", d.grid), f"POLICY {d.policy.value}", f"SGRAPH {d.sgraph_id}"]
    out += [ln for ln in serialize_sgraph(d.sgraph).splitlines() if not ln.startswith("#")]
    out.append("END")
    for n, layer in enumerate(d.layers):
        out.append(f"LAYER {n}")
        out += _edge_lines(layer)
    out.append(f"RESIDUE {d.depth}")
    out += _edge_lines(d.residue)
    out.append(f"TERMINATION {d.termination.value}")
    return "\n".join(out) + "\n"


def read_decomposition(text: str) -> SkeletonDecomposition:
    lines = list(_content_lines(text))
    if len(lines) < 3:
        raise FormatError("truncated decomposition file")
    grid = _parse_grid_header(lines[0][1], "GMSKEL1")
    it = iter(lines[1:])

    def keyword(expected: str) -> Tuple[int, str]:
        try:
            no, line = next(it)
        except StopIteration:
            raise FormatError(f"missing {expected} line") from None
        parts = line.split(maxsplit=1)
        if parts[0] != expected or len(parts) != 2:
            raise FormatError(f"line {no}: expected '{expected} <value>'")
        return no, parts[1]

    no, value = keyword("POLICY")
    try:
        policy = VacuousPolicy.coerce(value)
    except ValueError:
        raise FormatError(f"line {no}: unknown policy {value!r}") from None
    _, name = keyword("SGRAPH")
    sg_lines = []
    for no, line in it:
        if line == "END":
            break
        sg_lines.append(line)
    else:
        raise FormatError("structuring graph block is not closed by END")
    sg = parse_sgraph("\n".join(sg_lines), name=name)

    blocks: List[Tuple[str, int, list]] = []
    termination: Optional[Termination] = None
    for no, line in it:
        head = line.split()
        if head[0] in ("LAYER", "RESIDUE"):
            if termination is not None or len(head) != 2 or not head[1].isdigit():
                raise FormatError(f"line {no}: malformed {head[0]} line")
            blocks.append((head[0], int(head[1]), []))
        elif head[0] == "TERMINATION":
            if len(head) != 2:
                raise FormatError(f"line {no}: malformed TERMINATION line")
            try:
                termination = Termination(head[1])
            except ValueError:
                raise FormatError(f"line {no}: unknown termination {head[1]!r}") from None
        else:
            if not blocks or termination is not None:
                raise FormatError(f"line {no}: edge outside a LAYER/RESIDUE block")
            blocks[-1][2].append(_parse_edge(grid, line, no))
    if termination is None:
        raise FormatError("missing TERMINATION line")
    if not blocks or blocks[-1][0] != "RESIDUE":
        raise FormatError("missing RESIDUE block")
    layers = blocks[:-1]
    for expected, (kind, n, _) in enumerate(layers):
        if kind != "LAYER" or n != expected:
            raise FormatError(f"layers must be numbered 0..N-1 in order (found {kind} {n})")
    if blocks[-1][1] != len(layers):
        raise FormatError(f"RESIDUE index {blocks[-1][1]} does not match {len(layers)} layers")
    return SkeletonDecomposition(
        tuple(EdgeSet.from_edges(grid, edges) for _, _, edges in layers),
        EdgeSet.from_edges(grid, blocks[-1][2]),
        termination,
        policy,
        sg,
    )


def write_pixel_skeleton(skel: PixelSkeleton) -> str:
    h, w = skel.shape
    out = [f"PXSKEL1 {w} {h} {skel.se.value}"]
    for n, layer in skel.layers:
        out.append(f"LAYER {n}")
        out += [f"{r} {c}" for r, c in np.argwhere(layer)]
    return "\n".join(out) + "\n"


def read_pixel_skeleton(text: str) -> PixelSkeleton:
    lines = list(_content_lines(text))
    if not lines:
        raise FormatError("empty pixel skeleton file")
    parts = lines[0][1].split()
    if len(parts) != 4 or parts[0] != "PXSKEL1":
        raise FormatError("expected 'PXSKEL1 <width> <height> <se>' header")
    try:
        w, h = int(parts[1]), int(parts[2])
        se = FlatSE.coerce(parts[3])
    except ValueError as exc:
        raise FormatError(f"bad PXSKEL1 header: {exc}") from None
    if w < 1 or h < 1:
        raise FormatError("dimensions must be positive")
    layers = []
    for no, line in lines[1:]:
        head = line.split()
        if head[0] == "LAYER":
            if len(head) != 2 or not head[1].isdigit() or int(head[1]) != len(layers):
                raise FormatError(f"line {no}: layers must be numbered 0..N in order")
            layers.append((int(head[1]), np.zeros((h, w), dtype=bool)))
            continue
        if not layers or len(head) != 2:
            raise FormatError(f"line {no}: expected '<row> <col>' inside a LAYER block")
        try:
            r, c = int(head[0]), int(head[1])
        except ValueError:
            raise FormatError(f"line {no}: expected two integers") from None
        if not (0 <= r < h and 0 <= c < w):
            raise FormatError(f"line {no}: pixel ({r}, {c}) out of bounds")
        layers[-1][1][r, c] = True
    return PixelSkeleton((h, w), se, tuple(layers))
