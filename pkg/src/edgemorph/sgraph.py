"""Structuring graphs: small graphs whose edges are tagged as roots and buds.

Text format, one declaration per line, ``#`` starts a comment::

    v <id>                  declare vertex <id>; ids must end up being 0..k-1
    e <u> <v> [flags]       declare edge {u, v}

``flags`` is a string over ``r`` (root), ``b`` (bud), ``a`` (image must be an
axis-aligned grid edge) and ``d`` (image must be a diagonal grid edge).  It
may be omitted or written ``-`` for an edge that is neither root nor bud.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import FrozenSet, Optional, Tuple

MAX_VERTICES = 16

AXIS = "axis"
DIAGONAL = "diag"
_KIND_FLAGS = {"a": AXIS, "d": DIAGONAL}


class SGraphParseError(ValueError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True)
class StructuringGraph:
    """A simple graph on vertices ``0..n_vertices-1`` with root/bud edge roles.

    ``roots`` and ``buds`` hold positions into ``edges``.  ``kinds`` optionally
    pins the orientation class of an edge's image in the grid (``"axis"`` or
    ``"diag"``); ``None`` leaves it free.
    """

    n_vertices: int
    edges: Tuple[Tuple[int, int], ...]
    roots: FrozenSet[int]
    buds: FrozenSet[int]
    kinds: Tuple[Optional[str], ...] = ()
    name: str = field(default="custom", compare=False)

    def __post_init__(self):
        edges = tuple((min(u, v), max(u, v)) for u, v in self.edges)
        object.__setattr__(self, "edges", edges)
        object.__setattr__(self, "roots", frozenset(self.roots))
        object.__setattr__(self, "buds", frozenset(self.buds))
        kinds = tuple(self.kinds) if self.kinds else (None,) * len(edges)
        object.__setattr__(self, "kinds", kinds)
        self._validate()

    def _validate(self) -> None:
        if not 1 <= self.n_vertices <= MAX_VERTICES:
            raise ValueError(
                f"structuring graph needs 1..{MAX_VERTICES} vertices, got {self.n_vertices}"
            )
        if len(self.kinds) != len(self.edges):
            raise ValueError("kinds must have one entry per edge")
        seen = set()
        for u, v in self.edges:
            if u == v:
                raise ValueError(f"self-loop on vertex {u}")
            if not (0 <= u < self.n_vertices and 0 <= v < self.n_vertices):
                raise ValueError(f"edge {u}-{v} references an undeclared vertex")
            if (u, v) in seen:
                raise ValueError(f"duplicate edge {u}-{v}")
            seen.add((u, v))
        for role, ids in (("root", self.roots), ("bud", self.buds)):
            for i in ids:
                if not 0 <= i < len(self.edges):
                    raise ValueError(f"{role} index {i} is not an edge")
        for k in self.kinds:
            if k not in (None, AXIS, DIAGONAL):
                raise ValueError(f"unknown edge kind {k!r}")

    @property
    def root_edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(self.edges[i] for i in sorted(self.roots))

    @property
    def bud_edges(self) -> Tuple[Tuple[int, int], ...]:
        return tuple(self.edges[i] for i in sorted(self.buds))

    def adjacency(self) -> Tuple[FrozenSet[int], ...]:
        adj = [set() for _ in range(self.n_vertices)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def is_connected(self) -> bool:
        adj = self.adjacency()
        seen = {0}
        stack = [0]
        while stack:
            x = stack.pop()
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        return len(seen) == self.n_vertices

    def edge_position(self, u: int, v: int) -> int:
        return self.edges.index((min(u, v), max(u, v)))

    def __repr__(self) -> str:
        return (
            f"StructuringGraph({self.name!r}, |V|={self.n_vertices}, |E|={len(self.edges)}, "
            f"|R|={len(self.roots)}, |B|={len(self.buds)})"
        )


def _flags(sg: StructuringGraph, i: int) -> str:
    out = ""
    if i in sg.roots:
        out += "r"
    if i in sg.buds:
        out += "b"
    if sg.kinds[i] == AXIS:
        out += "a"
    elif sg.kinds[i] == DIAGONAL:
        out += "d"
    return out


def serialize_sgraph(sg: StructuringGraph) -> str:
    lines = [f"# {sg.name}"]
    lines += [f"v {i}" for i in range(sg.n_vertices)]
    for i, (u, v) in enumerate(sg.edges):
        flags = _flags(sg, i)
        lines.append(f"e {u} {v} {flags}" if flags else f"e {u} {v}")
    return "\n".join(lines) + "\n"


def parse_sgraph(text: str, name: str = "custom") -> StructuringGraph:
    vertices = {}
    edges = []
    edge_lines = []
    roots, buds, kinds = set(), set(), []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split()
        tag = parts[0]
        if tag == "v":
            if len(parts) != 2:
                raise SGraphParseError(lineno, "expected 'v <id>'")
            vid = _parse_id(parts[1], lineno)
            if vid in vertices:
                raise SGraphParseError(lineno, f"vertex {vid} declared twice")
            vertices[vid] = lineno
            if len(vertices) > MAX_VERTICES:
                raise SGraphParseError(lineno, f"more than {MAX_VERTICES} vertices")
        elif tag == "e":
            if len(parts) not in (3, 4):
                raise SGraphParseError(lineno, "expected 'e <u> <v> [flags]'")
            u, v = _parse_id(parts[1], lineno), _parse_id(parts[2], lineno)
            if u == v:
                raise SGraphParseError(lineno, f"self-loop on vertex {u}")
            key = (min(u, v), max(u, v))
            if key in edges:
                raise SGraphParseError(lineno, f"duplicate edge {u}-{v}")
            flags = parts[3] if len(parts) == 4 else ""
            if flags == "-":
                flags = ""
            if set(flags) - set("rbad") or len(set(flags)) != len(flags):
                raise SGraphParseError(lineno, f"bad edge flags {flags!r}")
            if "a" in flags and "d" in flags:
                raise SGraphParseError(lineno, "edge cannot be both axis and diagonal")
            i = len(edges)
            edges.append(key)
            edge_lines.append(lineno)
            if "r" in flags:
                roots.add(i)
            if "b" in flags:
                buds.add(i)
            kind = None
            for f, k in _KIND_FLAGS.items():
                if f in flags:
                    kind = k
            kinds.append(kind)
        else:
            raise SGraphParseError(lineno, f"unknown declaration {tag!r}")
    for (u, v), lineno in zip(edges, edge_lines):
        for x in (u, v):
            if x not in vertices:
                raise SGraphParseError(lineno, f"edge references undeclared vertex {x}")
    if not vertices:
        raise SGraphParseError(0, "no vertices declared")
    n = len(vertices)
    if sorted(vertices) != list(range(n)):
        bad = next(i for i in sorted(vertices) if i >= n)
        raise SGraphParseError(vertices[bad], f"vertex ids must be 0..{n - 1}")
    return StructuringGraph(n, tuple(edges), roots, buds, tuple(kinds), name=name)


def _parse_id(token: str, lineno: int) -> int:
    try:
        value = int(token)
    except ValueError:
        raise SGraphParseError(lineno, f"bad vertex id {token!r}") from None
    if value < 0:
        raise SGraphParseError(lineno, f"negative vertex id {value}")
    return value


def _grid3() -> StructuringGraph:
    edges = []
    for r in range(3):
        for c in range(3):
            v = 3 * r + c
            if c < 2:
                edges.append((v, v + 1))
            if r < 2:
                edges.append((v, v + 3))
    every = frozenset(range(len(edges)))
    return StructuringGraph(9, tuple(edges), every, every, name="grid3")


def _builtins():
    tri = ((0, 1), (1, 2), (0, 2))
    return {
        "single": StructuringGraph(2, ((0, 1),), {0}, {0}, name="single"),
        # root pinned to an axis edge: buds reach the two pixels completing a unit-square triangle
        "triangle_odd": StructuringGraph(
            3, tri, {0}, {1, 2}, (AXIS, None, None), name="triangle_odd"
        ),
        "triangle_even": StructuringGraph(
            3, tri, {0}, {1, 2}, (DIAGONAL, None, None), name="triangle_even"
        ),
        "square": StructuringGraph(
            4, ((0, 1), (1, 2), (2, 3), (0, 3)), {0}, {2}, name="square"
        ),
        "grid3": _grid3(),
    }


BUILTINS = _builtins()
BUILTIN_NAMES = tuple(BUILTINS)


def _normalize(name: str) -> str:
    return name.strip().lower().replace("-", "").replace("_", "")


def builtin(name: str) -> StructuringGraph:
    """Return the builtin structuring graph ``name``.

    Names: ``single``, ``triangle_odd``, ``triangle_even``, ``square``, ``grid3``
    (case, ``-`` and ``_`` are ignored, so ``TriangleOdd`` works too).
    """
    key = _normalize(name)
    for k, sg in BUILTINS.items():
        if _normalize(k) == key:
            return sg
    raise KeyError(f"unknown builtin structuring graph {name!r}; choose from {BUILTIN_NAMES}")
