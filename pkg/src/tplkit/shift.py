"""Subshifts of finite type as matrices and graphs, and the state-splitting
surgery calculus on edge graphs.

Vertex ids are strings.  Every operation returns a new value; nothing is
mutated.  Fresh vertex names are derived from the parent id so that a
recorded sequence of surgeries replays to exactly the same graph.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np

from . import _accel
from .errors import FormatError, SurgeryError

__all__ = [
    "AdjacencyMatrix",
    "VertexGraph",
    "EdgeGraph",
    "PeriodicWord",
    "edge_graph_of",
    "out_split",
    "in_split",
    "amalgamate",
    "expand",
    "contract",
    "periodic_point_count",
    "periodic_point_counts",
    "closed_path_count",
    "is_irreducible",
    "as_edge_graph",
]


def _rows(entries) -> tuple[tuple[int, ...], ...]:
    rows = tuple(tuple(int(x) for x in row) for row in entries)
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise FormatError("matrix must be square")
    return rows


@dataclass(frozen=True)
class AdjacencyMatrix:
    """Square nonnegative integer matrix presenting a vertex graph."""

    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(self, "entries", _rows(self.entries))
        if not self.entries:
            raise FormatError("matrix dimension must be >= 1")
        if any(x < 0 for row in self.entries for x in row):
            raise FormatError("adjacency entries must be nonnegative")

    @property
    def n(self) -> int:
        return len(self.entries)

    @cached_property
    def array(self) -> np.ndarray:
        a = np.array(self.entries, dtype=object)
        if max(max(r) for r in self.entries) < 2**31:
            a = a.astype(np.int64)
        a.setflags(write=False)
        return a

    @classmethod
    def parse(cls, text: str) -> "AdjacencyMatrix":
        """Read MAT v1: dimension on the first line, then ``n`` rows."""
        lines = [ln.split("#", 1)[0].strip() for ln in text.splitlines()]
        lines = [ln for ln in lines if ln]
        if not lines:
            raise FormatError("empty MAT file")
        try:
            n = int(lines[0])
            rows = [[int(tok) for tok in ln.split()] for ln in lines[1:]]
        except ValueError as exc:
            raise FormatError(f"MAT v1: {exc}") from None
        if n < 1:
            raise FormatError("MAT v1: dimension must be >= 1")
        if len(rows) != n or any(len(r) != n for r in rows):
            raise FormatError(f"MAT v1: expected {n} rows of {n} integers")
        return cls(tuple(map(tuple, rows)))

    def format(self) -> str:
        out = [str(self.n)]
        out += [" ".join(str(x) for x in row) for row in self.entries]
        return "\n".join(out) + "\n"

    def is_transition(self) -> bool:
        return all(x in (0, 1) for row in self.entries for x in row)

    def vertex_graph(self) -> "VertexGraph":
        return VertexGraph.from_matrix(self)


@dataclass(frozen=True)
class VertexGraph:
    """Directed multigraph: ``a_ij`` parallel edges from vertex i to j."""

    vertices: tuple[str, ...]
    edges: tuple[tuple[str, str], ...]

    @classmethod
    def from_matrix(cls, a: AdjacencyMatrix, vertices: Sequence[str] | None = None):
        if vertices is None:
            vertices = [str(i + 1) for i in range(a.n)]
        vs = tuple(vertices)
        edges = []
        for i, row in enumerate(a.entries):
            for j, mult in enumerate(row):
                edges.extend([(vs[i], vs[j])] * mult)
        return cls(vs, tuple(edges))

    def matrix(self) -> AdjacencyMatrix:
        idx = {v: i for i, v in enumerate(self.vertices)}
        rows = [[0] * len(self.vertices) for _ in self.vertices]
        for s, t in self.edges:
            rows[idx[s]][idx[t]] += 1
        return AdjacencyMatrix(tuple(map(tuple, rows)))


@dataclass(frozen=True)
class EdgeGraph:
    """Directed graph with at most one edge per ordered vertex pair.

    ``transition[i][j] == 1`` iff there is an edge ``vertices[i] -> vertices[j]``.
    """

    vertices: tuple[str, ...]
    transition: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        vs = tuple(str(v) for v in self.vertices)
        object.__setattr__(self, "vertices", vs)
        rows = _rows(self.transition)
        object.__setattr__(self, "transition", rows)
        if len(vs) != len(rows):
            raise FormatError("vertex list and transition matrix disagree in size")
        if not vs:
            raise FormatError("edge graph needs at least one vertex")
        if len(set(vs)) != len(vs):
            raise FormatError("duplicate vertex ids")
        if any(x not in (0, 1) for r in rows for x in r):
            raise FormatError("edge graph transitions must be 0/1")

    # construction -------------------------------------------------------

    @classmethod
    def from_matrix(cls, m, vertices: Sequence[str] | None = None) -> "EdgeGraph":
        if isinstance(m, AdjacencyMatrix):
            m = m.entries
        m = np.asarray(m, dtype=np.int64)
        if vertices is None:
            vertices = [str(i + 1) for i in range(m.shape[0])]
        return cls(tuple(vertices), tuple(map(tuple, m.tolist())))

    @classmethod
    def from_edges(cls, vertices: Iterable[str], edges: Iterable[tuple[str, str]]):
        vs = tuple(vertices)
        idx = {v: i for i, v in enumerate(vs)}
        rows = [[0] * len(vs) for _ in vs]
        for s, t in edges:
            rows[idx[s]][idx[t]] = 1
        return cls(vs, tuple(map(tuple, rows)))

    # views ----------------------------------------------------------------

    @cached_property
    def matrix(self) -> np.ndarray:
        a = np.array(self.transition, dtype=np.int64).reshape(len(self.vertices), -1)
        a.setflags(write=False)
        return a

    @cached_property
    def _index(self) -> dict[str, int]:
        return {v: i for i, v in enumerate(self.vertices)}

    @property
    def n(self) -> int:
        return len(self.vertices)

    def index(self, v: str) -> int:
        try:
            return self._index[v]
        except KeyError:
            raise SurgeryError(f"no vertex {v!r}") from None

    def __contains__(self, v) -> bool:
        return v in self._index

    def successors(self, v: str) -> tuple[str, ...]:
        i = self.index(v)
        return tuple(w for w, x in zip(self.vertices, self.transition[i]) if x)

    def predecessors(self, v: str) -> tuple[str, ...]:
        j = self.index(v)
        return tuple(u for u, row in zip(self.vertices, self.transition) if row[j])

    def edges(self) -> list[tuple[str, str]]:
        return [
            (u, w)
            for u, row in zip(self.vertices, self.transition)
            for w, x in zip(self.vertices, row)
            if x
        ]

    def has_edge(self, u: str, w: str) -> bool:
        return bool(self.transition[self.index(u)][self.index(w)])

    def reversed(self) -> "EdgeGraph":
        return EdgeGraph(self.vertices, tuple(zip(*self.transition)))

    def adjacency(self) -> AdjacencyMatrix:
        return AdjacencyMatrix(self.transition)

    def to_json(self) -> dict:
        return {
            "vertices": sorted(self.vertices),
            "edges": [list(e) for e in sorted(self.edges())],
        }

    def to_dot(self, name: str = "G") -> str:
        lines = [f"digraph {name} {{"]
        for v in sorted(self.vertices):
            lines.append(f'  "{v}";')
        for u, w in sorted(self.edges()):
            lines.append(f'  "{u}" -> "{w}";')
        lines.append("}")
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PeriodicWord:
    """A closed path, stored as its lexicographically least rotation."""

    symbols: tuple[str, ...]

    @property
    def period(self) -> int:
        return len(self.symbols)

    def rotations(self):
        s = self.symbols
        return [s[i:] + s[:i] for i in range(len(s))]

    def is_closed_path_in(self, g: EdgeGraph) -> bool:
        s = self.symbols
        return all(g.has_edge(s[i], s[(i + 1) % len(s)]) for i in range(len(s)))

    def __str__(self):
        if all(len(x) == 1 for x in self.symbols):
            return "".join(self.symbols)
        return " ".join(self.symbols)


def as_edge_graph(x) -> EdgeGraph:
    """Coerce a matrix-like presentation to an edge graph.

    0/1 matrices are read directly as transition matrices; matrices with a
    larger entry go through :func:`edge_graph_of` on their vertex graph.
    """
    if isinstance(x, EdgeGraph):
        return x
    if isinstance(x, VertexGraph):
        return edge_graph_of(x)
    if not isinstance(x, AdjacencyMatrix):
        x = AdjacencyMatrix(x)
    if x.is_transition():
        return EdgeGraph.from_matrix(x.entries)
    return edge_graph_of(x.vertex_graph())


# ---------------------------------------------------------------------------
# surgeries


def edge_graph_of(g: VertexGraph) -> EdgeGraph:
    """Edge graph: one vertex per edge of ``g``; ``e -> f`` iff ``e`` ends where ``f`` starts."""
    names = tuple(f"e{k + 1}" for k in range(len(g.edges)))
    if not names:
        raise SurgeryError("vertex graph has no edges")
    rows = [
        tuple(int(e[1] == f[0]) for f in g.edges)
        for e in g.edges
    ]
    return EdgeGraph(names, tuple(rows))


def _fresh(base: str, taken) -> str:
    name = base
    while name in taken:
        name += "'"
    return name


def _check_parts(avail: Sequence[str], parts, what: str):
    try:
        blocks = [tuple(sorted(set(map(str, p)))) for p in parts]
    except TypeError:
        raise SurgeryError(f"{what} partition must be a pair of collections") from None
    if len(blocks) != 2:
        raise SurgeryError(f"{what} partition must have exactly 2 blocks")
    a, b = blocks
    if not a or not b:
        raise SurgeryError(f"{what} partition blocks must be nonempty")
    if set(a) & set(b):
        raise SurgeryError(f"{what} partition blocks overlap")
    if set(a) | set(b) != set(avail) or len(a) + len(b) != len(avail):
        raise SurgeryError(f"{what} partition does not cover exactly the {what} edges")
    return set(a), set(b)


def out_split(g: EdgeGraph, v: str, parts) -> EdgeGraph:
    """Split ``v`` into ``v+'a'`` and ``v+'b'``.

    ``parts`` partitions the out-neighbours of ``v`` into two nonempty blocks;
    block 0 goes to the first copy.  Every in-edge is copied to both copies.
    A self-loop at ``v`` sits in one block as an out-edge and, as an in-edge,
    is duplicated, so its owner gets edges to both copies.
    """
    succ = g.successors(v)
    if len(succ) < 2:
        raise SurgeryError(f"out-split needs out-degree >= 2 at {v!r} (has {len(succ)})")
    A, B = _check_parts(succ, parts, "out")
    taken = set(g.vertices) - {v}
    va = _fresh(v + "a", taken)
    vb = _fresh(v + "b", taken | {va})
    i = g.index(v)
    new_vs = g.vertices[:i] + (va, vb) + g.vertices[i + 1:]

    def expand_row(row):
        # column v -> two columns
        return row[:i] + (row[i], row[i]) + row[i + 1:]

    def block_row(block):
        row = tuple(1 if w in block else 0 for w in g.vertices)
        return expand_row(row)

    rows = [expand_row(r) for r in g.transition]
    rows = rows[:i] + [block_row(A), block_row(B)] + rows[i + 1:]
    return EdgeGraph(new_vs, tuple(rows))


def in_split(g: EdgeGraph, v: str, parts) -> EdgeGraph:
    """Dual of :func:`out_split`: partition the in-edges, copy the out-edges."""
    pred = g.predecessors(v)
    if len(pred) < 2:
        raise SurgeryError(f"in-split needs in-degree >= 2 at {v!r} (has {len(pred)})")
    return out_split(g.reversed(), v, parts).reversed()


def _merge_name(v1: str, v2: str, taken) -> str:
    a, b = sorted((v1, v2))
    if len(a) > 1 and a[:-1] == b[:-1] and a[-1] == "a" and b[-1] == "b":
        base = a[:-1]
    else:
        base = f"{v1}+{v2}"
    return _fresh(base, taken)


def amalgamation_parts(g: EdgeGraph, v1: str, v2: str, direction: str = "out"):
    """The 2-block partition a merged vertex would be split by to recover ``g``.

    Returns ``(merged_name, (block1, block2))`` or raises :class:`SurgeryError`.
    """
    if direction == "in":
        return amalgamation_parts(g.reversed(), v1, v2, "out")
    if direction != "out":
        raise SurgeryError(f"direction must be 'out' or 'in', not {direction!r}")
    if v1 == v2:
        raise SurgeryError("cannot amalgamate a vertex with itself")
    i, j = g.index(v1), g.index(v2)
    col_i = [r[i] for r in g.transition]
    col_j = [r[j] for r in g.transition]
    if col_i != col_j:
        raise SurgeryError(f"{v1!r} and {v2!r} have different in-neighbour sets")
    taken = set(g.vertices) - {v1, v2}
    m = _merge_name(v1, v2, taken)

    def image(row):
        return {m if w in (v1, v2) else w for w, x in zip(g.vertices, row) if x}

    t1, t2 = image(g.transition[i]), image(g.transition[j])
    if not t1 or not t2:
        raise SurgeryError("both vertices must have out-edges")
    if t1 & t2:
        raise SurgeryError(f"out-edge sets of {v1!r} and {v2!r} are not disjoint")
    return m, (t1, t2)


def amalgamate(g: EdgeGraph, v1: str, v2: str, direction: str = "out") -> EdgeGraph:
    """Converse of a split: merge ``v1`` and ``v2`` into one vertex.

    For ``direction='out'`` the two vertices must have identical in-neighbours
    and disjoint out-neighbours (after identifying them); ``'in'`` is dual.
    The merged vertex takes the earlier of the two positions.
    """
    if direction == "in":
        return amalgamate(g.reversed(), v1, v2, "out").reversed()
    m, (t1, t2) = amalgamation_parts(g, v1, v2, direction)
    i, j = sorted((g.index(v1), g.index(v2)))
    keep = [k for k in range(g.n) if k != j]
    new_vs = tuple(m if k == i else g.vertices[k] for k in keep)
    targets = t1 | t2
    rows = []
    for k in keep:
        if k == i:
            rows.append(tuple(int(w in targets) for w in new_vs))
        else:
            r = g.transition[k]
            rows.append(tuple(r[c] for c in keep))
    return EdgeGraph(new_vs, tuple(rows))


def expand(g: EdgeGraph, edge: tuple[str, str]) -> EdgeGraph:
    """Subdivide ``u -> w`` by a fresh vertex ``z`` appended at the end."""
    u, w = map(str, edge)
    if u not in g or w not in g or not g.has_edge(u, w):
        raise SurgeryError(f"no edge {u!r} -> {w!r}")
    z = _fresh(f"{u}>{w}", set(g.vertices))
    iu, iw = g.index(u), g.index(w)
    rows = [list(r) + [0] for r in g.transition]
    rows[iu][iw] = 0
    rows[iu][-1] = 1
    last = [0] * (g.n + 1)
    last[iw] = 1
    rows.append(last)
    return EdgeGraph(g.vertices + (z,), tuple(map(tuple, rows)))


def contract(g: EdgeGraph, z: str) -> EdgeGraph:
    """Inverse of :func:`expand`: remove a pass-through vertex ``u -> z -> w``."""
    pred, succ = g.predecessors(z), g.successors(z)
    if len(pred) != 1 or len(succ) != 1:
        raise SurgeryError(f"{z!r} must have in-degree 1 and out-degree 1")
    (u,), (w,) = pred, succ
    if u == z or w == z:
        raise SurgeryError(f"{z!r} carries a self-loop")
    if g.has_edge(u, w):
        raise SurgeryError(f"contracting {z!r} would double the edge {u!r} -> {w!r}")
    k = g.index(z)
    keep = [c for c in range(g.n) if c != k]
    rows = [list(g.transition[r][c] for c in keep) for r in keep]
    vs = tuple(g.vertices[c] for c in keep)
    idx = {v: i for i, v in enumerate(vs)}
    rows[idx[u]][idx[w]] = 1
    return EdgeGraph(vs, tuple(map(tuple, rows)))


# ---------------------------------------------------------------------------
# counting


def _int_matrix(x) -> np.ndarray:
    if isinstance(x, EdgeGraph):
        return x.matrix
    if isinstance(x, VertexGraph):
        x = x.matrix()
    if isinstance(x, AdjacencyMatrix):
        return x.array
    return np.asarray(x)


def periodic_point_counts(g, kmax: int) -> list[int]:
    """``[tr(A), tr(A^2), ..., tr(A^kmax)]`` computed exactly."""
    if kmax < 1:
        raise ValueError("k must be >= 1")
    a = _int_matrix(g)
    if a.dtype != object and _accel.power_bound_ok(a, kmax):
        return [int(t) for t in _accel.power_traces(np.ascontiguousarray(a, dtype=np.int64), kmax)]
    rows = [[int(x) for x in r] for r in a.tolist()]
    n = len(rows)
    p = [[int(i == j) for j in range(n)] for i in range(n)]
    out = []
    for _ in range(kmax):
        p = [[sum(p[i][l] * rows[l][j] for l in range(n)) for j in range(n)] for i in range(n)]
        out.append(sum(p[i][i] for i in range(n)))
    return out


def periodic_point_count(g, k: int) -> int:
    """Number of points of period dividing ``k``: ``tr(A^k)``."""
    return periodic_point_counts(g, k)[-1]


def closed_path_count(g, k: int) -> int:
    """Brute-force count of closed length-``k`` paths (with multiplicity)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    a = _int_matrix(g)
    if a.dtype == object or not _accel.power_bound_ok(a, k):
        return _accel._closed_paths_np(a, k)
    return int(_accel.closed_path_count(np.ascontiguousarray(a, dtype=np.int64), k))


def is_irreducible(g) -> bool:
    """Strong connectivity of the underlying directed graph."""
    a = _int_matrix(g) != 0
    n = a.shape[0]
    reach = a | np.eye(n, dtype=bool)
    # transitive closure by repeated squaring
    while True:
        nxt = (reach.astype(np.int64) @ reach.astype(np.int64)) > 0
        if np.array_equal(nxt, reach):
            break
        reach = nxt
    return bool(reach.all())
