"""Boundary of the thickened template.

Thickening a template gives a handlebody.  Its boundary splits into the
entrance surface ``X`` (flow points inward: the front and back faces of the
strips) and the exit surface ``Y`` (flow points outward: the side walls),
meeting along the dividing curves ``C``.

Model.  A strip cross-section is a rectangle with four corners ``(u, f)``,
``u`` in {L, R} (side, i.e. exit wall) and ``f`` in {F, B} (face, i.e.
entrance side).  Each corner sweeps a segment along the strip; an odd number
of half twists carries ``(u, f)`` to ``(-u, -f)`` at the far end.  Inside a
branch line the segments are joined up:

* the front corners of the front sheet and the back corners of the back
  sheet run into the outer corners of the outermost outgoing strips;
* a back corner of sheet ``k`` meets the front corner of sheet ``k+1`` on the
  same side (a cusp fold of the entrance surface);
* the right corners of outgoing strip ``j`` meet the left corners of strip
  ``j+1`` (the exit surface turns around at a gap).

The closed chains of segments are the dividing curves.  Components of ``X``
and ``Y`` come from their deformation-retract graphs (faces and walls joined
at branch lines), and each component's genus from
``chi = 2 - 2*genus - punctures``.
"""
from __future__ import annotations

from dataclasses import dataclass

from .errors import TemplateError
from .template import Template, check, genus as template_genus

__all__ = ["DividingCurve", "SurfaceComponent", "ThickenedBoundary", "thicken"]

SIDES = ("L", "R")
FACES = ("F", "B")
_FLIP = {"L": "R", "R": "L", "F": "B", "B": "F"}


@dataclass(frozen=True)
class DividingCurve:
    id: str
    segments: tuple[tuple[str, str, str], ...]  # (strip, side, face) in traversal order
    entrance: int  # index of the X component it bounds
    exit: int  # index of the Y component it bounds

    def to_json(self) -> dict:
        return {
            "id": self.id,
            "segments": [list(s) for s in self.segments],
            "entrance_component": self.entrance,
            "exit_component": self.exit,
        }


@dataclass(frozen=True)
class SurfaceComponent:
    genus: int
    euler: int
    curves: tuple[str, ...]

    @property
    def punctures(self) -> int:
        return len(self.curves)

    def to_json(self) -> dict:
        return {
            "genus": self.genus,
            "punctures": self.punctures,
            "euler": self.euler,
            "curves": list(self.curves),
        }


@dataclass(frozen=True)
class ThickenedBoundary:
    handlebody_genus: int
    entrance: tuple[SurfaceComponent, ...]
    exit: tuple[SurfaceComponent, ...]
    dividing_curves: tuple[DividingCurve, ...]
    degenerate: bool = False

    @property
    def curve_ids(self) -> tuple[str, ...]:
        return tuple(c.id for c in self.dividing_curves)

    @property
    def euler_entrance(self) -> int:
        return sum(c.euler for c in self.entrance)

    @property
    def euler_exit(self) -> int:
        return sum(c.euler for c in self.exit)

    def curve(self, cid: str) -> DividingCurve:
        for c in self.dividing_curves:
            if c.id == cid:
                return c
        raise KeyError(cid)

    def to_json(self) -> dict:
        return {
            "handlebody_genus": self.handlebody_genus,
            "degenerate": self.degenerate,
            "dividing_curves": len(self.dividing_curves),
            "curves": [c.to_json() for c in self.dividing_curves],
            "entrance": [c.to_json() for c in self.entrance],
            "exit": [c.to_json() for c in self.exit],
            "euler_entrance": self.euler_entrance,
            "euler_exit": self.euler_exit,
        }

    def summary(self) -> str:
        def surf(cs):
            return ", ".join(
                f"genus {c.genus} with {c.punctures} boundary curve(s) [{' '.join(c.curves)}]"
                for c in cs
            )

        lines = [
            f"handlebody genus: {self.handlebody_genus}",
            f"dividing curves: {len(self.dividing_curves)} ({' '.join(self.curve_ids)})",
            f"entrance X: {surf(self.entrance)}; chi = {self.euler_entrance}",
            f"exit Y: {surf(self.exit)}; chi = {self.euler_exit}",
        ]
        if self.degenerate:
            lines.append("degenerate template (no branching)")
        return "\n".join(lines)


class _DSU:
    def __init__(self):
        self.parent: dict = {}

    def add(self, x):
        self.parent.setdefault(x, x)

    def find(self, x):
        p = self.parent
        while p[x] != x:
            p[x] = p[p[x]]
            x = p[x]
        return x

    def union(self, x, y):
        rx, ry = self.find(x), self.find(y)
        if rx != ry:
            self.parent[ry] = rx


def _finish(s, u, f):
    return (_FLIP[u], _FLIP[f]) if s.twists % 2 else (u, f)


def _corner_pairs(t: Template):
    """Identifications of segment endpoints inside each branch line."""
    pairs = []
    for b in t.branch_lines:
        q, i, o = b.id, b.n_in, b.n_out
        outer = {"L": 0, "R": o - 1}
        for u in SIDES:
            pairs.append((("in", q, 0, u, "F"), ("out", q, outer[u], u, "F")))
            pairs.append((("in", q, i - 1, u, "B"), ("out", q, outer[u], u, "B")))
            for k in range(i - 1):
                pairs.append((("in", q, k, u, "B"), ("in", q, k + 1, u, "F")))
        for f in FACES:
            for j in range(o - 1):
                pairs.append((("out", q, j, "R", f), ("out", q, j + 1, "L", f)))
    return pairs


def _retract_components(t: Template):
    """Union-find over the face graph (X) and wall graph (Y)."""
    gx, gy = _DSU(), _DSU()
    ex: list[tuple] = []  # (kind, endpoint, endpoint)
    ey: list[tuple] = []
    for b in t.branch_lines:
        q, i, o = b.id, b.n_in, b.n_out
        for v in [("jF", q), ("jB", q), ("sF", q), ("sB", q)] + [("cusp", q, k) for k in range(i - 1)]:
            gx.add(v)
        for v in [("JL", q), ("JR", q), ("SL", q), ("SR", q)] + [("gap", q, j) for j in range(o - 1)]:
            gy.add(v)
        ex += [(("merged", q, "F"), ("jF", q), ("sF", q)), (("merged", q, "B"), ("jB", q), ("sB", q))]
        ey += [(("merged", q, "L"), ("JL", q), ("SL", q)), (("merged", q, "R"), ("JR", q), ("SR", q))]
    n_in = {b.id: b.n_in for b in t.branch_lines}
    n_out = {b.id: b.n_out for b in t.branch_lines}
    for s in t.strips:
        for f in FACES:
            start = ("s" + f, s.src)
            f2 = _finish(s, "L", f)[1]
            k = s.in_index
            if f2 == "F":
                end = ("jF", s.dst) if k == 0 else ("cusp", s.dst, k - 1)
            else:
                end = ("jB", s.dst) if k == n_in[s.dst] - 1 else ("cusp", s.dst, k)
            ex.append(((s.id, f), start, end))
        for u in SIDES:
            j = s.out_index
            if u == "L":
                start = ("SL", s.src) if j == 0 else ("gap", s.src, j - 1)
            else:
                start = ("SR", s.src) if j == n_out[s.src] - 1 else ("gap", s.src, j)
            u2 = _finish(s, u, "F")[0]
            ey.append(((s.id, u), start, ("J" + u2, s.dst)))
    for g, edges in ((gx, ex), (gy, ey)):
        for _, a, b in edges:
            g.union(a, b)
    return gx, ex, gy, ey


def thicken(t: Template) -> ThickenedBoundary:
    """Entrance/exit surfaces and dividing curves of the thickened template."""
    check(t)
    strips = {s.id: s for s in t.strips}
    # segment endpoints
    end_of: dict[tuple, tuple] = {}
    for s in t.strips:
        for u in SIDES:
            for f in FACES:
                seg = (s.id, u, f)
                u2, f2 = _finish(s, u, f)
                end_of[("out", s.src, s.out_index, u, f)] = seg
                end_of[("in", s.dst, s.in_index, u2, f2)] = seg
    partner: dict[tuple, tuple] = {}
    for a, b in _corner_pairs(t):
        partner[a] = b
        partner[b] = a
    if set(partner) != set(end_of):  # pragma: no cover - guarded by validate()
        raise TemplateError(["corner pairing does not match strip ends"])

    order = {sid: n for n, sid in enumerate(t.strip_ids)}
    rank = {"L": 0, "R": 1, "F": 0, "B": 1}

    def seg_key(seg):
        return (order[seg[0]], rank[seg[1]], rank[seg[2]])

    def seg_ends(seg):
        s = strips[seg[0]]
        u2, f2 = _finish(s, seg[1], seg[2])
        return ("out", s.src, s.out_index, seg[1], seg[2]), ("in", s.dst, s.in_index, u2, f2)

    remaining = sorted(set(end_of.values()), key=seg_key)
    seen: set = set()
    chains: list[list[tuple]] = []
    for first in remaining:
        if first in seen:
            continue
        chain = []
        seg = first
        node = seg_ends(seg)[1]  # walk forward along the first segment
        while True:
            chain.append(seg)
            seen.add(seg)
            nxt_node = partner[node]
            seg = end_of[nxt_node]
            if seg == first:
                break
            a, b = seg_ends(seg)
            node = b if nxt_node == a else a
        chains.append(chain)

    gx, ex, gy, ey = _retract_components(t)
    x_of_face = {key: gx.find(a) for key, a, _ in ex}
    y_of_wall = {key: gy.find(a) for key, a, _ in ey}

    curve_x, curve_y = [], []
    for chain in chains:
        xs = {x_of_face[(s, f)] for s, _, f in chain}
        ys = {y_of_wall[(s, u)] for s, u, _ in chain}
        if len(xs) != 1 or len(ys) != 1:  # pragma: no cover - topological sanity
            raise TemplateError(["dividing curve touches several surface components"])
        curve_x.append(xs.pop())
        curve_y.append(ys.pop())

    ids = [f"c{n + 1}" for n in range(len(chains))]

    def components(g: _DSU, edges, curve_comp):
        roots: list = []
        for n, r in enumerate(curve_comp):
            if r not in roots:
                roots.append(r)
        for v in g.parent:
            r = g.find(v)
            if r not in roots:  # pragma: no cover - every piece meets a curve
                roots.append(r)
        index = {r: n for n, r in enumerate(roots)}
        nv = [0] * len(roots)
        ne = [0] * len(roots)
        for v in g.parent:
            nv[index[g.find(v)]] += 1
        for _, a, _b in edges:
            ne[index[g.find(a)]] += 1
        comps = []
        for r in roots:
            n = index[r]
            chi = nv[n] - ne[n]
            curves = tuple(ids[c] for c, rc in enumerate(curve_comp) if rc == r)
            twice_genus = 2 - chi - len(curves)
            if twice_genus < 0 or twice_genus % 2:  # pragma: no cover
                raise TemplateError(["inconsistent surface data: non-integral genus"])
            comps.append(SurfaceComponent(twice_genus // 2, chi, curves))
        return tuple(comps), index

    xs, xi = components(gx, ex, curve_x)
    ys, yi = components(gy, ey, curve_y)
    curves = tuple(
        DividingCurve(ids[n], tuple(chain), xi[curve_x[n]], yi[curve_y[n]])
        for n, chain in enumerate(chains)
    )
    return ThickenedBoundary(
        handlebody_genus=template_genus(t),
        entrance=xs,
        exit=ys,
        dividing_curves=curves,
        degenerate=t.degenerate,
    )
