"""Bounded search for move sequences.

Three calculi share one engine:

* ``conj``   -- out/in-splits and out/in-amalgamations of edge graphs
  (strong shift equivalence, i.e. conjugacy of edge shifts);
* ``floweq`` -- the same plus expand/contract (flow equivalence);
* ``germ``   -- slide, split and unsplit moves of templates.

The engine is a level-synchronous bidirectional breadth-first search that
deduplicates states by canonical form and always grows the smaller
frontier.  When the two searches meet, the witness is stitched together
from the forward path, an explicit isomorphism (a ``relabel`` step), and the
inverted backward path, so that replaying the trace from the source lands
exactly on the target -- names, order and all.

Refutations come only from invariants (periodic-point counts,
Parry-Sullivan number, Bowen-Franks group), never from an exhausted search.
"""
from __future__ import annotations

import itertools
import json
import time
from dataclasses import dataclass, field
from typing import Callable, Iterator

from . import canon
from .errors import FormatError, SurgeryError
from .invariants import bowen_franks, flow_equivalence_certificate, parry_sullivan
from .shift import (
    AdjacencyMatrix,
    EdgeGraph,
    amalgamation_parts,
    amalgamate,
    contract,
    expand,
    in_split,
    out_split,
    periodic_point_counts,
)
from .template import (
    Template,
    crush_to_edge_graph,
    slide_move,
    slide_sites,
    split_move,
    split_sites,
    unsplit_move,
    unsplit_sites,
    check,
)

__all__ = [
    "SearchBudget",
    "MoveStep",
    "MoveTrace",
    "SearchResult",
    "apply_step",
    "graph_moves",
    "template_moves",
    "conjugacy_search",
    "flow_equiv_search",
    "germ_equiv_search",
    "verify_certificate",
]

EQUIVALENT = "EQUIVALENT"
DISTINGUISHED = "DISTINGUISHED"
UNKNOWN = "UNKNOWN"


@dataclass(frozen=True)
class SearchBudget:
    max_depth: int = 4
    max_states: int = 50_000
    time_limit: float = 60.0

    def __post_init__(self):
        if self.max_depth < 1 or self.max_states < 1 or not self.time_limit > 0:
            raise ValueError("search budget values must all be positive")


@dataclass(frozen=True)
class MoveStep:
    kind: str
    site: dict = field(hash=False)

    def to_json(self) -> dict:
        return {"kind": self.kind, "site": self.site}

    @classmethod
    def from_json(cls, d) -> "MoveStep":
        try:
            return cls(str(d["kind"]), dict(d["site"]))
        except (KeyError, TypeError, ValueError) as exc:
            raise FormatError(f"bad move step: {exc}") from None


# ---------------------------------------------------------------------------
# applying single steps

def _parts(site):
    return tuple(tuple(b) for b in site["parts"])


def _relabel_graph(g: EdgeGraph, site) -> EdgeGraph:
    mapping = {str(k): str(v) for k, v in site["map"].items()}
    order = [str(v) for v in site["order"]]
    if sorted(mapping) != sorted(g.vertices) or sorted(mapping.values()) != sorted(order) \
            or len(set(order)) != len(order):
        raise SurgeryError("relabel map is not a bijection onto the given order")
    inv = {v: k for k, v in mapping.items()}
    rows = tuple(tuple(int(g.has_edge(inv[a], inv[b])) for b in order) for a in order)
    return EdgeGraph(tuple(order), rows)


def _relabel_template(t: Template, site) -> Template:
    bmap = {str(k): str(v) for k, v in site["branch_map"].items()}
    smap = {str(k): str(v) for k, v in site["strip_map"].items()}
    border = [str(x) for x in site["branch_order"]]
    sorder = [str(x) for x in site["strip_order"]]
    twists = {str(k): int(v) for k, v in site["twists"].items()}
    if sorted(bmap) != sorted(t.branch_ids) or sorted(bmap.values()) != sorted(border):
        raise SurgeryError("relabel branch map is not a bijection")
    if sorted(smap) != sorted(t.strip_ids) or sorted(smap.values()) != sorted(sorder):
        raise SurgeryError("relabel strip map is not a bijection")
    binv = {v: k for k, v in bmap.items()}
    ins = {q: [smap[s] for s in t.ins(binv[q])] for q in border}
    outs = {q: [smap[s] for s in t.outs(binv[q])] for q in border}
    for s in t.strips:
        new = smap[s.id]
        if new not in twists or (twists[new] - s.twists) % 2:
            raise SurgeryError("relabel may only change twists by full twists")
    return Template.from_lists(border, ins, outs, sorder, twists)


def apply_step(state, step: MoveStep):
    """Apply one trace step to an :class:`EdgeGraph` or :class:`Template`."""
    k, s = step.kind, step.site
    try:
        if isinstance(state, Template):
            if k == "slide":
                return slide_move(state, s["branch_line"])
            if k == "split":
                return split_move(state, s["branch_line"], int(s["gap"]))
            if k == "unsplit":
                left, right = s["branch_lines"]
                return unsplit_move(state, left, right)
            if k == "relabel":
                return _relabel_template(state, s)
        else:
            if k == "out_split":
                return out_split(state, s["vertex"], _parts(s))
            if k == "in_split":
                return in_split(state, s["vertex"], _parts(s))
            if k in ("amalgamate_out", "amalgamate_in"):
                v1, v2 = s["vertices"]
                return amalgamate(state, v1, v2, k.rsplit("_", 1)[1])
            if k == "expand":
                return expand(state, tuple(s["edge"]))
            if k == "contract":
                return contract(state, s["vertex"])
            if k == "relabel":
                return _relabel_graph(state, s)
    except (KeyError, TypeError, ValueError) as exc:
        if isinstance(exc, SurgeryError):
            raise
        raise FormatError(f"malformed site for {k!r}: {exc}") from None
    raise FormatError(f"unknown move kind {k!r}")


# ---------------------------------------------------------------------------
# traces


@dataclass(frozen=True)
class MoveTrace:
    calculus: str
    steps: tuple[MoveStep, ...] = ()

    def replay(self, source):
        state = source
        for step in self.steps:
            state = apply_step(state, step)
        return state

    def __len__(self):
        return len(self.steps)

    @property
    def move_count(self) -> int:
        """Number of genuine moves (relabelings excluded)."""
        return sum(1 for s in self.steps if s.kind != "relabel")

    def to_json(self, source=None, target=None) -> dict:
        out = {"calculus": self.calculus, "steps": [s.to_json() for s in self.steps]}
        if source is not None:
            out["source"] = _serialize(source)
        if target is not None:
            out["target"] = _serialize(target)
        return out

    @classmethod
    def from_json(cls, d) -> "MoveTrace":
        if isinstance(d, str):
            d = json.loads(d)
        try:
            return cls(str(d["calculus"]), tuple(MoveStep.from_json(s) for s in d["steps"]))
        except (KeyError, TypeError) as exc:
            raise FormatError(f"bad trace: {exc}") from None


def _serialize(x) -> str:
    if isinstance(x, Template):
        return x.format()
    return AdjacencyMatrix(x.transition).format()


@dataclass(frozen=True)
class SearchResult:
    verdict: str
    trace: MoveTrace | None = None
    certificate: dict | None = None
    reason: str = ""
    states: int = 0

    def to_json(self, source=None, target=None) -> dict:
        out: dict = {"verdict": self.verdict}
        if self.trace is not None:
            out["trace"] = self.trace.to_json(source, target)
        if self.certificate is not None:
            out["certificate"] = self.certificate
        if self.reason:
            out["reason"] = self.reason
        out["states"] = self.states
        return out


# ---------------------------------------------------------------------------
# neighbourhoods


def _two_block_partitions(items):
    """Unordered 2-block partitions; the first block holds ``items[0]``."""
    items = list(items)
    first, rest = items[0], items[1:]
    for mask in range(1, 2 ** len(rest)):  # mask 0 would leave block 2 empty
        a = [first] + [x for i, x in enumerate(rest) if not mask >> i & 1]
        b = [x for i, x in enumerate(rest) if mask >> i & 1]
        yield a, b


def graph_moves(g: EdgeGraph, flow: bool = False) -> Iterator[tuple[MoveStep, EdgeGraph]]:
    for v in g.vertices:
        succ = g.successors(v)
        if len(succ) >= 2:
            for a, b in _two_block_partitions(succ):
                yield MoveStep("out_split", {"vertex": v, "parts": [a, b]}), out_split(g, v, (a, b))
        pred = g.predecessors(v)
        if len(pred) >= 2:
            for a, b in _two_block_partitions(pred):
                yield MoveStep("in_split", {"vertex": v, "parts": [a, b]}), in_split(g, v, (a, b))
    for v1, v2 in itertools.combinations(g.vertices, 2):
        for d in ("out", "in"):
            try:
                amalgamation_parts(g, v1, v2, d)
            except SurgeryError:
                continue
            yield MoveStep(f"amalgamate_{d}", {"vertices": [v1, v2]}), amalgamate(g, v1, v2, d)
    if flow:
        for u, w in g.edges():
            yield MoveStep("expand", {"edge": [u, w]}), expand(g, (u, w))
        for z in g.vertices:
            try:
                h = contract(g, z)
            except SurgeryError:
                continue
            yield MoveStep("contract", {"vertex": z}), h


def template_moves(t: Template) -> Iterator[tuple[MoveStep, Template]]:
    for q in slide_sites(t):
        yield MoveStep("slide", {"branch_line": q}), slide_move(t, q)
    for q, j in split_sites(t):
        yield MoveStep("split", {"branch_line": q, "gap": j}), split_move(t, q, j)
    for a, b in unsplit_sites(t):
        yield MoveStep("unsplit", {"branch_lines": [a, b]}), unsplit_move(t, a, b)


# ---------------------------------------------------------------------------
# per-calculus plumbing


@dataclass(frozen=True)
class _Calculus:
    name: str
    neighbours: Callable
    key: Callable
    relabel: Callable  # (a, b) -> MoveStep | None carrying a exactly onto b
    same: Callable  # exact equality


def _graph_key(g: EdgeGraph):
    cf = canon.canonical_form(g)
    return (cf.n, cf.key)


def _graph_relabel(a: EdgeGraph, b: EdgeGraph):
    if a == b:
        return None
    m = canon.isomorphism(a, b)
    if m is None:  # pragma: no cover - only called on equal keys
        raise AssertionError("relabel requested between non-isomorphic graphs")
    return MoveStep("relabel", {"map": m, "order": list(b.vertices)})


def _template_relabel(a: Template, b: Template):
    if a == b:
        return None
    iso = canon.template_isomorphism(a, b)
    if iso is None:  # pragma: no cover
        raise AssertionError("relabel requested between non-isomorphic templates")
    bmap, smap = iso
    return MoveStep("relabel", {
        "branch_map": bmap,
        "strip_map": smap,
        "branch_order": list(b.branch_ids),
        "strip_order": list(b.strip_ids),
        "twists": {s.id: s.twists for s in b.strips},
    })


_CONJ = _Calculus("conj", lambda g: graph_moves(g, False), _graph_key, _graph_relabel,
                  lambda a, b: a == b)
_FLOW = _Calculus("floweq", lambda g: graph_moves(g, True), _graph_key, _graph_relabel,
                  lambda a, b: a == b)
_GERM = _Calculus("germ", template_moves, canon.template_key, _template_relabel,
                  lambda a, b: a == b)


def _invert(calc: _Calculus, before, after) -> list[MoveStep]:
    """Steps carrying ``after`` exactly back to ``before`` (one move plus an
    optional relabel).  Every move set here is closed under inverses."""
    want = calc.key(before)
    for step, nxt in calc.neighbours(after):
        if calc.key(nxt) == want:
            out = [step]
            r = calc.relabel(nxt, before)
            if r is not None:
                out.append(r)
            return out
    raise AssertionError("move set is not closed under inverses")  # pragma: no cover


class _Side:
    def __init__(self, calc, root):
        k = calc.key(root)
        self.nodes = {k: (root, None, None, 0)}  # key -> (state, parent key, step, depth)
        self.frontier = [k]
        self.depth = 0

    def path(self, k):
        """States and steps from the root to ``k``."""
        steps, states = [], []
        while True:
            state, parent, step, _ = self.nodes[k]
            states.append(state)
            if parent is None:
                break
            steps.append(step)
            k = parent
        return states[::-1], steps[::-1]


def _bfs(calc: _Calculus, src, dst, budget: SearchBudget) -> SearchResult:
    t0 = time.monotonic()
    fwd, bwd = _Side(calc, src), _Side(calc, dst)
    ksrc, kdst = next(iter(fwd.nodes)), next(iter(bwd.nodes))
    if ksrc == kdst:
        r = calc.relabel(src, dst)
        return SearchResult(EQUIVALENT, MoveTrace(calc.name, (r,) if r else ()), states=2)

    def total():
        return len(fwd.nodes) + len(bwd.nodes)

    while fwd.depth + bwd.depth < budget.max_depth:
        if not fwd.frontier and not bwd.frontier:
            return SearchResult(UNKNOWN, reason="both search frontiers exhausted",
                                states=total())
        grow, other = (fwd, bwd) if len(fwd.frontier) <= len(bwd.frontier) and fwd.frontier \
            else (bwd, fwd)
        if not grow.frontier:
            grow, other = other, grow
        nxt = []
        meets = []
        for k in grow.frontier:
            state = grow.nodes[k][0]
            for step, child in calc.neighbours(state):
                ck = calc.key(child)
                if ck in grow.nodes:
                    continue
                grow.nodes[ck] = (child, k, step, grow.depth + 1)
                nxt.append(ck)
                if ck in other.nodes:
                    meets.append(ck)
                if total() > budget.max_states:
                    return SearchResult(UNKNOWN, reason=f"state cap {budget.max_states} exceeded",
                                        states=total())
                if time.monotonic() - t0 > budget.time_limit:
                    return SearchResult(UNKNOWN, reason=f"time limit {budget.time_limit}s exceeded",
                                        states=total())
        grow.frontier = nxt
        grow.depth += 1
        if meets:
            meet = min(meets, key=lambda mk: (grow.nodes[mk][3] + other.nodes[mk][3], mk))
            return SearchResult(EQUIVALENT, _stitch(calc, fwd, bwd, meet), states=total())
    return SearchResult(UNKNOWN, reason=f"no connection within depth {budget.max_depth}",
                        states=total())


def _stitch(calc, fwd: _Side, bwd: _Side, meet) -> MoveTrace:
    fstates, fsteps = fwd.path(meet)
    bstates, bsteps = bwd.path(meet)
    steps = list(fsteps)
    r = calc.relabel(fstates[-1], bstates[-1])
    if r is not None:
        steps.append(r)
    # walk the backward path from the meeting point to the target
    for i in range(len(bstates) - 1, 0, -1):
        steps += _invert(calc, bstates[i - 1], bstates[i])
    return MoveTrace(calc.name, tuple(steps))


# ---------------------------------------------------------------------------
# certificates


def _periodic_certificate(a: EdgeGraph, b: EdgeGraph, kmax: int):
    ca, cb = periodic_point_counts(a, kmax), periodic_point_counts(b, kmax)
    for k, (x, y) in enumerate(zip(ca, cb), 1):
        if x != y:
            return {"invariant": "periodic_points", "k": k, "values": [x, y]}
    return None


def _flow_certificate(a: EdgeGraph, b: EdgeGraph):
    v = flow_equivalence_certificate(a, b)
    if not v.distinguished:
        return None
    if v.ps[0] != v.ps[1]:
        return {"invariant": "parry_sullivan", "values": list(v.ps)}
    return {"invariant": "bowen_franks", "values": [str(g) for g in v.bf]}


def verify_certificate(cert: dict, a, b) -> bool:
    """Recompute the invariant named in ``cert`` on ``a`` and ``b``."""
    if isinstance(a, Template):
        a, b = crush_to_edge_graph(a), crush_to_edge_graph(b)
    inv = cert["invariant"]
    if inv == "periodic_points":
        k = cert["k"]
        vals = [periodic_point_counts(a, k)[-1], periodic_point_counts(b, k)[-1]]
    elif inv == "parry_sullivan":
        vals = [parry_sullivan(a), parry_sullivan(b)]
    elif inv == "bowen_franks":
        vals = [str(bowen_franks(a)), str(bowen_franks(b))]
    else:
        return False
    return vals == list(cert["values"]) and vals[0] != vals[1]


# ---------------------------------------------------------------------------
# entry points


def _check_trace(calc, res: SearchResult, src, dst) -> SearchResult:
    # a trace that does not replay exactly is a bug, never a verdict
    if res.trace is not None:
        end = res.trace.replay(src)
        if not calc.same(end, dst):  # pragma: no cover
            raise AssertionError("search produced a trace that does not replay to the target")
    return res


def conjugacy_search(g: EdgeGraph, f: EdgeGraph, budget: SearchBudget | None = None) -> SearchResult:
    """Search for splits/amalgamations carrying ``g`` to ``f``."""
    budget = budget or SearchBudget()
    cert = _periodic_certificate(g, f, budget.max_depth + 4)
    if cert:
        return SearchResult(DISTINGUISHED, certificate=cert)
    return _check_trace(_CONJ, _bfs(_CONJ, g, f, budget), g, f)


def flow_equiv_search(g: EdgeGraph, f: EdgeGraph, budget: SearchBudget | None = None) -> SearchResult:
    """As :func:`conjugacy_search`, with expand/contract allowed."""
    budget = budget or SearchBudget()
    cert = _flow_certificate(g, f)
    if cert:
        return SearchResult(DISTINGUISHED, certificate=cert)
    return _check_trace(_FLOW, _bfs(_FLOW, g, f, budget), g, f)


def germ_equiv_search(t1: Template, t2: Template, budget: SearchBudget | None = None) -> SearchResult:
    """Search for slide/split/unsplit moves carrying ``t1`` to ``t2``.

    Template moves induce conjugacies of the crushed edge shifts, so
    flow-equivalence invariants and periodic-point counts of the crushed
    graphs refute equality of germs.
    """
    budget = budget or SearchBudget()
    check(t1)
    check(t2)
    g1, g2 = crush_to_edge_graph(t1), crush_to_edge_graph(t2)
    cert = _flow_certificate(g1, g2) or _periodic_certificate(g1, g2, budget.max_depth + 4)
    if cert:
        return SearchResult(DISTINGUISHED, certificate=cert)
    return _check_trace(_GERM, _bfs(_GERM, t1, t2, budget), t1, t2)
