"""Seeded property checks runnable from the command line (``tplkit selftest``)."""
from __future__ import annotations

import random
from dataclasses import dataclass

from .canon import is_isomorphic
from .filtrating import euler_feasible, r_expressions
from .generators import random_edge_graph, random_graph_walk, random_ledger, random_template
from .invariants import bowen_franks, parry_sullivan
from .shift import amalgamate, contract, expand, periodic_point_counts
from .template import genus, slide_move, slide_sites
from .thicken import thicken


@dataclass(frozen=True)
class Check:
    name: str
    passed: bool
    cases: int
    detail: str = ""

    def to_json(self):
        return {"name": self.name, "passed": self.passed, "cases": self.cases,
                "detail": self.detail}

    def __str__(self):
        tail = f" ({self.detail})" if self.detail else ""
        return f"{'PASS' if self.passed else 'FAIL'} {self.name} [{self.cases} cases]{tail}"


def _flow_invariants(rng, n):
    for _ in range(n):
        g = random_edge_graph(rng)
        h, steps = random_graph_walk(rng, g, 1, flow=True)
        if (parry_sullivan(g), bowen_franks(g)) != (parry_sullivan(h), bowen_franks(h)):
            return f"{steps[0].kind} changed PS/BF on {g.transition}"
    return ""


def _conjugacy_counts(rng, n):
    for _ in range(n):
        g = random_edge_graph(rng)
        h, steps = random_graph_walk(rng, g, 1, flow=False)
        if periodic_point_counts(g, 8) != periodic_point_counts(h, 8):
            return f"{steps[0].kind} changed periodic counts on {g.transition}"
    return ""


def _round_trips(rng, n):
    for _ in range(n):
        g = random_edge_graph(rng)
        h, steps = random_graph_walk(rng, g, 1, kinds=("out_split", "in_split"))
        if steps:
            st = steps[0]
            d = "out" if st.kind == "out_split" else "in"
            a = [v for v in h.vertices if v not in g.vertices]
            if not is_isomorphic(amalgamate(h, a[0], a[1], d), g):
                return f"split/amalgamate round trip failed on {g.transition}"
        u, w = rng.choice(g.edges())
        e = expand(g, (u, w))
        if contract(e, e.vertices[-1]) != g:
            return f"expand/contract round trip failed on {g.transition}"
    return ""


def _euler(rng, n):
    for _ in range(n):
        t = random_template(rng)
        b = thicken(t)
        if not b.euler_entrance == b.euler_exit == 1 - genus(t):
            return f"Euler balance fails on\n{t.format()}"
        for q in slide_sites(t):
            if len(thicken(slide_move(t, q)).dividing_curves) != len(b.dividing_curves):
                return f"slide at {q} changed the curve count"
    return ""


def _accounting(rng, n):
    for _ in range(n):
        l = random_ledger(rng)
        ra, rb = r_expressions(l)
        if (ra == rb) != euler_feasible(l):
            return f"r-expressions vs Euler balance disagree on {l}"
    return ""


CHECKS = [
    ("flow-equivalence invariants under random moves", _flow_invariants),
    ("periodic counts under splits/amalgamations", _conjugacy_counts),
    ("surgery round trips", _round_trips),
    ("thickened-boundary Euler balance and slide invariance", _euler),
    ("accounting identity", _accounting),
]


def run(seed: int = 0, count: int = 50) -> list[Check]:
    out = []
    for i, (name, fn) in enumerate(CHECKS):
        rng = random.Random(f"{seed}:{i}")
        detail = fn(rng, count)
        out.append(Check(name, not detail, count, detail))
    return out
