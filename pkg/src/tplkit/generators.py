"""Seeded random instances for property tests and ``tplkit selftest``.

Every generator takes an explicit :class:`random.Random`, so one seed fixes a
whole run.
"""
from __future__ import annotations

import random

from .filtrating import BoundaryLedger
from .search import MoveStep, apply_step, graph_moves, template_moves
from .shift import EdgeGraph, is_irreducible
from .template import Template, from_slot_lists, validate

__all__ = [
    "random_edge_graph",
    "random_graph_walk",
    "random_template",
    "random_template_walk",
    "random_ledger",
]


def random_edge_graph(rng: random.Random, n_max: int = 4, density: float = 0.5,
                      irreducible: bool = True) -> EdgeGraph:
    """Random 0/1 transition matrix on ``1..n`` vertices (``n <= n_max``)."""
    while True:
        n = rng.randint(1, n_max)
        rows = [[int(rng.random() < density) for _ in range(n)] for _ in range(n)]
        g = EdgeGraph.from_matrix(rows)
        if not any(map(any, rows)):
            continue
        if irreducible and not is_irreducible(g):
            continue
        return g


def random_graph_walk(rng: random.Random, g: EdgeGraph, steps: int, flow: bool = False,
                      kinds=None, max_vertices: int = 8):
    """Apply ``steps`` random moves; returns the final graph and the steps."""
    trail: list[MoveStep] = []
    for _ in range(steps):
        opts = [
            (st, h) for st, h in graph_moves(g, flow)
            if (kinds is None or st.kind in kinds) and h.n <= max_vertices
        ]
        if not opts:
            break
        st, g = rng.choice(opts)
        trail.append(st)
    return g, trail


def random_template(rng: random.Random, max_branch_lines: int = 3, max_slots: int = 3,
                    max_twists: int = 2) -> Template:
    """Random valid (connected) template in branch-line normal form."""
    while True:
        nb = rng.randint(1, max_branch_lines)
        ids = [f"q{i}" for i in range(nb)]
        n_out = {q: rng.randint(1, max_slots) for q in ids}
        total = sum(n_out.values())
        if total < nb:
            continue
        # distribute incoming slots: at least one each
        n_in = {q: 1 for q in ids}
        for _ in range(total - nb):
            n_in[rng.choice(ids)] += 1
        if max(n_in.values()) > max_slots + 1:
            continue
        names = [f"s{i}" for i in range(total)]
        in_slots = [(q, k) for q in ids for k in range(n_in[q])]
        rng.shuffle(in_slots)
        outs, ins = {q: [] for q in ids}, {q: [None] * n_in[q] for q in ids}
        it = iter(names)
        slot = iter(in_slots)
        for q in ids:
            for _ in range(n_out[q]):
                s = next(it)
                outs[q].append(s)
                dq, k = next(slot)
                ins[dq][k] = s
        twists = {s: rng.randint(-max_twists, max_twists) for s in names}
        t = from_slot_lists([(q, ins[q], outs[q]) for q in ids], twists)
        if not validate(t):
            return t


def random_template_walk(rng: random.Random, t: Template, steps: int,
                         max_branch_lines: int = 5):
    trail: list[MoveStep] = []
    for _ in range(steps):
        opts = [(st, u) for st, u in template_moves(t) if len(u.branch_lines) <= max_branch_lines]
        if not opts:
            break
        st, t = rng.choice(opts)
        trail.append(st)
    return t, trail


def random_ledger(rng: random.Random, max_components: int = 4, max_genus: int = 4,
                  balanced_bias: float = 0.5) -> BoundaryLedger:
    """Random entrance/exit genus lists; about half are Euler-balanced."""
    ent = [rng.randint(0, max_genus) for _ in range(rng.randint(1, max_components))]
    ext = [rng.randint(0, max_genus) for _ in range(rng.randint(1, max_components))]
    if rng.random() < balanced_bias:
        # adjust the exit side towards balance: chi(+) = chi(-)
        target = sum(2 - 2 * g for g in ent)
        for _ in range(64):
            diff = sum(2 - 2 * g for g in ext) - target
            if diff == 0:
                break
            if diff > 0:  # too much chi on the exit side: raise a genus
                ext[rng.randrange(len(ext))] += 1
            else:
                lows = [i for i, g in enumerate(ext) if g > 0]
                if lows:
                    ext[rng.choice(lows)] -= 1
                else:
                    ext.append(0)
    return BoundaryLedger(tuple(ent), tuple(ext))


def replay(state, steps):
    for st in steps:
        state = apply_step(state, st)
    return state

