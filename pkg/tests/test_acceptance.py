"""Acceptance gate: one pass/fail line per criterion, echoed in the summary."""
from __future__ import annotations

import random
import time
from contextlib import contextmanager

from conftest import ACCEPTANCE, DATA
from oracles import all_patterns_brute, closed_words

from tplkit.canon import is_isomorphic
from tplkit.filtrating import (
    AttachmentPattern,
    ManifoldContext,
    assemble_boundary,
    enumerate_patterns,
    euler_feasible,
    r_expressions,
    realization_accounting,
)
from tplkit.errors import InfeasibleLedger
from tplkit.generators import (
    random_edge_graph,
    random_graph_walk,
    random_ledger,
    random_template,
    random_template_walk,
)
from tplkit.invariants import bowen_franks, parry_sullivan
from tplkit.search import SearchBudget, apply_step, flow_equiv_search, germ_equiv_search
from tplkit.shift import (
    EdgeGraph,
    amalgamate,
    contract,
    expand,
    in_split,
    out_split,
    periodic_point_count,
    periodic_point_counts,
)
from tplkit.template import Template, crush_to_edge_graph, genus, lorenz
from tplkit.thicken import thicken

CONJ_KINDS = ("out_split", "in_split", "amalgamate_out", "amalgamate_in")


@contextmanager
def criterion(n: int, title: str, limit: float):
    """Time the block; record a PASS line only if it ran clean and in time."""
    box = {"detail": ""}
    t0 = time.perf_counter()
    ok = False
    try:
        yield box
        ok = True
    finally:
        dt = time.perf_counter() - t0
        in_time = dt < limit
        status = "PASS" if ok and in_time else "FAIL"
        note = box["detail"] + ("" if in_time else f"; over the {limit:g} s limit")
        ACCEPTANCE.append(f"[{status}] {n:2d}. {title}: {dt:.2f} s (< {limit:g} s){note}")
    assert in_time, f"criterion {n} took {dt:.2f} s"


def _lorenz11_labels(b):
    # the two 3-segment curves are a and b, the 2-segment curve is c
    long_ = [c.id for c in b.dividing_curves if len(c.segments) == 3]
    short = [c.id for c in b.dividing_curves if len(c.segments) == 2]
    return {"a": long_[0], "b": long_[1], "c": short[0]}


def test_01_lorenz11_dividing_curves():
    with criterion(1, "L(1,1) has 3 dividing curves", 1.0) as box:
        n = len(thicken(lorenz(1, 1)).dividing_curves)
        box["detail"] = f"; got {n}"
        assert n == 3


def test_02_euler_anchor():
    with criterion(2, "chi(X) = chi(Y) = 1 - genus", 10.0) as box:
        bundled = [Template.parse(p.read_text()) for p in sorted(DATA.glob("*.tpl"))]
        rng = random.Random(2)
        temps = bundled + [random_template(rng) for _ in range(200)]
        for t in temps:
            b = thicken(t)
            assert b.euler_entrance == b.euler_exit == 1 - genus(t), t.format()
        box["detail"] = f"; {len(bundled)} bundled + 200 random"


def test_03_three_curve_enumeration():
    with criterion(3, "3 curves, m = 0: 15 patterns incl. the 4 procedures", 1.0) as box:
        pats = enumerate_patterns("abc", ManifoldContext(0))
        brute = all_patterns_brute("abc", 0)
        assert len(pats) == 15
        labeled = {frozenset(zip(map(frozenset, p.blocks), p.genera)) for p in pats}
        assert labeled == brute
        text = {str(p) for p in pats}
        for want in ("{a,b}:0 {c}:0", "{a,c}:0 {b}:0", "{a}:1 {b}:0 {c}:0",
                     "{a}:0 {b}:0 {c}:1"):
            assert want in text, want
        box["detail"] = f"; {len(pats)} = brute force"


def test_04_flow_invariance():
    with criterion(4, "PS/BF invariant under 1000 flow moves", 30.0) as box:
        rng = random.Random(4)
        moves = 0
        kinds = {}
        while moves < 1000:
            g = random_edge_graph(rng, 4)
            ps, bf = parry_sullivan(g), bowen_franks(g)
            h, steps = random_graph_walk(rng, g, 5, flow=True, max_vertices=6)
            for st in steps:
                kinds[st.kind] = kinds.get(st.kind, 0) + 1
            # check after every single step
            x = g
            for st in steps:
                x = apply_step(x, st)
                assert x.n <= 6
                assert parry_sullivan(x) == ps and bowen_franks(x) == bf, st
            moves += len(steps)
        assert {"out_split", "in_split", "expand", "contract"} <= set(kinds)
        assert kinds.get("amalgamate_out", 0) + kinds.get("amalgamate_in", 0) > 0
        box["detail"] = f"; {moves} moves"


def test_05_conjugacy_counts():
    with criterion(5, "periodic counts k <= 8 under 1000 conjugacy moves", 30.0) as box:
        rng = random.Random(5)
        moves = 0
        while moves < 1000:
            g = random_edge_graph(rng, 4)
            want = periodic_point_counts(g, 8)
            h, steps = random_graph_walk(rng, g, 1, kinds=CONJ_KINDS, max_vertices=6)
            if steps:
                assert periodic_point_counts(h, 8) == want, steps[0]
                moves += 1
        one = EdgeGraph.from_matrix([[1]])
        two_cycle = expand(one, ("1", "1"))
        control = (periodic_point_count(one, 1), periodic_point_count(two_cycle, 1))
        assert control == (1, 0)
        box["detail"] = f"; {moves} moves; expand control p1 {control[0]} -> {control[1]}"


def test_06_round_trips():
    with criterion(6, "500 split/amalgamate and expand/contract round trips", 10.0) as box:
        rng = random.Random(6)
        done = 0
        while done < 500:
            g = random_edge_graph(rng, 5)
            if done % 2 == 0:
                v = rng.choice(g.vertices)
                d = rng.choice(("out", "in"))
                nbrs = list(g.successors(v) if d == "out" else g.predecessors(v))
                if len(nbrs) < 2:
                    continue
                rng.shuffle(nbrs)
                cut = rng.randint(1, len(nbrs) - 1)
                parts = (nbrs[:cut], nbrs[cut:])
                h = (out_split if d == "out" else in_split)(g, v, parts)
                new = [x for x in h.vertices if x not in g.vertices]
                back = amalgamate(h, new[0], new[1], d)
            else:
                u, w = rng.choice(g.edges())
                h = expand(g, (u, w))
                (z,) = [x for x in h.vertices if x not in g.vertices]
                back = contract(h, z)
            assert is_isomorphic(back, g)
            done += 1
        box["detail"] = f"; {done} cases"


def test_07_search_recovery():
    with criterion(7, "search recovers 100 flow + 100 germ pairs", 60.0) as box:
        rng = random.Random(7)
        for _ in range(100):
            g = random_edge_graph(rng, 3)
            h, _ = random_graph_walk(rng, g, rng.randint(0, 4), flow=True)
            r = flow_equiv_search(g, h, SearchBudget(4))
            assert r.verdict == "EQUIVALENT", r.reason
            assert r.trace.replay(g) == h
        for _ in range(100):
            t = random_template(rng, max_branch_lines=3)
            u, _ = random_template_walk(rng, t, rng.randint(0, 2), max_branch_lines=3)
            r = germ_equiv_search(t, u, SearchBudget(2))
            assert r.verdict == "EQUIVALENT", r.reason
            assert r.trace.replay(t) == u
        box["detail"] = "; all traces replay exactly"


def test_08_accounting_identity():
    with criterion(8, "accounting succeeds iff Euler-feasible; r agrees", 5.0) as box:
        rng = random.Random(8)
        feasible = 0
        for _ in range(1000):
            led = random_ledger(rng)
            ok = euler_feasible(led)
            try:
                acc = realization_accounting(led)
                got = True
            except InfeasibleLedger:
                got = False
            assert got == ok, led
            if ok:
                ra, rb = r_expressions(led)
                assert ra == rb == acc.r
                feasible += 1
        box["detail"] = f"; {feasible} feasible of 1000"


def test_09_lorenz_symbolics():
    with criterion(9, "crush(L(0,0)) periodic counts 2, 4, 8", 1.0) as box:
        g = crush_to_edge_graph(lorenz(0, 0))
        counts = [periodic_point_count(g, k) for k in (1, 2, 3)]
        brute = [len(closed_words(g.transition, k)) for k in (1, 2, 3)]
        assert counts == [2, 4, 8] == brute
        box["detail"] = f"; {counts}"


def test_10_example_boundaries():
    with criterion(10, "L(1,1) patterns (1), (3) give genus-1 boundaries", 1.0) as box:
        b = thicken(lorenz(1, 1))
        name = _lorenz11_labels(b)
        got = []
        for text in ("{a,b}:0 {c}:0", "{a}:1 {b}:0 {c}:0"):
            p = AttachmentPattern.parse(text)
            p = AttachmentPattern(tuple(tuple(name[x] for x in blk) for blk in p.blocks),
                                  p.genera)
            led = assemble_boundary(b, p)
            assert led.entrance == (1,) and led.exit == (1,), (text, led)
            got.append(led.format().strip().replace("\n", "; "))
        box["detail"] = "; " + " | ".join(got)
