from __future__ import annotations

import itertools
import random

import pytest
from hypothesis import assume, given, settings, strategies as st

from oracles import all_patterns_brute, burnside_orbits
from tplkit.errors import FormatError, InfeasibleLedger, PatternError
from tplkit.filtrating import (
    AttachmentPattern,
    BoundaryLedger,
    ManifoldContext,
    PermutationGroup,
    assemble_boundary,
    bounds_ok,
    enumerate_patterns,
    euler_feasible,
    model_of_germ,
    r_expressions,
    realization_accounting,
    set_partitions,
)
from tplkit.generators import random_ledger, random_template
from tplkit.template import annulus, lorenz
from tplkit.thicken import thicken

M0 = ManifoldContext(0)


def as_set(patterns):
    return {frozenset((frozenset(b), g) for b, g in zip(p.blocks, p.genera)) for p in patterns}


@pytest.mark.parametrize(
    "g, k, m, ok",
    [(0, 3, 0, True), (0, 4, 0, False), (2, 1, 0, False), (1, 1, 0, True), (1, 2, 0, False),
     (1, 4, 1, True), (1, 5, 1, False), (2, 2, 1, True), (2, 3, 1, False)],
)
def test_bounds(g, k, m, ok):
    p = AttachmentPattern((tuple(f"c{i}" for i in range(k)),), (g,))
    chk = bounds_ok(p, ManifoldContext(m))
    assert bool(chk) is ok
    assert (chk.violation == "") is ok


def test_three_curves():
    pats = enumerate_patterns("abc", M0)
    assert len(pats) == 15
    text = {str(p) for p in pats}
    # attaching an annulus along two curves and a disk along the third,
    # or a one-holed torus along one curve and disks along the others
    for want in ["{a,b}:0 {c}:0", "{a,c}:0 {b}:0", "{a}:1 {b}:0 {c}:0", "{a}:0 {b}:0 {c}:1"]:
        assert want in text


def test_one_curve():
    assert [str(p) for p in enumerate_patterns(["a"], M0)] == ["{a}:0", "{a}:1"]
    assert enumerate_patterns([], M0) == [AttachmentPattern((), ())]


@pytest.mark.parametrize("n, m", [(n, m) for n in range(0, 7) for m in (0, 1)] + [(4, 2)])
def test_matches_brute_force(n, m):
    curves = [f"c{i + 1}" for i in range(n)]
    pats = enumerate_patterns(curves, ManifoldContext(m))
    assert as_set(pats) == all_patterns_brute(curves, m)
    assert len(pats) == len(as_set(pats))
    assert all(bounds_ok(p, ManifoldContext(m)) for p in pats)


def test_set_partitions_bell_numbers():
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(7)] == [1, 1, 2, 5, 15, 52, 203]


@pytest.mark.parametrize("n", range(1, 6))
def test_full_symmetry_matches_burnside(n):
    curves = [chr(ord("a") + i) for i in range(n)]
    group = PermutationGroup.symmetric(curves)
    perms = [dict(zip(curves, p)) for p in itertools.permutations(curves)]
    assert len(group.elements()) == len(perms)
    labeled = all_patterns_brute(curves, 0)
    assert len(enumerate_patterns(curves, M0, group)) == burnside_orbits(labeled, perms)


def test_symmetry_file():
    g = PermutationGroup.parse("# swap\n(a b)\n", "abc")
    reps = enumerate_patterns("abc", M0, g)
    assert len(reps) == 11
    assert all(g.canonical(p) == p for p in reps)
    with pytest.raises(FormatError):
        PermutationGroup.parse("a b\n", "abc")
    with pytest.raises(PatternError):
        PermutationGroup.parse("(a z)\n", "abc")


def test_pattern_canonical_and_errors():
    p = AttachmentPattern((("c", "a"), ("b",)), (0, 1))
    assert p.blocks == (("a", "c"), ("b",)) and p.genera == (0, 1)
    assert AttachmentPattern.parse(str(p)) == p
    assert AttachmentPattern.from_json(p.to_json()) == p
    with pytest.raises(PatternError):
        AttachmentPattern((("a",), ("a",)), (0, 0))
    with pytest.raises(PatternError):
        AttachmentPattern((("a",),), (-1,))
    with pytest.raises(FormatError):
        AttachmentPattern.parse("{a}")
    with pytest.raises(PatternError):
        ManifoldContext(-1)


def test_model_of_germ():
    b = thicken(lorenz(1, 1))
    p = model_of_germ(b)
    assert p.sizes == (1, 1, 1) and p.genera == (0, 0, 0)
    assert model_of_germ([]) == AttachmentPattern((), ())
    for m in range(4):
        assert bounds_ok(p, ManifoldContext(m))


def _paper_labels():
    b = thicken(lorenz(1, 1))
    short = [c.id for c in b.dividing_curves if len(c.segments) == 2]
    long_ = [c.id for c in b.dividing_curves if len(c.segments) == 3]
    return b, long_[0], long_[1], short[0]


@pytest.mark.parametrize("blocks, genera", [
    (("ab", "c"), (0, 0)),
    (("ac", "b"), (0, 0)),
    (("a", "b", "c"), (1, 0, 0)),
    (("c", "a", "b"), (1, 0, 0)),
])
def test_lorenz11_procedures_give_tori(blocks, genera):
    b, a, bb, c = _paper_labels()
    name = {"a": a, "b": bb, "c": c}
    p = AttachmentPattern(tuple(tuple(name[x] for x in blk) for blk in blocks), genera)
    ledger = assemble_boundary(b, p)
    assert ledger.entrance == (1,) and ledger.exit == (1,)


def test_annulus_germ_model_gives_spheres():
    b = thicken(annulus())
    ledger = assemble_boundary(b, model_of_germ(b))
    assert ledger.entrance == (0, 0) and ledger.exit == (0, 0)


def test_assemble_rejects_mismatch():
    with pytest.raises(PatternError):
        assemble_boundary(thicken(lorenz()), AttachmentPattern((("c1",),), (0,)))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 2**32 - 1), st.randoms(use_true_random=False))
def test_assembly_is_euler_balanced(seed, rnd):
    b = thicken(random_template(random.Random(seed)))
    curves = list(b.curve_ids)
    assume(len(curves) <= 7)
    parts = list(set_partitions(curves))
    blocks = rnd.choice(parts)
    p = AttachmentPattern(blocks, tuple(rnd.randint(0, 2) for _ in blocks))
    ledger = assemble_boundary(b, p)
    assert euler_feasible(ledger)
    chi = sum(c.euler for c in b.entrance) + sum(2 - 2 * g - len(k) for k, g in zip(p.blocks, p.genera))
    assert ledger.euler_entrance == chi


@pytest.mark.parametrize("ent, ext, feasible", [([2], [2], True), ([2], [0, 0], False), ([0], [0], True)])
def test_euler_examples(ent, ext, feasible):
    assert euler_feasible(BoundaryLedger(ent, ext)) is feasible


def test_accounting_examples():
    assert realization_accounting(BoundaryLedger([2], [2])).r == 1
    assert realization_accounting(BoundaryLedger([0], [0])).r == 1
    with pytest.raises(InfeasibleLedger, match="3 vs 0"):
        realization_accounting(BoundaryLedger([2], [0, 0]))
    acc = realization_accounting(BoundaryLedger([3, 2, 0], [4, 1, 0]))
    assert str(acc.n_formula) == "n = m_1 + m_2 + n_1 + " + str(acc.r)
    assert acc.n_formula.evaluate([1, 1], [2]) == 4 + acc.r


@settings(max_examples=300, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_accounting_identity(seed):
    l = random_ledger(random.Random(seed))
    ra, rb = r_expressions(l)
    assert (ra == rb) == euler_feasible(l)
    assert l.t == l.t1 + l.t2 + sum(1 for g in l.entrance if g == 1)
    if euler_feasible(l):
        assert realization_accounting(l).r == ra
    else:
        with pytest.raises(InfeasibleLedger):
            realization_accounting(l)


def test_ledger_text_format():
    l = BoundaryLedger.parse("# x\nexit: 0 0\nentrance: 2\n")
    assert l == BoundaryLedger((2,), (0, 0))
    assert BoundaryLedger.parse(l.format()) == l
    for bad in ["entrance: 1\n", "entrance: x\nexit: 1\n", "foo: 1\n"]:
        with pytest.raises(FormatError):
            BoundaryLedger.parse(bad)
