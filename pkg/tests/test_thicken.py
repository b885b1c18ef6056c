from __future__ import annotations

import random

import pytest
from hypothesis import given, settings, strategies as st

from oracles import dividing_curve_count
from tplkit.generators import random_template
from tplkit.template import Template, annulus, genus, lorenz, slide_move, slide_sites, split_move
from tplkit.thicken import thicken

templates = st.integers(0, 2**32 - 1).map(lambda s: random_template(random.Random(s)))


def oracle_count(t: Template) -> int:
    return dividing_curve_count(
        {b.id: (b.n_in, b.n_out) for b in t.branch_lines},
        [(s.id, s.src, s.out_index, s.dst, s.in_index, s.twists) for s in t.strips],
    )


# Golden values, fixed from the coordinate oracle before the tracer existed.
GOLDEN = {
    "lorenz00": 3,
    "lorenz11": 3,
    "annulus": 4,
    "mobius": 2,
}


@pytest.mark.parametrize("name, count", sorted(GOLDEN.items()))
def test_golden_curve_counts(data, name, count):
    t = Template.parse((data / f"{name}.tpl").read_text())
    assert oracle_count(t) == count
    assert len(thicken(t).dividing_curves) == count


def test_lorenz11_structure():
    b = thicken(lorenz(1, 1))
    # one short curve and a symmetric pair of long ones
    assert sorted(len(c.segments) for c in b.dividing_curves) == [2, 3, 3]
    assert [(c.genus, c.punctures) for c in b.entrance] == [(0, 3)]
    assert [(c.genus, c.punctures) for c in b.exit] == [(0, 3)]


def test_annulus_components():
    b = thicken(annulus())
    assert b.degenerate
    assert sorted((c.genus, c.punctures) for c in b.entrance) == [(0, 2), (0, 2)]
    m = thicken(annulus(1))
    assert [(c.genus, c.punctures) for c in m.entrance] == [(0, 2)]
    assert [(c.genus, c.punctures) for c in m.exit] == [(0, 2)]


@settings(max_examples=150, deadline=None)
@given(templates)
def test_curve_count_matches_oracle(t):
    assert len(thicken(t).dividing_curves) == oracle_count(t)


@settings(max_examples=150, deadline=None)
@given(templates)
def test_surface_bookkeeping(t):
    b = thicken(t)
    g = genus(t)
    assert b.euler_entrance == b.euler_exit == 1 - g
    # each curve bounds exactly one X and one Y component
    for side in (b.entrance, b.exit):
        curves = [c for comp in side for c in comp.curves]
        assert sorted(curves) == sorted(b.curve_ids)
        for comp in side:
            assert comp.euler == 2 - 2 * comp.genus - comp.punctures
    # gluing X and Y along C gives one closed surface of genus g
    parent = {("x", i): ("x", i) for i in range(len(b.entrance))}
    parent.update({("y", i): ("y", i) for i in range(len(b.exit))})

    def find(v):
        while parent[v] != v:
            v = parent[v]
        return v

    for c in b.dividing_curves:
        parent[find(("x", c.entrance))] = find(("y", c.exit))
    assert len({find(v) for v in parent}) == 1
    assert b.euler_entrance + b.euler_exit == 2 - 2 * g
    # every corner segment of every strip lies on exactly one curve
    segs = [s for c in b.dividing_curves for s in c.segments]
    assert len(segs) == len(set(segs)) == 4 * len(t.strips)


@settings(max_examples=60, deadline=None)
@given(templates)
def test_slide_preserves_boundary(t):
    b = thicken(t)
    key = sorted((c.genus, c.punctures) for c in b.entrance), sorted(
        (c.genus, c.punctures) for c in b.exit)
    for q in slide_sites(t):
        s = thicken(slide_move(t, q))
        assert len(s.dividing_curves) == len(b.dividing_curves)
        assert (sorted((c.genus, c.punctures) for c in s.entrance),
                sorted((c.genus, c.punctures) for c in s.exit)) == key


def test_split_adds_curves_on_lorenz():
    assert len(thicken(split_move(lorenz(0, 0), "q", 1)).dividing_curves) == 4


def test_json_shape():
    j = thicken(lorenz(1, 1)).to_json()
    assert j["dividing_curves"] == 3 and len(j["curves"]) == 3
    assert j["euler_entrance"] == j["euler_exit"] == -1
