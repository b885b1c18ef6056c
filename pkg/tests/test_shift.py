from __future__ import annotations

import random

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from oracles import closed_words
from tplkit.canon import is_isomorphic
from tplkit.errors import FormatError, SurgeryError
from tplkit.generators import random_edge_graph
from tplkit.shift import (
    AdjacencyMatrix,
    EdgeGraph,
    PeriodicWord,
    amalgamate,
    amalgamation_parts,
    as_edge_graph,
    closed_path_count,
    contract,
    edge_graph_of,
    expand,
    in_split,
    is_irreducible,
    out_split,
    periodic_point_count,
    periodic_point_counts,
)

FULL2 = EdgeGraph.from_matrix([[1, 1], [1, 1]])
GOLDEN = EdgeGraph.from_matrix([[1, 1], [1, 0]])


def graphs(n_max=4):
    return st.integers(0, 2**32 - 1).map(lambda s: random_edge_graph(random.Random(s), n_max))


# -- formats ------------------------------------------------------------------

def test_mat_round_trip():
    m = AdjacencyMatrix.parse("# c\n3\n0 1 2\n1 0 0\n0 0 1\n")
    assert m.entries == ((0, 1, 2), (1, 0, 0), (0, 0, 1))
    assert AdjacencyMatrix.parse(m.format()) == m


@pytest.mark.parametrize("text", ["", "2\n1 1\n", "2\n1 1\n1\n", "x\n", "1\n-1\n", "0\n"])
def test_mat_rejects(text):
    with pytest.raises(FormatError):
        AdjacencyMatrix.parse(text)


def test_edge_graph_rejects_multi_edges():
    with pytest.raises(FormatError):
        EdgeGraph.from_matrix([[2]])
    with pytest.raises(FormatError):
        EdgeGraph(("a", "a"), ((0, 1), (1, 0)))


def test_edge_graph_of_multigraph():
    g = as_edge_graph([[2]])
    assert g.n == 2 and is_isomorphic(g, FULL2)
    h = edge_graph_of(AdjacencyMatrix(((1, 1), (1, 0))).vertex_graph())
    # golden-mean vertex graph has 3 edges; its edge graph has 3 vertices
    assert h.n == 3
    assert periodic_point_counts(h, 6) == periodic_point_counts(GOLDEN, 6)


# -- surgeries ----------------------------------------------------------------

def test_out_split_full_shift():
    h = out_split(FULL2, "1", (["1"], ["2"]))
    assert h.vertices == ("1a", "1b", "2")
    assert h.successors("1a") == ("1a", "1b")
    assert h.successors("1b") == ("2",)
    assert h.successors("2") == ("1a", "1b", "2")


def test_in_split_is_dual():
    h = in_split(FULL2, "2", (["1"], ["2"]))
    assert h.reversed() == out_split(FULL2.reversed(), "2", (["1"], ["2"]))


@pytest.mark.parametrize("parts", [(["1"], []), (["1"], ["1"]), (["1"], ["3"]), (["1", "2"],)])
def test_split_partition_errors(parts):
    with pytest.raises(SurgeryError):
        out_split(FULL2, "1", parts)


def test_split_needs_degree_two():
    with pytest.raises(SurgeryError, match="out-degree"):
        out_split(GOLDEN, "2", (["1"], ["2"]))


def test_amalgamate_inverts_split():
    h = out_split(FULL2, "1", (["1"], ["2"]))
    assert amalgamate(h, "1a", "1b") == FULL2


def test_amalgamate_errors():
    with pytest.raises(SurgeryError, match="in-neighbour"):
        amalgamate(GOLDEN, "1", "2")
    with pytest.raises(SurgeryError):
        amalgamate(FULL2, "1", "1")
    # equal columns but overlapping images
    g = EdgeGraph.from_matrix([[0, 0, 1], [0, 0, 1], [1, 1, 0]])
    with pytest.raises(SurgeryError, match="disjoint"):
        amalgamation_parts(g, "1", "2")


def test_expand_contract():
    one = EdgeGraph.from_matrix([[1]])
    e = expand(one, ("1", "1"))
    assert e.transition == ((0, 1), (1, 0))
    assert contract(e, e.vertices[-1]) == one
    with pytest.raises(SurgeryError):
        expand(GOLDEN, ("2", "2"))
    with pytest.raises(SurgeryError, match="self-loop"):
        contract(one, "1")
    with pytest.raises(SurgeryError, match="double"):
        contract(EdgeGraph.from_matrix([[0, 1, 1], [0, 0, 1], [1, 0, 0]]), "2")


def test_expand_changes_traces_negative_control():
    one = EdgeGraph.from_matrix([[1]])
    assert periodic_point_count(one, 1) == 1
    assert periodic_point_count(expand(one, ("1", "1")), 1) == 0


@settings(max_examples=60, deadline=None)
@given(graphs(), st.randoms(use_true_random=False))
def test_splits_preserve_periodic_counts(g, rnd):
    for fn, nbrs in ((out_split, g.successors), (in_split, g.predecessors)):
        for v in g.vertices:
            ns = list(nbrs(v))
            if len(ns) < 2:
                continue
            rnd.shuffle(ns)
            cut = rnd.randint(1, len(ns) - 1)
            h = fn(g, v, (ns[:cut], ns[cut:]))
            assert periodic_point_counts(h, 8) == periodic_point_counts(g, 8)
            d = "out" if fn is out_split else "in"
            new = [x for x in h.vertices if x not in g.vertices]
            assert is_isomorphic(amalgamate(h, new[0], new[1], d), g)


# -- counting -----------------------------------------------------------------

@settings(max_examples=40, deadline=None)
@given(graphs(5))
def test_counts_match_brute_force(g):
    rows = [list(r) for r in g.transition]
    for k in range(1, 6):
        expected = len(closed_words(rows, k))
        assert periodic_point_count(g, k) == expected
        assert closed_path_count(g, k) == expected


def test_counts_exact_beyond_int64():
    m = AdjacencyMatrix(((1000, 1000), (1000, 1000)))
    assert periodic_point_count(m, 8) == 2000**8
    assert closed_path_count(m, 3) == 2000**3


def test_golden_lucas():
    assert periodic_point_counts(GOLDEN, 8) == [1, 3, 4, 7, 11, 18, 29, 47]


def test_irreducible():
    assert is_irreducible(FULL2)
    assert not is_irreducible(EdgeGraph.from_matrix([[1, 1], [0, 1]]))


def test_periodic_word():
    w = PeriodicWord(("x", "y"))
    assert w.period == 2 and str(w) == "xy" and w.is_closed_path_in(EdgeGraph(("x", "y"), FULL2.transition))
    assert len(w.rotations()) == 2


def test_exports_are_sorted():
    g = EdgeGraph(("b", "a"), ((0, 1), (1, 1)))
    assert g.to_json() == {"vertices": ["a", "b"], "edges": [["a", "a"], ["a", "b"], ["b", "a"]]}
    assert g.to_dot().splitlines()[1] == '  "a";'
    assert np.array_equal(g.matrix, [[0, 1], [1, 1]])
