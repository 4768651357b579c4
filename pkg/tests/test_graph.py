from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import cycle, path
from walktime.errors import DisconnectedGraph, EmptyGraph, GraphFormatError, InvalidGraphError
from walktime.graph import (
    WeightedGraph,
    apply_edge_change,
    merge_target_set,
    parse_graph,
    serialize_graph,
    transition_probability,
    validate,
    weights_summary,
)
from walktime.numerics import FLOAT, RATIONAL


def test_parse_single_edge():
    g = parse_graph("2 1\n1 2 5")
    assert g.n == 2 and g.m == 1
    assert g.weight(1, 2) == 5 and g.weight(2, 1) == 5


def test_parse_path_with_comments_and_rationals():
    g = parse_graph("# a path\n3 2  # header\n\n1 2 1\n3 2 3/4   # reversed order\n")
    assert g.edges == ((1, 2, Fraction(1)), (2, 3, Fraction(3, 4)))


def test_parse_decimal_is_exact():
    g = parse_graph("2 1\n1 2 0.1")
    assert g.weight(1, 2) == Fraction(1, 10)


def test_parse_g8(g8):
    text = serialize_graph(g8)
    g = parse_graph(text)
    assert g.n == 8 and g.m == 13
    assert g == g8


@pytest.mark.parametrize(
    "text, fragment",
    [
        ("2 1\n1 2", "expected 'i j w'"),
        ("2 1\n1 3 1", "out of range"),
        ("2 1\n0 1 1", "out of range"),
        ("2 1\n1 1 1", "self-loop"),
        ("3 2\n1 2 1\n2 1 4", "duplicate"),
        ("2 1\n1 2 0", "positive"),
        ("2 1\n1 2 -3", "positive"),
        ("2 1\n1 2 abc", "bad weight"),
        ("2 1\n1 2 1/0", "bad weight"),
        ("2 2\n1 2 1", "announces 2 edges"),
        ("", "missing"),
        ("x y\n", "header"),
    ],
)
def test_parse_errors(text, fragment):
    with pytest.raises(GraphFormatError, match=fragment):
        parse_graph(text)


def test_validate():
    validate(path(3))
    validate(WeightedGraph(1, ()))
    with pytest.raises(DisconnectedGraph) as exc:
        validate(WeightedGraph.from_edges(4, [(1, 2), (3, 4)]))
    assert exc.value.components == [[1, 2], [3, 4]]
    with pytest.raises(EmptyGraph):
        validate(WeightedGraph(0, ()))


def test_graph_invariants_enforced():
    with pytest.raises(InvalidGraphError):
        WeightedGraph.from_edges(2, [(1, 2, 0)])
    with pytest.raises(InvalidGraphError):
        WeightedGraph.from_edges(2, [(1, 2), (2, 1)])
    with pytest.raises(InvalidGraphError):
        WeightedGraph.from_edges(2, [(2, 2)])


def test_weights_summary(g8, k2w5):
    s = weights_summary(g8)
    assert s.strength[1] == 14 and s.strength[2] == 20
    assert s.total_weight == 63
    assert sum(s.strength) == 2 * s.total_weight
    k = weights_summary(k2w5)
    assert k.strength == (5, 5) and k.total_weight == 5
    assert weights_summary(g8, FLOAT).total_weight == 63.0


def test_transition_probability(g8, k2w5, p3):
    assert transition_probability(g8, 2, 3) == Fraction(2, 7)
    assert transition_probability(k2w5, 1, 2) == 1
    assert transition_probability(p3, 2, 1) == Fraction(1, 2)
    assert transition_probability(p3, 1, 3) == 0
    assert transition_probability(g8, 2, 3, FLOAT) == pytest.approx(2 / 7)
    for i in range(1, 9):
        assert sum(transition_probability(g8, i, j) for j in range(1, 9)) == 1
    with pytest.raises(InvalidGraphError, match="isolated"):
        transition_probability(WeightedGraph.from_edges(3, [(1, 2)]), 3, 1)


def test_merge_singleton_is_renaming(p3):
    m = merge_target_set(p3, {3})
    assert m.merged == 3 and m.relabel == {1: 1, 2: 2}
    assert m.graph == p3


def test_merge_cycle_pair():
    m = merge_target_set(cycle(4), {2, 4})
    g = m.graph
    assert g.n == 3 and m.merged == 3
    assert g.weight(1, 3) == 2 and g.weight(2, 3) == 2
    assert not g.has_edge(1, 2)


def test_merge_g8(g8):
    m = merge_target_set(g8, {7, 8})
    o = m.merged
    assert o == 7
    assert m.graph.weight(m.relabel[1], o) == 5
    assert m.graph.weight(m.relabel[3], o) == 9
    assert m.graph.total_weight == g8.total_weight - 8


def test_merge_errors(p3):
    with pytest.raises(InvalidGraphError):
        merge_target_set(p3, {1, 2, 3})
    with pytest.raises(InvalidGraphError):
        merge_target_set(p3, set())
    with pytest.raises(DisconnectedGraph):
        merge_target_set(WeightedGraph.from_edges(4, [(1, 2), (3, 4)]), {1})


def test_apply_edge_change(p3):
    tri = apply_edge_change(p3, 1, 3, 1)
    assert tri.m == 3 and tri.has_edge(1, 3)
    assert p3.m == 2  # original untouched
    with pytest.raises(DisconnectedGraph):
        apply_edge_change(p3, 1, 2, mode="delete")
    k2 = WeightedGraph.from_edges(2, [(1, 2, 5)])
    with pytest.raises(InvalidGraphError, match="already exists"):
        apply_edge_change(k2, 1, 2, 3)
    assert apply_edge_change(k2, 1, 2, 3, mode="reweight").weight(1, 2) == 3
    with pytest.raises(InvalidGraphError):
        apply_edge_change(tri, 1, 3, 0)
    assert apply_edge_change(tri, 1, 3, mode="delete") == p3


@st.composite
def graphs(draw, max_n=7):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True)) if pairs else []
    weights = st.fractions(min_value=Fraction(1, 20), max_value=50, max_denominator=20)
    return WeightedGraph.from_edges(n, [(i, j, draw(weights)) for i, j in chosen])


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_roundtrip_and_weight_identities(g):
    assert parse_graph(serialize_graph(g)) == g
    s = weights_summary(g, RATIONAL)
    assert sum(s.strength) == 2 * s.total_weight
    for i in range(1, g.n + 1):
        if g.degree(i):
            assert sum(transition_probability(g, i, j) for j in range(1, g.n + 1)) == 1


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_merge_preserves_outside_weight(g, data):
    if g.n < 2:
        return
    S = set(data.draw(st.lists(st.integers(1, g.n), min_size=1, max_size=g.n - 1, unique=True)))
    try:
        m = merge_target_set(g, S)
    except DisconnectedGraph:
        return
    inner = sum((w for u, v, w in g.edges if u in S and v in S), Fraction(0))
    assert m.graph.total_weight == g.total_weight - inner
