import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hetnet import (WeightedGraph, connected_components, is_leader_follower_connected,
                    laplacian, union_graph)
from hetnet.errors import InvalidGraph, MismatchedNodeCount
from hetnet.graph import input_matrix, leader_set, leaderless_components


STAR = WeightedGraph(3, ((1, 2, 1.0), (1, 3, 1.0)))


def test_laplacian_k2():
    assert np.array_equal(laplacian(WeightedGraph(2, ((1, 2),))), [[1, -1], [-1, 1]])


def test_laplacian_star():
    assert np.array_equal(laplacian(STAR), [[2, -1, -1], [-1, 1, 0], [-1, 0, 1]])


def test_laplacian_empty():
    assert np.array_equal(laplacian(WeightedGraph(3, ())), np.zeros((3, 3)))


def test_weights_default_to_one_and_normalize_order():
    g = WeightedGraph(3, ((2, 1), (3, 1, 2.5)))
    assert g.edges == ((1, 2, 1.0), (1, 3, 2.5))


@pytest.mark.parametrize("edges", [
    ((1, 1),),
    ((1, 2), (2, 1)),
    ((1, 4),),
    ((1, 2, 0.0),),
    ((1, 2, -1.0),),
])
def test_invalid_graphs(edges):
    with pytest.raises(InvalidGraph):
        WeightedGraph(3, edges)


def test_components():
    assert connected_components(WeightedGraph(3, ((1, 2), (2, 3)))) == [{1, 2, 3}]
    assert connected_components(WeightedGraph(4, ((1, 2), (3, 4)))) == [{1, 2}, {3, 4}]
    assert connected_components(WeightedGraph(1, ())) == [{1}]


def test_leader_follower():
    path = WeightedGraph(3, ((1, 2), (2, 3)))
    split = WeightedGraph(4, ((1, 2), (3, 4)))
    assert is_leader_follower_connected(path, [1])
    assert not is_leader_follower_connected(split, [1])
    assert leaderless_components(split, [1]) == [{3, 4}]
    assert is_leader_follower_connected(split, [1, 2, 3, 4])


def test_leader_set_validation():
    assert leader_set([3, 1], 3) == (1, 3)
    for bad in ([], [0], [4], [1, 1]):
        with pytest.raises(InvalidGraph):
            leader_set(bad, 3)
    assert np.array_equal(input_matrix([2], 3), [[0], [1], [0]])


def test_union_graph():
    a = WeightedGraph(3, ((1, 2),))
    b = WeightedGraph(3, ((2, 3),))
    assert union_graph([a, b]).edges == ((1, 2, 1.0), (2, 3, 1.0))
    assert union_graph([a, WeightedGraph(3, ())]) == a
    w = union_graph([a, WeightedGraph(3, ((1, 2, 2.0),))])
    assert w.edges == ((1, 2, 3.0),)
    with pytest.raises(MismatchedNodeCount):
        union_graph([a, WeightedGraph(4, ())])


def test_without_edge_and_json_round_trip():
    g = STAR.without_edge(3, 1)
    assert g.edges == ((1, 2, 1.0),)
    assert WeightedGraph(g.n, tuple(map(tuple, g.to_json()["edges"]))) == g
    assert WeightedGraph.from_adjacency(STAR.adjacency()) == STAR


@st.composite
def graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    chosen = draw(st.lists(st.sampled_from(pairs), unique=True) if pairs else st.just([]))
    weights = draw(st.lists(st.floats(0.01, 100.0), min_size=len(chosen), max_size=len(chosen)))
    return WeightedGraph(n, tuple((i, j, w) for (i, j), w in zip(chosen, weights)))


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_laplacian_invariants(g):
    L = laplacian(g)
    assert np.array_equal(L, L.T)
    assert np.all(L - np.diag(np.diag(L)) <= 0)
    assert np.max(np.abs(L @ np.ones(g.n))) <= 10 * np.finfo(float).eps * max(
        np.abs(L).sum(axis=1).max(), 1.0)


@settings(max_examples=60, deadline=None)
@given(graphs(), graphs())
def test_union_laplacian_is_additive(g1, g2):
    if g1.n != g2.n:
        return
    assert np.allclose(laplacian(union_graph([g1, g2])), laplacian(g1) + laplacian(g2))


@settings(max_examples=60, deadline=None)
@given(graphs(), st.data())
def test_leader_follower_monotone(g, data):
    leaders = data.draw(st.sets(st.integers(1, g.n), min_size=1))
    before = is_leader_follower_connected(g, leaders)
    extra = data.draw(st.integers(1, g.n))
    assert not before or is_leader_follower_connected(g, leaders | {extra})
    i, j = data.draw(st.integers(1, g.n)), data.draw(st.integers(1, g.n))
    if i != j and not g.adjacency()[i - 1, j - 1]:
        bigger = WeightedGraph(g.n, g.edges + ((i, j, 1.0),))
        assert not before or is_leader_follower_connected(bigger, leaders)


@settings(max_examples=60, deadline=None)
@given(graphs())
def test_zero_eigenvalues_count_components(g):
    L = laplacian(g)
    ev = np.linalg.eigvalsh(L)
    zeros = int(np.sum(np.abs(ev) <= 1e-9 * max(1.0, np.abs(ev).max())))
    assert zeros == len(connected_components(g))
