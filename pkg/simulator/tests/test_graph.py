from itertools import combinations

import networkx as nx
import numpy as np
import pytest

from core.exceptions import ConfigurationError, DomainError, PreconditionError
from core.graph import (
    NetworkGraph,
    degree,
    is_connected,
    lambda2,
    laplacian,
    neighbors,
    total_degree,
)


def _all_graphs(m):
    pairs = list(combinations(range(1, m + 1), 2))
    for r in range(len(pairs) + 1):
        for subset in combinations(pairs, r):
            yield NetworkGraph.from_edges(m, subset)


def test_c6_structure(c6):
    assert c6.m == 6
    assert neighbors(c6, 1) == frozenset({2, 6})
    assert all(degree(c6, i) == 2 for i in range(1, 7))
    assert total_degree(c6) == 12
    assert lambda2(c6) == pytest.approx(2 - 2 * np.cos(2 * np.pi / 6), abs=1e-12)


def test_complete_graph_lambda2():
    assert lambda2(NetworkGraph.complete(3)) == pytest.approx(3.0, abs=1e-12)


def test_laplacian_rows_sum_to_zero(c6):
    lap = laplacian(c6)
    np.testing.assert_allclose(lap.sum(axis=1), 0.0, atol=1e-15)
    np.testing.assert_array_equal(lap, lap.T)


def test_weighted_edges_enter_laplacian():
    g = NetworkGraph.from_edges(3, [(1, 2, 2.0), (2, 3, 0.5)])
    lap = laplacian(g)
    assert lap[0, 0] == 2.0 and lap[1, 1] == 2.5 and lap[0, 1] == -2.0


@pytest.mark.parametrize("m", [2, 3, 4, 5])
def test_lambda2_matches_brute_force_on_small_graphs(m):
    checked = 0
    for g in _all_graphs(m):
        connected = nx.is_connected(g.to_networkx())
        assert is_connected(g) == connected
        if not connected:
            with pytest.raises(PreconditionError):
                lambda2(g)
            continue
        adjacency = np.array(g.weights)
        brute = np.sort(np.linalg.eigvals(np.diag(adjacency.sum(axis=1)) - adjacency).real)[1]
        assert lambda2(g) == pytest.approx(brute, abs=1e-8)
        checked += 1
    assert checked > 0


def test_single_sensor_is_connected_but_has_no_lambda2():
    g = NetworkGraph.from_edges(1, [])
    assert is_connected(g)
    with pytest.raises(PreconditionError):
        lambda2(g)


def test_directed_edges_list_both_directions(c6):
    channels = c6.directed_edges()
    assert len(channels) == total_degree(c6)
    assert (0, 1, 1.0) in channels and (1, 0, 1.0) in channels
    assert channels == sorted(channels)


@pytest.mark.parametrize(
    "edges",
    [[(1, 1)], [(0, 2)], [(1, 7)], [(1, 2, 0.0)], [(1, 2, -1.0)], [(1, 2, 3, 4)], [(1.5, 2.9)], [(1, 2.5, 1.0)]],
)
def test_from_edges_rejects_bad_edges(edges):
    with pytest.raises(ConfigurationError) as excinfo:
        NetworkGraph.from_edges(6, edges)
    assert excinfo.value.fields[0].startswith("graph.edges")


def test_asymmetric_adjacency_rejected():
    with pytest.raises(ConfigurationError):
        NetworkGraph(np.array([[0.0, 1.0], [0.0, 0.0]]))


def test_neighbors_index_out_of_range(c6):
    with pytest.raises(DomainError):
        neighbors(c6, 7)


def test_small_cycle_falls_back_to_path():
    g = NetworkGraph.cycle(2)
    assert total_degree(g) == 2


def test_laplacian_reference_matrices():
    np.testing.assert_array_equal(laplacian(NetworkGraph.from_edges(2, [(1, 2)])), [[1, -1], [-1, 1]])
    np.testing.assert_array_equal(
        laplacian(NetworkGraph.path(3)), [[1, -1, 0], [-1, 2, -1], [0, -1, 1]]
    )


@pytest.mark.parametrize("m", [3, 4, 5])
def test_complete_graph_lambda2_equals_m(m):
    assert lambda2(NetworkGraph.complete(m)) == pytest.approx(m, abs=1e-8)


def test_two_isolated_nodes_are_disconnected():
    g = NetworkGraph(np.zeros((2, 2)))
    assert not is_connected(g)
    assert neighbors(g, 1) == frozenset()
    assert lambda2(NetworkGraph.path(2)) == pytest.approx(2.0)


def test_complete_graph_neighbors():
    assert neighbors(NetworkGraph.complete(3), 2) == frozenset({1, 3})
