import numpy as np
import pytest

from reldiff.errors import InvalidConfigError
from reldiff.simulate import sample_graph


def test_two_nodes_full_probability_forces_the_single_pair():
    adj = sample_graph(2, edge_prob=1.0, directed=False, seed=123)
    assert adj.edges.tolist() == [[0, 1], [1, 0]]


def test_rng_replay_matches_documented_draw_sequence():
    # documented procedure: default_rng(seed) draws one uniform per strict
    # upper-triangle pair, row-major, threshold < edge_prob, then mirrors
    seed, k, p = 7, 5, 0.5
    rng = np.random.default_rng(seed)
    expected = np.zeros((k, k), dtype=np.uint8)
    draws = rng.random(k * (k - 1) // 2)
    pos = 0
    for i in range(k):
        for j in range(i + 1, k):
            expected[i, j] = expected[j, i] = draws[pos] < p
            pos += 1
    adj = sample_graph(k, edge_prob=p, seed=seed)
    np.testing.assert_array_equal(adj.edges, expected)


def test_zero_trace_always():
    for seed in range(20):
        adj = sample_graph(6, 0.7, seed=seed)
        assert np.trace(adj.edges) == 0


def test_symmetric_when_undirected_and_reproducible():
    a = sample_graph(8, 0.4, seed=3)
    b = sample_graph(8, 0.4, seed=3)
    np.testing.assert_array_equal(a.edges, b.edges)
    np.testing.assert_array_equal(a.edges, a.edges.T)


def test_directed_graph_can_be_asymmetric():
    found = any(
        not np.array_equal(
            sample_graph(5, 0.5, directed=True, seed=s).edges,
            sample_graph(5, 0.5, directed=True, seed=s).edges.T,
        )
        for s in range(10)
    )
    assert found


def test_too_few_nodes_rejected():
    with pytest.raises(InvalidConfigError):
        sample_graph(1, 0.5)


def test_edge_prob_bounds_rejected():
    with pytest.raises(InvalidConfigError):
        sample_graph(4, 0.0)
    with pytest.raises(InvalidConfigError):
        sample_graph(4, 1.5)
