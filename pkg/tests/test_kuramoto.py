import numpy as np
import pytest

from reldiff.dataset import Adjacency
from reldiff.errors import InvalidConfigError
from reldiff.simulate import SimulationConfig, simulate_kuramoto
from reldiff.simulate.kuramoto import coupling_coefficients, draw_initial_conditions
from reldiff.simulate.kernels import kuramoto_rk4


def _empty_adj(k):
    return Adjacency(k, np.zeros((k, k), dtype=np.uint8))


def _pair_adj():
    return Adjacency(2, np.array([[0, 1], [1, 0]], dtype=np.uint8))


def test_decoupled_oscillators_are_exact_sinusoids():
    cfg = SimulationConfig(system="kuramoto", n_nodes=4, n_samples=3, seed=5,
                           coupling_strength=0.0)
    adj = _empty_adj(4)
    ds = simulate_kuramoto(adj, cfg)
    theta0, omega = draw_initial_conditions(cfg, cfg.n_samples)
    t = np.arange(100) * cfg.dt
    expected = np.sin(theta0[:, :, None] + omega[:, :, None] * t[None, None, :])
    np.testing.assert_allclose(ds.samples, expected.astype(np.float32), atol=1e-5)


def test_two_coupled_equal_frequency_nodes_synchronize_monotonically():
    # reference oracle: the same RK4 arithmetic at dt/100
    dt = 0.05
    theta0 = np.array([[0.3, 2.1]])
    omega = np.array([[4.0, 4.0]])
    w = np.ones((2, 2)) - np.eye(2)
    coef = np.array([1.0, 1.0])
    fine = kuramoto_rk4(theta0, omega, w, coef, dt / 100, 100 * 99 + 1)
    fine_gap = np.abs(fine[0, ::100, 0] - fine[0, ::100, 1])
    assert np.all(np.diff(fine_gap) < 0)
    assert fine_gap[-1] < 0.05 * fine_gap[0]

    coarse = kuramoto_rk4(theta0, omega, w, coef, dt, 100)
    gap = np.abs(coarse[0, :, 0] - coarse[0, :, 1])
    assert np.all(np.diff(gap) < 0)
    np.testing.assert_allclose(coarse[0], fine[0, ::100], rtol=0, atol=1e-6)


def test_outputs_bounded_by_sine_range():
    cfg = SimulationConfig(system="kuramoto", n_nodes=5, n_samples=8, seed=0)
    from reldiff.simulate import sample_graph

    ds = simulate_kuramoto(sample_graph(5, 0.5, seed=1), cfg)
    assert ds.samples.min() >= -1.0 and ds.samples.max() <= 1.0


def test_dominant_frequency_matches_natural_frequency_without_coupling():
    cfg = SimulationConfig(system="kuramoto", n_nodes=3, n_samples=4, seed=9,
                           coupling_strength=0.0)
    ds = simulate_kuramoto(_empty_adj(3), cfg)
    _, omega = draw_initial_conditions(cfg, cfg.n_samples)
    length = ds.series_length
    freqs = np.fft.rfftfreq(length, d=cfg.dt)
    bin_width = freqs[1] - freqs[0]
    spectrum = np.abs(np.fft.rfft(ds.samples, axis=2))
    spectrum[:, :, 0] = 0.0  # ignore the DC component
    peak = freqs[np.argmax(spectrum, axis=2)]
    np.testing.assert_allclose(peak, omega / (2 * np.pi), atol=bin_width + 1e-9)


def test_determinism_bit_identical():
    from reldiff.simulate import sample_graph

    cfg = SimulationConfig(system="kuramoto", n_nodes=5, n_samples=6, seed=11)
    adj = sample_graph(5, 0.5, seed=2)
    a = simulate_kuramoto(adj, cfg)
    b = simulate_kuramoto(adj, cfg)
    assert np.array_equal(a.samples, b.samples)


def test_isolated_nodes_drop_coupling_term():
    edges = np.zeros((3, 3), dtype=np.uint8)
    edges[0, 1] = edges[1, 0] = 1
    adj = Adjacency(3, edges)
    coef = coupling_coefficients(adj, coupling=2.0)
    assert coef[2] == 0.0 and coef[0] == 2.0
    cfg = SimulationConfig(system="kuramoto", n_nodes=3, n_samples=2, seed=1)
    ds = simulate_kuramoto(adj, cfg)
    assert np.isfinite(ds.samples).all()


def test_asymmetric_adjacency_rejected():
    edges = np.zeros((3, 3), dtype=np.uint8)
    edges[0, 1] = 1
    adj = Adjacency(3, edges, directed=True)
    cfg = SimulationConfig(system="kuramoto", n_nodes=3, n_samples=2, seed=1)
    with pytest.raises(InvalidConfigError):
        simulate_kuramoto(adj, cfg)


def test_wrong_system_tag_rejected():
    cfg = SimulationConfig(system="var", n_nodes=3, n_samples=2, seed=1)
    with pytest.raises(InvalidConfigError):
        simulate_kuramoto(_empty_adj(3), cfg)
