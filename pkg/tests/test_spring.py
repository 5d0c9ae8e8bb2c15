import numpy as np

from reldiff.dataset import Adjacency
from reldiff.simulate import SimulationConfig, simulate_spring
from reldiff.simulate.kernels import spring_leapfrog
from reldiff.simulate.spring import draw_spring_init


def test_force_free_motion_is_linear_in_time():
    adj = Adjacency(3, np.zeros((3, 3), dtype=np.uint8))
    cfg = SimulationConfig(system="spring", n_nodes=3, n_samples=4, seed=2)
    ds = simulate_spring(adj, cfg)
    second_diff = np.diff(ds.samples.astype(np.float64), n=2, axis=2)
    assert np.abs(second_diff).max() < 1e-4


def test_momentum_conserved_for_connected_pair():
    w = np.array([[0.0, 1.0], [1.0, 0.0]])
    rng = np.random.default_rng(0)
    pos0 = rng.normal(size=(1, 2, 2)) * 0.5
    vel0 = rng.normal(size=(1, 2, 2)) * 0.5
    # fine-step reference at dt/100
    coarse = spring_leapfrog(pos0, vel0, w, 0.1, 0.001, 49, 100)
    fine = spring_leapfrog(pos0, vel0, w, 0.1, 0.00001, 49, 10000)
    np.testing.assert_allclose(coarse, fine, atol=1e-5)
    # velocity Verlet with equal/opposite pair forces keeps total momentum
    diffs = np.diff(coarse[0], axis=0)  # (48, 2, 2) displacement per record
    total = diffs.sum(axis=1)  # (48, 2) proportional to total momentum
    assert np.abs(total - total[0]).max() < 1e-9


def test_row_count_is_twice_particle_count_and_view_concatenates_time():
    adj = Adjacency(4, np.zeros((4, 4), dtype=np.uint8))
    cfg = SimulationConfig(system="spring", n_nodes=4, n_samples=2, seed=3)
    ds = simulate_spring(adj, cfg)
    assert ds.samples.shape == (2, 8, 49)
    view = ds.model_samples
    assert view.shape == (2, 4, 98)
    # row 2p is x, row 2p+1 is y; the model view is [x(t) .. y(t)] per particle
    np.testing.assert_array_equal(view[:, 1, :49], ds.samples[:, 2, :])
    np.testing.assert_array_equal(view[:, 1, 49:], ds.samples[:, 3, :])


def test_default_record_count_is_49():
    cfg = SimulationConfig(system="spring", n_nodes=2, n_samples=1, seed=0)
    assert cfg.resolved_n_steps == 49


def test_determinism_bit_identical():
    from reldiff.simulate import sample_graph

    adj = sample_graph(5, 0.5, seed=4)
    cfg = SimulationConfig(system="spring", n_nodes=5, n_samples=3, seed=7)
    a = simulate_spring(adj, cfg)
    b = simulate_spring(adj, cfg)
    assert np.array_equal(a.samples, b.samples)


def test_initial_conditions_scaled_gaussians():
    cfg = SimulationConfig(system="spring", n_nodes=3, n_samples=4000, seed=1)
    pos0, vel0 = draw_spring_init(cfg, cfg.n_samples)
    assert abs(pos0.std() - 0.5) < 0.02
    assert abs(vel0.mean()) < 0.02
