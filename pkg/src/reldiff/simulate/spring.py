"""2D particles coupled by ideal springs.

Connected pairs attract with Hooke force F = -k (r_i - r_j) (zero rest
length, unit mass).  Trajectories are integrated with velocity Verlet on a
fine grid and stored every ``spring_record_every`` substeps, 49 records by
default.  The dataset keeps two rows per particle (x then y); the model view
concatenates them along time.
"""

from __future__ import annotations

import numpy as np

from ..dataset import Adjacency, TimeSeriesDataset
from ..errors import InvalidConfigError
from .config import SimulationConfig
from .kernels import spring_leapfrog
from .kuramoto import sample_streams

DEFAULT_N_RECORD = 49


def draw_spring_init(config: SimulationConfig, n_samples: int) -> tuple[np.ndarray, np.ndarray]:
    """Initial positions and velocities ~ init_scale * N(0, 1), per sample."""
    k = config.n_nodes
    pos0 = np.empty((n_samples, k, 2))
    vel0 = np.empty((n_samples, k, 2))
    for idx, rng in enumerate(sample_streams(config.seed, n_samples)):
        pos0[idx] = rng.normal(size=(k, 2)) * config.init_scale
        vel0[idx] = rng.normal(size=(k, 2)) * config.init_scale
    return pos0, vel0


def simulate_spring(adjacency: Adjacency, config: SimulationConfig) -> TimeSeriesDataset:
    if config.system != "spring":
        raise InvalidConfigError(f"config.system is {config.system!r}, expected 'spring'")
    if not np.array_equal(adjacency.edges, adjacency.edges.T):
        raise InvalidConfigError("spring requires a symmetric adjacency")
    n_record = config.resolved_n_steps
    pos0, vel0 = draw_spring_init(config, config.n_samples)
    pos = spring_leapfrog(
        pos0,
        vel0,
        adjacency.edges.astype(np.float64),
        config.spring_constant,
        config.spring_substep_dt,
        n_record,
        config.spring_record_every,
    )
    # (N, T, P, 2) -> rows [x_0, y_0, x_1, y_1, ...] of length T
    samples = pos.transpose(0, 2, 3, 1).reshape(pos.shape[0], -1, n_record)
    samples = samples.astype(np.float32)
    return TimeSeriesDataset(
        samples=samples,
        observed_mask=np.ones_like(samples, dtype=np.uint8),
        adjacency=adjacency,
        system="spring",
        seed=config.seed,
        rows_per_entity=2,
        meta={
            "spring_constant": config.spring_constant,
            "substep_dt": config.spring_substep_dt,
            "record_every": config.spring_record_every,
        },
    )
