"""Vector autoregression with one shared symmetric coefficient matrix.

    y_t = sum_{p=1..P} A y_{t-p}

A's off-diagonal support equals the adjacency; coefficients are drawn with
random sign and magnitude uniform on ``var_coef_range``, then shrunk until
the companion matrix is stable.  A random subset of recorded points receives
additive Gaussian observation noise.
"""

from __future__ import annotations

import numpy as np

from ..dataset import Adjacency, TimeSeriesDataset
from ..errors import GenerationError, InvalidConfigError
from .config import SimulationConfig
from .kernels import var_recursion
from .kuramoto import sample_streams

_MAX_REDRAWS = 5
_MAX_SHRINKS = 80
# Sub-stream tag for the dataset-level coefficient draw, distinct from any
# per-sample stream (those use (seed, sample_index) with small indices).
_COEF_STREAM = 0xC0EF


def companion_spectral_radius(a: np.ndarray, order: int) -> float:
    """Spectral radius of the stacked-lag companion matrix of y_t = sum_p A y_{t-p}."""
    k = a.shape[0]
    comp = np.zeros((k * order, k * order))
    for p in range(order):
        comp[:k, p * k : (p + 1) * k] = a
    if order > 1:
        comp[k:, : k * (order - 1)] = np.eye(k * (order - 1))
    return float(np.abs(np.linalg.eigvals(comp)).max())


def draw_coefficients(adjacency: Adjacency, config: SimulationConfig) -> np.ndarray:
    """Symmetric coefficient matrix on the adjacency support, scaled stable."""
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, _COEF_STREAM)))
    lo, hi = config.var_coef_range
    k = adjacency.n_nodes
    for _ in range(_MAX_REDRAWS):
        magnitude = rng.uniform(lo, hi, size=(k, k))
        sign = np.where(rng.random((k, k)) < 0.5, -1.0, 1.0)
        coef = magnitude * sign
        coef = np.triu(coef, k=1)
        coef = coef + coef.T
        a = coef * adjacency.edges
        if not a.any():
            return a
        for _ in range(_MAX_SHRINKS):
            radius = companion_spectral_radius(a, config.var_order)
            if radius < config.var_spectral_radius:
                return a
            a = a * (config.var_spectral_radius / radius) * 0.999
    raise GenerationError(
        f"no stable coefficient matrix found after {_MAX_REDRAWS} redraws"
    )


def simulate_var(
    adjacency: Adjacency,
    config: SimulationConfig,
    coefficients: np.ndarray | None = None,
) -> TimeSeriesDataset:
    """Generate a VAR dataset.

    ``coefficients`` overrides the drawn matrix (its support is not checked
    against the adjacency; callers use this for controlled dynamics).
    """
    if config.system != "var":
        raise InvalidConfigError(f"config.system is {config.system!r}, expected 'var'")
    a = draw_coefficients(adjacency, config) if coefficients is None else np.asarray(
        coefficients, dtype=np.float64
    )
    k = adjacency.n_nodes
    length = config.resolved_n_steps
    order = config.var_order
    n = config.n_samples
    y_init = np.empty((n, order, k))
    noise = np.zeros((n, k, length))
    for idx, rng in enumerate(sample_streams(config.seed, n)):
        y_init[idx] = rng.normal(size=(order, k))
        if config.var_noise_prob > 0:
            noisy = rng.random((k, length)) < config.var_noise_prob
            noise[idx] = noisy * rng.normal(scale=config.var_noise_scale, size=(k, length))
    series = var_recursion(y_init, a, order, length)
    samples = (series + noise).astype(np.float32)
    return TimeSeriesDataset(
        samples=samples,
        observed_mask=np.ones_like(samples, dtype=np.uint8),
        adjacency=adjacency,
        system="var",
        seed=config.seed,
        meta={
            "var_order": order,
            "coefficients": a.tolist(),
            "noise_prob": config.var_noise_prob,
            "noise_scale": config.var_noise_scale,
        },
    )
