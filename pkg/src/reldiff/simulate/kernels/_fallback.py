"""Pure NumPy reference kernels.

These mirror the compiled kernels loop-for-loop (vectorized over the sample
axis) so both backends perform the same float64 operations in the same
order.
"""

from __future__ import annotations

import numpy as np


def _kuramoto_deriv(theta: np.ndarray, omega: np.ndarray, w: np.ndarray, coef: np.ndarray) -> np.ndarray:
    # theta, omega: (N, K); w: (K, K); coef: (K,) = coupling / degree (0 if isolated)
    n, k = theta.shape
    d = omega.copy()
    for i in range(k):
        if coef[i] == 0.0:
            continue
        acc = np.zeros(n)
        for j in range(k):
            if w[i, j] != 0.0:
                acc += w[i, j] * np.sin(theta[:, j] - theta[:, i])
        d[:, i] += coef[i] * acc
    return d


def kuramoto_rk4(
    theta0: np.ndarray,
    omega: np.ndarray,
    weights: np.ndarray,
    coef: np.ndarray,
    dt: float,
    n_record: int,
) -> np.ndarray:
    """Fixed-step RK4 phase integration; records the state at t = j*dt."""
    theta0 = np.asarray(theta0, dtype=np.float64)
    omega = np.asarray(omega, dtype=np.float64)
    weights = np.asarray(weights, dtype=np.float64)
    coef = np.asarray(coef, dtype=np.float64)
    n, k = theta0.shape
    out = np.empty((n, n_record, k), dtype=np.float64)
    theta = theta0.copy()
    out[:, 0] = theta
    for step in range(1, n_record):
        k1 = _kuramoto_deriv(theta, omega, weights, coef)
        k2 = _kuramoto_deriv(theta + 0.5 * dt * k1, omega, weights, coef)
        k3 = _kuramoto_deriv(theta + 0.5 * dt * k2, omega, weights, coef)
        k4 = _kuramoto_deriv(theta + dt * k3, omega, weights, coef)
        theta = theta + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        out[:, step] = theta
    return out


def _spring_accel(pos: np.ndarray, w: np.ndarray, k_spring: float) -> np.ndarray:
    # pos: (N, P, 2); Hooke force with zero rest length, unit mass:
    # a_i = -k * sum_j w_ij (r_i - r_j)
    n, p, _ = pos.shape
    acc = np.zeros_like(pos)
    for i in range(p):
        for j in range(p):
            if w[i, j] != 0.0:
                acc[:, i] += (-k_spring * w[i, j]) * (pos[:, i] - pos[:, j])
    return acc


def spring_leapfrog(
    pos0: np.ndarray,
    vel0: np.ndarray,
    weights: np.ndarray,
    k_spring: float,
    dt: float,
    n_record: int,
    record_every: int,
) -> np.ndarray:
    """Velocity-Verlet integration; records positions every ``record_every`` substeps."""
    pos = np.asarray(pos0, dtype=np.float64).copy()
    vel = np.asarray(vel0, dtype=np.float64).copy()
    weights = np.asarray(weights, dtype=np.float64)
    n, p, _ = pos.shape
    out = np.empty((n, n_record, p, 2), dtype=np.float64)
    out[:, 0] = pos
    acc = _spring_accel(pos, weights, k_spring)
    for rec in range(1, n_record):
        for _ in range(record_every):
            vel = vel + 0.5 * dt * acc
            pos = pos + dt * vel
            acc = _spring_accel(pos, weights, k_spring)
            vel = vel + 0.5 * dt * acc
        out[:, rec] = pos
    return out


def var_recursion(
    y_init: np.ndarray, a: np.ndarray, order: int, n_steps: int
) -> np.ndarray:
    """Shared-coefficient vector autoregression: y_t = sum_p A y_{t-p}."""
    y_init = np.asarray(y_init, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    n, p0, k = y_init.shape
    y = np.zeros((n, n_steps, k), dtype=np.float64)
    y[:, :order] = y_init[:, :order]
    for t in range(order, n_steps):
        acc = np.zeros((n, k))
        for p in range(1, order + 1):
            for i in range(k):
                row = np.zeros(n)
                for j in range(k):
                    if a[i, j] != 0.0:
                        row += a[i, j] * y[:, t - p, j]
                acc[:, i] += row
        y[:, t] = acc
    return np.ascontiguousarray(y.transpose(0, 2, 1))
