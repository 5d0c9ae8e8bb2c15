"""Closed-form diffusion arithmetic: noise schedule, forward corruption and
the reverse-step update.

Schedules follow the quadratic convention (linear interpolation between
sqrt(beta_start) and sqrt(beta_end), then squared); a plain linear schedule
is available for ablation.  sigma_t is the posterior standard deviation
sqrt(((1 - abar_{t-1}) / (1 - abar_t)) * beta_t) with abar_0 := 1, which
makes the final reverse step to x_0 noiseless.

Steps t are 1-indexed (t in [1, T]); schedule arrays store index t-1.
Arithmetic is float32; tests check invariants against float64 references.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError

SCHEDULE_KINDS = ("quadratic", "linear")


@dataclass(frozen=True)
class DiffusionSchedule:
    n_steps: int
    beta: np.ndarray  # (T,) float32
    alpha_cum: np.ndarray  # (T,) float32, cumulative product of (1 - beta)
    sigma: np.ndarray  # (T,) float32

    def __post_init__(self) -> None:
        for name in ("beta", "alpha_cum", "sigma"):
            arr = np.ascontiguousarray(getattr(self, name), dtype=np.float32)
            object.__setattr__(self, name, arr)
            if arr.shape != (self.n_steps,):
                raise InvalidConfigError(f"{name} must have shape ({self.n_steps},)")


def build_schedule(
    n_steps: int,
    beta_start: float = 0.0001,
    beta_end: float = 0.5,
    kind: str = "quadratic",
) -> DiffusionSchedule:
    if n_steps < 1:
        raise InvalidConfigError("n_steps must be at least 1")
    if not 0 < beta_start < beta_end < 1:
        raise InvalidConfigError("need 0 < beta_start < beta_end < 1")
    if kind not in SCHEDULE_KINDS:
        raise InvalidConfigError(f"kind must be one of {SCHEDULE_KINDS}")
    if n_steps == 1:
        beta = np.array([beta_end], dtype=np.float64)
    elif kind == "quadratic":
        beta = np.linspace(beta_start**0.5, beta_end**0.5, n_steps) ** 2
    else:
        beta = np.linspace(beta_start, beta_end, n_steps)
    alpha_cum = np.cumprod(1.0 - beta)
    alpha_cum_prev = np.concatenate(([1.0], alpha_cum[:-1]))
    sigma = np.sqrt((1.0 - alpha_cum_prev) / (1.0 - alpha_cum) * beta)
    return DiffusionSchedule(
        n_steps=n_steps,
        beta=beta.astype(np.float32),
        alpha_cum=alpha_cum.astype(np.float32),
        sigma=sigma.astype(np.float32),
    )


def _check_t(t: int, schedule: DiffusionSchedule) -> int:
    if not 1 <= t <= schedule.n_steps:
        raise IndexError(f"diffusion step {t} outside [1, {schedule.n_steps}]")
    return t - 1


def forward_sample(x0, t: int, eps, schedule: DiffusionSchedule):
    """x_t = sqrt(abar_t) x_0 + sqrt(1 - abar_t) eps.

    Works on NumPy arrays and torch tensors alike (coefficients are scalars).
    """
    i = _check_t(t, schedule)
    abar = float(schedule.alpha_cum[i])
    return (abar**0.5) * x0 + ((1.0 - abar) ** 0.5) * eps


def reverse_step(x_t, eps_hat, t: int, schedule: DiffusionSchedule, z=None):
    """One reverse update from x_t to x_{t-1}.

    x_{t-1} = (x_t - beta_t / sqrt(1 - abar_t) * eps_hat) / sqrt(1 - beta_t)
              + sigma_t * z

    z is ignored at t = 1 (the final step is deterministic).
    """
    i = _check_t(t, schedule)
    beta = float(schedule.beta[i])
    abar = float(schedule.alpha_cum[i])
    mean = (x_t - (beta / (1.0 - abar) ** 0.5) * eps_hat) / ((1.0 - beta) ** 0.5)
    if t == 1 or z is None:
        return mean
    return mean + float(schedule.sigma[i]) * z
