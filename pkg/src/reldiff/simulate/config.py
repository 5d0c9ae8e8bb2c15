"""Simulation configuration shared by all generators."""

from __future__ import annotations

from dataclasses import dataclass, field

from ..errors import InvalidConfigError

SYSTEMS = ("kuramoto", "spring", "var")


@dataclass(frozen=True)
class SimulationConfig:
    """Parameters of one synthetic dataset.

    Per-sample quantities (initial conditions, natural frequencies, noise)
    are drawn from counter-based streams derived from (seed, sample index),
    so samples can be generated in any order or in parallel.
    """

    system: str
    n_nodes: int = 5
    n_steps: int | None = None
    n_samples: int = 700
    dt: float = 0.05
    seed: int = 0
    # kuramoto
    coupling_strength: float = 1.0
    omega_range: tuple[float, float] = (2.0, 10.0)
    # spring
    spring_constant: float = 0.1
    spring_substep_dt: float = 0.001
    spring_record_every: int = 100
    init_scale: float = 0.5
    # var
    var_order: int = 2
    var_noise_prob: float = 0.1
    var_noise_scale: float = 0.1
    var_coef_range: tuple[float, float] = (0.1, 0.5)
    var_spectral_radius: float = 0.95
    meta: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.system not in SYSTEMS:
            raise InvalidConfigError(f"system must be one of {SYSTEMS}")
        if self.n_nodes < 2:
            raise InvalidConfigError("n_nodes must be at least 2")
        if self.n_steps is not None and self.n_steps < 2:
            raise InvalidConfigError("n_steps must be at least 2")
        if self.n_samples < 1:
            raise InvalidConfigError("n_samples must be positive")
        if self.dt <= 0:
            raise InvalidConfigError("dt must be positive")
        if self.omega_range[0] >= self.omega_range[1]:
            raise InvalidConfigError("omega_range lower bound must be below upper")
        if self.var_order < 1:
            raise InvalidConfigError("var_order must be positive")
        if not 0 <= self.var_noise_prob <= 1:
            raise InvalidConfigError("var_noise_prob must lie in [0, 1]")

    @property
    def resolved_n_steps(self) -> int:
        """Series length; defaults to 49 for spring trajectories, else 100."""
        if self.n_steps is not None:
            return self.n_steps
        return 49 if self.system == "spring" else 100
