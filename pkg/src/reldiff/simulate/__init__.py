"""Ground-truth graph sampling and dynamical-system dataset generation."""

from .config import SimulationConfig
from .graphs import sample_graph
from .kuramoto import simulate_kuramoto
from .netsim import convert_netsim_csv, load_external
from .spring import simulate_spring
from .var import simulate_var

__all__ = [
    "SimulationConfig",
    "sample_graph",
    "simulate_kuramoto",
    "simulate_spring",
    "simulate_var",
    "load_external",
    "convert_netsim_csv",
]
