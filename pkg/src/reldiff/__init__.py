"""Relational inference for interacting dynamical systems via conditional
diffusion imputation.

The package trains a conditional diffusion model to impute masked sections of
one time series given the others, letting a discrete edge-sampling module
decide which series are allowed to pass through unperturbed.  Accumulated edge
samples drawn during reverse diffusion yield scores for the latent interaction
graph.
"""

__version__ = "0.1.0"

from .dataset import Adjacency, TimeSeriesDataset, inject_missing, split_dataset
from .diffusion import DiffusionSchedule, build_schedule, forward_sample, reverse_step
from .errors import (
    CorruptContainerError,
    GenerationError,
    InvalidConfigError,
    ReldiffError,
    TrainingDivergedError,
    UndefinedMetricError,
    UnsupportedVersionError,
)
from .masking import MaskPair, generate_masks

__all__ = [
    "Adjacency",
    "TimeSeriesDataset",
    "inject_missing",
    "split_dataset",
    "DiffusionSchedule",
    "build_schedule",
    "forward_sample",
    "reverse_step",
    "MaskPair",
    "generate_masks",
    "ReldiffError",
    "InvalidConfigError",
    "CorruptContainerError",
    "UnsupportedVersionError",
    "GenerationError",
    "TrainingDivergedError",
    "UndefinedMetricError",
]
