"""Ingestion of externally generated data (fMRI-style simulations).

The upstream distribution ships MATLAB containers; this package consumes the
repository container format instead.  ``convert_netsim_csv`` turns a pair of
CSV exports into a container once:

* series CSV: (n_samples * series_length) rows x n_nodes columns, samples
  stacked vertically in order (the upstream export layout);
* network CSV: n_nodes x n_nodes, nonzero entry (i, j) meaning i -> j.

The converted container carries the directed ground-truth adjacency;
evaluation for this data ignores directions by default.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from .. import container
from ..dataset import Adjacency, TimeSeriesDataset
from ..errors import CorruptContainerError


def load_external(path: str | Path) -> TimeSeriesDataset:
    """Load a dataset container produced elsewhere (e.g. converted exports)."""
    return container.load(path)


def convert_netsim_csv(
    series_csv: str | Path,
    network_csv: str | Path,
    out_path: str | Path,
    n_samples: int,
    series_length: int,
    system: str = "netsim",
) -> TimeSeriesDataset:
    """One-shot conversion from CSV exports into the container format."""
    series = np.loadtxt(series_csv, delimiter=",", ndmin=2)
    net = np.loadtxt(network_csv, delimiter=",", ndmin=2)
    n_nodes = net.shape[0]
    if net.shape != (n_nodes, n_nodes):
        raise CorruptContainerError(f"network CSV is not square: {net.shape}")
    if series.shape != (n_samples * series_length, n_nodes):
        raise CorruptContainerError(
            f"series CSV shape {series.shape} != ({n_samples * series_length}, {n_nodes})"
        )
    # upstream convention: entry (i, j) != 0 means i -> j; our rows hold
    # incoming edges, so transpose.  The diagonal (self-dependence) is dropped.
    edges = (np.abs(net.T) > 0).astype(np.uint8)
    np.fill_diagonal(edges, 0)
    samples = (
        series.reshape(n_samples, series_length, n_nodes)
        .transpose(0, 2, 1)
        .astype(np.float32)
    )
    dataset = TimeSeriesDataset(
        samples=samples,
        observed_mask=np.ones_like(samples, dtype=np.uint8),
        adjacency=Adjacency(n_nodes, edges, directed=True),
        system=system,
        seed=None,
        split_sizes=(n_samples, 0, 0),
    )
    container.save(dataset, out_path)
    return dataset
