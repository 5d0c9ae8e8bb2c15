"""Core dataset types: adjacency, multivariate series batches, splits,
missing-data injection.

All samples in one dataset share a single ground-truth graph (transductive
setting).  Multidimensional systems (the 2D spring model) store one row per
coordinate; :attr:`TimeSeriesDataset.model_samples` exposes the per-entity
view with coordinates concatenated along time, which is what the model
consumes.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from typing import Any

import numpy as np

from .errors import InvalidConfigError


@dataclass(frozen=True)
class Adjacency:
    """Binary interaction graph over ``n_nodes`` entities.

    ``edges[i, j] == 1`` means node j influences node i.  The diagonal is
    always zero; undirected graphs are stored symmetrically.
    """

    n_nodes: int
    edges: np.ndarray  # (K, K) uint8
    directed: bool = False

    def __post_init__(self) -> None:
        edges = np.ascontiguousarray(np.asarray(self.edges, dtype=np.uint8))
        object.__setattr__(self, "edges", edges)
        if edges.shape != (self.n_nodes, self.n_nodes):
            raise InvalidConfigError(
                f"adjacency shape {edges.shape} does not match n_nodes={self.n_nodes}"
            )
        if not np.isin(edges, (0, 1)).all():
            raise InvalidConfigError("adjacency entries must be 0 or 1")
        if np.trace(edges) != 0:
            raise InvalidConfigError("adjacency diagonal must be zero")
        if not self.directed and not np.array_equal(edges, edges.T):
            raise InvalidConfigError("undirected adjacency must be symmetric")

    @property
    def n_edges(self) -> int:
        """Number of directed (ordered-pair) edges."""
        return int(self.edges.sum())

    @property
    def density(self) -> float:
        """Fraction of realized ordered pairs among all K(K-1) possible."""
        return self.n_edges / (self.n_nodes * (self.n_nodes - 1))

    def degrees(self) -> np.ndarray:
        """Incoming degree per node (row sums)."""
        return self.edges.sum(axis=1).astype(np.int64)

    def symmetrized(self) -> "Adjacency":
        sym = np.maximum(self.edges, self.edges.T)
        return Adjacency(self.n_nodes, sym, directed=False)


@dataclass
class TimeSeriesDataset:
    """A batch of multivariate series with observation masks and ground truth.

    ``samples`` has shape (N, R, L) where R = n_entities * rows_per_entity.
    For scalar systems rows_per_entity is 1 and R equals the number of graph
    nodes; the 2D spring system stores 2 rows (x, y) per particle.
    """

    samples: np.ndarray  # (N, R, L) float32
    observed_mask: np.ndarray  # (N, R, L) uint8
    adjacency: Adjacency
    system: str = "unknown"
    seed: int | None = None
    rows_per_entity: int = 1
    split: str | None = None
    split_sizes: tuple[int, int, int] | None = None
    meta: dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        self.samples = np.ascontiguousarray(self.samples, dtype=np.float32)
        self.observed_mask = np.ascontiguousarray(self.observed_mask, dtype=np.uint8)
        if self.samples.ndim != 3:
            raise InvalidConfigError("samples must have shape (N, R, L)")
        if self.samples.shape != self.observed_mask.shape:
            raise InvalidConfigError("samples and observed_mask shapes differ")
        n_rows = self.samples.shape[1]
        if n_rows != self.adjacency.n_nodes * self.rows_per_entity:
            raise InvalidConfigError(
                f"{n_rows} rows inconsistent with n_nodes={self.adjacency.n_nodes} "
                f"x rows_per_entity={self.rows_per_entity}"
            )
        if not np.isfinite(self.samples).all():
            raise InvalidConfigError("samples contain non-finite values")
        if not np.isin(self.observed_mask, (0, 1)).all():
            raise InvalidConfigError("observed_mask entries must be 0 or 1")

    @property
    def n_samples(self) -> int:
        return self.samples.shape[0]

    @property
    def n_nodes(self) -> int:
        return self.adjacency.n_nodes

    @property
    def series_length(self) -> int:
        return self.samples.shape[2]

    @property
    def model_samples(self) -> np.ndarray:
        """(N, K, rows_per_entity * L) view with coordinates joined along time."""
        n, _, length = self.samples.shape
        return self.samples.reshape(n, self.n_nodes, self.rows_per_entity * length)

    @property
    def model_observed_mask(self) -> np.ndarray:
        n, _, length = self.observed_mask.shape
        return self.observed_mask.reshape(
            n, self.n_nodes, self.rows_per_entity * length
        )

    def take(self, indices: np.ndarray, split: str | None = None) -> "TimeSeriesDataset":
        return replace(
            self,
            samples=self.samples[indices],
            observed_mask=self.observed_mask[indices],
            split=split if split is not None else self.split,
            split_sizes=None,
        )

    def subset(self, name: str) -> "TimeSeriesDataset":
        """Return the train/val/test block recorded in ``split_sizes``.

        Samples are stored in split order (train block first).
        """
        if self.split_sizes is None:
            raise InvalidConfigError("dataset carries no split boundaries")
        names = ("train", "val", "test")
        if name not in names:
            raise InvalidConfigError(f"unknown split {name!r}")
        bounds = np.cumsum((0,) + tuple(self.split_sizes))
        i = names.index(name)
        return self.take(np.arange(bounds[i], bounds[i + 1]), split=name)


def split_dataset(
    dataset: TimeSeriesDataset,
    fractions: tuple[float, float, float],
    seed: int,
) -> tuple[TimeSeriesDataset, TimeSeriesDataset, TimeSeriesDataset]:
    """Partition samples into disjoint train/val/test subsets.

    Sizes are floor(fraction * N) with the remainder assigned to train, so the
    subsets always cover every sample exactly once.  The shuffle is drawn from
    ``default_rng(seed)`` and is therefore reproducible.
    """
    if len(fractions) != 3:
        raise InvalidConfigError("fractions must be a (train, val, test) triple")
    if any(f < 0 for f in fractions):
        raise InvalidConfigError("fractions must be non-negative")
    if abs(sum(fractions) - 1.0) > 1e-9:
        raise InvalidConfigError("fractions must sum to 1")
    n = dataset.n_samples
    sizes = [int(np.floor(f * n)) for f in fractions]
    sizes[0] += n - sum(sizes)
    rng = np.random.default_rng(seed)
    order = rng.permutation(n)
    bounds = np.cumsum([0] + sizes)
    parts = []
    for name, lo, hi in zip(("train", "val", "test"), bounds[:-1], bounds[1:]):
        parts.append(dataset.take(order[lo:hi], split=name))
    return parts[0], parts[1], parts[2]


def with_split_order(
    dataset: TimeSeriesDataset, fractions: tuple[float, float, float], seed: int
) -> TimeSeriesDataset:
    """Reorder samples into train/val/test blocks and record the boundaries."""
    train, val, test = split_dataset(dataset, fractions, seed)
    merged = replace(
        dataset,
        samples=np.concatenate([train.samples, val.samples, test.samples]),
        observed_mask=np.concatenate(
            [train.observed_mask, val.observed_mask, test.observed_mask]
        ),
        split=None,
        split_sizes=(train.n_samples, val.n_samples, test.n_samples),
    )
    return merged


def inject_missing(
    dataset: TimeSeriesDataset, missing_ratio: float, seed: int
) -> TimeSeriesDataset:
    """Remove observations uniformly at random before any training.

    Per sample, exactly round((1 - missing_ratio) * R * L) grid positions stay
    observed (counting from a fully observed sample; positions already missing
    can only stay missing).  Values at missing positions are zeroed.
    """
    if not 0 <= missing_ratio < 1:
        raise InvalidConfigError("missing_ratio must lie in [0, 1)")
    if missing_ratio == 0:
        return replace(dataset)
    n, rows, length = dataset.samples.shape
    cells = rows * length
    n_keep = int(np.floor((1.0 - missing_ratio) * cells + 0.5))
    rng = np.random.default_rng(seed)
    keep = np.zeros((n, cells), dtype=np.uint8)
    for i in range(n):
        kept = rng.permutation(cells)[:n_keep]
        keep[i, kept] = 1
    keep = keep.reshape(n, rows, length)
    new_mask = dataset.observed_mask & keep
    new_samples = dataset.samples * new_mask
    return replace(dataset, samples=new_samples, observed_mask=new_mask)
