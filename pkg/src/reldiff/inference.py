"""Relational inference with a trained model.

Each node in turn becomes the imputation target; random sections of its
series are re-imputed through the full reverse chain while the edge module's
sampled existence bits are accumulated into a score matrix (row k holds
incoming-edge scores for node k).  Scores are thresholded with the network
density prior, either per row or over the whole matrix.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
import torch
from scipy.stats import rankdata

from .dataset import TimeSeriesDataset
from .errors import InvalidConfigError, UndefinedMetricError
from .masking import generate_masks
from .model import RelationalDiffusionModel

# Sub-stream tag separating inference draws from training streams.
_INFER_STREAM = 3


@dataclass
class InferenceResult:
    score_matrix: np.ndarray  # (K, K) float64, diagonal zero
    adjacency_pred: np.ndarray  # (K, K) uint8
    n_reverse_steps: int
    n_repeats: int
    n_samples: int
    metrics: dict[str, float] = field(default_factory=dict)

    @property
    def normalization(self) -> int:
        return self.n_reverse_steps * self.n_repeats * self.n_samples


def _off_diagonal(k: int) -> tuple[np.ndarray, np.ndarray]:
    idx = ~np.eye(k, dtype=bool)
    return np.nonzero(idx)


def infer_scores(
    model: RelationalDiffusionModel,
    dataset: TimeSeriesDataset,
    n_repeats: int = 10,
    mask_ratio: float = 0.5,
    seed: int = 0,
    chunk_size: int = 256,
) -> np.ndarray:
    """Accumulated edge-existence counts, shape (K, K), row = target node.

    Every (sample, repeat) pair draws a fresh imputation mask on the target
    row and runs the full reverse chain; each reverse step contributes the
    sampled existence bits.  Entries are bounded by
    n_reverse_steps * n_repeats * n_samples.
    """
    values = dataset.model_samples
    observed = dataset.model_observed_mask
    n, k, length = values.shape
    rng = np.random.default_rng(np.random.SeedSequence((seed, _INFER_STREAM)))
    scores = np.zeros((k, k), dtype=np.float64)
    model.eval()
    for node in range(k):
        stacked_values = np.repeat(values, n_repeats, axis=0)
        stacked_observed = np.repeat(observed, n_repeats, axis=0)
        masks = generate_masks(
            stacked_observed,
            mode="imputation",
            mask_ratio=mask_ratio,
            rng=rng,
            target_nodes=np.full(n * n_repeats, node),
        )
        for lo in range(0, n * n_repeats, chunk_size):
            hi = min(lo + chunk_size, n * n_repeats)
            values_t = torch.as_tensor(stacked_values[lo:hi], dtype=torch.float32)
            cond_t = torch.as_tensor(masks.conditional[lo:hi], dtype=torch.float32)
            target_t = torch.as_tensor(masks.target[lo:hi], dtype=torch.float32)
            node_t = torch.as_tensor(masks.target_node[lo:hi], dtype=torch.long)
            _, counts = model.reverse_impute(
                values_t, cond_t, target_t, node_t, rng, collect_edges=True
            )
            scores[node] += counts.sum(dim=0).numpy()
    scores[np.arange(k), np.arange(k)] = 0.0
    return scores


def binarize(
    score_matrix: np.ndarray, rho: float, scope: str = "row"
) -> np.ndarray:
    """Select top-scoring candidate edges at the density prior.

    'row' keeps the round(rho * (K-1)) best incoming edges per target row;
    'global' keeps the round(rho * K * (K-1)) best off-diagonal entries
    overall.  Ties break toward the lower (row, column) index.
    """
    if not 0 < rho <= 1:
        raise InvalidConfigError("rho must lie in (0, 1]")
    if scope not in ("row", "global"):
        raise InvalidConfigError("scope must be 'row' or 'global'")
    scores = np.asarray(score_matrix, dtype=np.float64)
    k = scores.shape[0]
    pred = np.zeros((k, k), dtype=np.uint8)
    if scope == "row":
        n_keep = int(np.floor(rho * (k - 1) + 0.5))
        for row in range(k):
            cols = np.array([c for c in range(k) if c != row])
            order = sorted(cols, key=lambda c: (-scores[row, c], c))
            pred[row, order[:n_keep]] = 1
    else:
        rows, cols = _off_diagonal(k)
        n_keep = int(np.floor(rho * k * (k - 1) + 0.5))
        order = sorted(
            range(rows.size), key=lambda i: (-scores[rows[i], cols[i]], rows[i], cols[i])
        )
        keep = order[:n_keep]
        pred[rows[keep], cols[keep]] = 1
    return pred


def accuracy(adjacency_pred: np.ndarray, truth: np.ndarray, mode: str = "directed") -> float:
    """Percent of matching off-diagonal pairs (ordered or unordered)."""
    pred = np.asarray(adjacency_pred)
    truth = np.asarray(truth)
    if pred.shape != truth.shape or pred.ndim != 2 or pred.shape[0] != pred.shape[1]:
        raise InvalidConfigError("prediction and truth must be equal square matrices")
    if mode not in ("directed", "symmetrized"):
        raise InvalidConfigError("mode must be 'directed' or 'symmetrized'")
    k = pred.shape[0]
    if mode == "symmetrized":
        pred = np.maximum(pred, pred.T)
        truth = np.maximum(truth, truth.T)
        iu = np.triu_indices(k, 1)
        return float((pred[iu] == truth[iu]).mean() * 100.0)
    rows, cols = _off_diagonal(k)
    return float((pred[rows, cols] == truth[rows, cols]).mean() * 100.0)


def auroc(score_matrix: np.ndarray, truth: np.ndarray) -> float:
    """Rank-based AUROC over ordered off-diagonal pairs; ties count 0.5."""
    scores = np.asarray(score_matrix, dtype=np.float64)
    labels = np.asarray(truth)
    rows, cols = _off_diagonal(scores.shape[0])
    s = scores[rows, cols]
    y = labels[rows, cols].astype(bool)
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise UndefinedMetricError("AUROC undefined: labels are single-class")
    ranks = rankdata(s)  # average ranks on ties
    return float((ranks[y].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def imputation_errors(
    predicted: np.ndarray, truth: np.ndarray, mask: np.ndarray
) -> tuple[float, float]:
    """(RMSE, MAE) over masked entries only."""
    mask = np.asarray(mask, dtype=bool)
    if mask.sum() == 0:
        raise UndefinedMetricError("no evaluation points")
    diff = (np.asarray(predicted) - np.asarray(truth))[mask]
    return float(np.sqrt(np.mean(diff**2))), float(np.mean(np.abs(diff)))


def impute_metrics(
    model: RelationalDiffusionModel,
    dataset: TimeSeriesDataset,
    eval_mask_ratio: float = 0.5,
    seed: int = 0,
    chunk_size: int = 256,
) -> tuple[float, float]:
    """Hold out observed points of each row in turn, re-impute them through
    the reverse chain and report (RMSE, MAE) over the held-out points."""
    values = dataset.model_samples
    observed = dataset.model_observed_mask
    n, k, _ = values.shape
    rng = np.random.default_rng(np.random.SeedSequence((seed, _INFER_STREAM, 1)))
    model.eval()
    sq_sum = 0.0
    abs_sum = 0.0
    count = 0
    for node in range(k):
        masks = generate_masks(
            observed,
            mode="imputation",
            mask_ratio=eval_mask_ratio,
            rng=rng,
            target_nodes=np.full(n, node),
        )
        for lo in range(0, n, chunk_size):
            hi = min(lo + chunk_size, n)
            values_t = torch.as_tensor(values[lo:hi], dtype=torch.float32)
            cond_t = torch.as_tensor(masks.conditional[lo:hi], dtype=torch.float32)
            target_t = torch.as_tensor(masks.target[lo:hi], dtype=torch.float32)
            node_t = torch.as_tensor(masks.target_node[lo:hi], dtype=torch.long)
            imputed, _ = model.reverse_impute(values_t, cond_t, target_t, node_t, rng)
            hold = masks.target[lo:hi].astype(bool)
            diff = (imputed.numpy() - values[lo:hi])[hold]
            sq_sum += float((diff**2).sum())
            abs_sum += float(np.abs(diff).sum())
            count += int(hold.sum())
    if count == 0:
        raise UndefinedMetricError("no evaluation points")
    return float(np.sqrt(sq_sum / count)), float(abs_sum / count)


def evaluate(
    score_matrix: np.ndarray,
    truth: np.ndarray,
    rho: float,
    scope: str = "global",
    mode: str = "directed",
) -> dict[str, float]:
    """Binarize scores and bundle the standard metrics."""
    pred = binarize(score_matrix, rho, scope=scope)
    out = {"accuracy": accuracy(pred, truth, mode=mode)}
    try:
        out["auroc"] = auroc(score_matrix, truth)
    except UndefinedMetricError:
        out["auroc"] = float("nan")
    return out
