"""Conditional/target mask generation.

Each batch item gets one target node; a fraction of that node's observed
points becomes the imputation (or prediction) target while every other
observed point stays conditional.  Conditional and target masks are disjoint
by construction and cover the observed mask exactly on the target row.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConfigError, MaskGenerationError

MODES = ("imputation", "prediction")


@dataclass
class MaskPair:
    """Disjoint conditional/target masks plus the chosen target node per item."""

    conditional: np.ndarray  # (B, K, L) uint8
    target: np.ndarray  # (B, K, L) uint8
    target_node: np.ndarray  # (B,) int64
    mode: str


def generate_masks(
    observed_mask: np.ndarray,
    mode: str = "imputation",
    mask_ratio: float = 0.5,
    rng: np.random.Generator | None = None,
    target_nodes: np.ndarray | None = None,
) -> MaskPair:
    """Split observed points into conditional and target sets per batch item.

    imputation mode: floor(observed_row_sum * mask_ratio) observed points of
    the target row, chosen uniformly, become targets.  prediction mode: the
    same count, but the *last* observed points of the row in temporal order.

    ``target_nodes`` pins the target node per item (used at inference time);
    otherwise nodes are drawn uniformly, resampling rows with no observations
    and failing after K attempts.
    """
    if mode not in MODES:
        raise InvalidConfigError(f"mode must be one of {MODES}, got {mode!r}")
    if not 0 < mask_ratio < 1:
        raise InvalidConfigError("mask_ratio must lie in (0, 1)")
    observed = np.asarray(observed_mask)
    if observed.ndim != 3:
        raise InvalidConfigError("observed_mask must have shape (B, K, L)")
    if not np.isin(observed, (0, 1)).all():
        raise InvalidConfigError("observed_mask entries must be 0 or 1")
    if rng is None:
        rng = np.random.default_rng()

    b, k, _ = observed.shape
    conditional = (observed != 0).astype(np.uint8)
    target = np.zeros_like(conditional)
    chosen = np.empty(b, dtype=np.int64)

    for i in range(b):
        if target_nodes is not None:
            node = int(target_nodes[i] if np.ndim(target_nodes) else target_nodes)
            if observed[i, node].sum() == 0:
                raise MaskGenerationError(
                    f"target row {node} of item {i} has no observed points"
                )
        else:
            node = -1
            for _ in range(k):
                candidate = int(rng.integers(0, k))
                if observed[i, candidate].sum() > 0:
                    node = candidate
                    break
            if node < 0:
                raise MaskGenerationError(
                    f"item {i}: no observed row found after {k} attempts"
                )
        chosen[i] = node
        obs_idx = np.flatnonzero(observed[i, node])
        n_masked = int(np.floor(obs_idx.size * mask_ratio))
        if mode == "imputation":
            picked = rng.permutation(obs_idx.size)[:n_masked]
            masked_idx = obs_idx[picked]
        else:
            masked_idx = obs_idx[obs_idx.size - n_masked :]
        conditional[i, node, masked_idx] = 0
        target[i, node, masked_idx] = 1

    return MaskPair(conditional=conditional, target=target, target_node=chosen, mode=mode)
