"""Joint optimization of the denoiser and edge predictor.

Masks are regenerated fresh every step; each item draws its own target node
and diffusion step.  Validation runs on a frozen RNG stream so successive
validation losses are comparable, uses the denoise term only, and drives
early stopping.  All randomness flows from a single NumPy generator whose
state is checkpointed, so interrupted runs resume exactly.
"""

from __future__ import annotations

import copy
import json
import logging
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any

import numpy as np
import torch

from .checkpoint import build_model, load_checkpoint, restore_optimizer, save_checkpoint
from .dataset import TimeSeriesDataset
from .errors import InvalidConfigError, TrainingDivergedError
from .masking import generate_masks
from .model import RelationalDiffusionModel

logger = logging.getLogger(__name__)

# Sub-stream tags for deriving independent generators from the train seed.
_TRAIN_STREAM = 1
_VAL_STREAM = 2


@dataclass(frozen=True)
class TrainConfig:
    lr: float = 0.0005
    batch_size: int = 16
    max_epochs: int = 2000
    lambda1: float = 0.01
    rho: float | None = None  # None: use the true-graph density
    patience: int = 10
    val_interval: int = 25
    weight_decay: float = 1e-6
    seed: int = 0
    mask_ratio: float = 0.5
    mode: str = "imputation"
    grad_clip: float | None = 1.0
    lr_decay_milestones: tuple[float, float] = (0.75, 0.9)
    lr_decay_factor: float = 0.5

    def __post_init__(self) -> None:
        if self.lr <= 0 or self.batch_size < 1 or self.max_epochs < 1:
            raise InvalidConfigError("lr, batch_size and max_epochs must be positive")
        if self.lambda1 < 0:
            raise InvalidConfigError("lambda1 must be non-negative")
        if self.rho is not None and not 0 < self.rho <= 1:
            raise InvalidConfigError("rho must lie in (0, 1]")
        if self.patience < 1 or self.val_interval < 1:
            raise InvalidConfigError("patience and val_interval must be positive")


def lr_for_epoch(config: TrainConfig, epoch: int) -> float:
    """Step decay: halve at each milestone fraction of max_epochs."""
    lr = config.lr
    for fraction in config.lr_decay_milestones:
        if epoch >= int(fraction * config.max_epochs):
            lr *= config.lr_decay_factor
    return lr


class EarlyStopper:
    """Stop after `patience` consecutive validations without improvement."""

    def __init__(self, patience: int):
        self.patience = patience
        self.best = float("inf")
        self.bad_count = 0

    def update(self, value: float) -> bool:
        if value < self.best:
            self.best = value
            self.bad_count = 0
            return True
        self.bad_count += 1
        return False

    @property
    def should_stop(self) -> bool:
        return self.bad_count >= self.patience


def compute_loss(
    model: RelationalDiffusionModel,
    values: np.ndarray,
    observed_mask: np.ndarray,
    config: TrainConfig,
    rng: np.random.Generator,
    rho: float,
) -> tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """(total, denoise term, regularization term) for one batch.

    Draw order per batch: masks and target nodes, then diffusion steps, then
    noise, then the Gumbel variables inside the edge module.
    """
    masks = generate_masks(
        observed_mask, mode=config.mode, mask_ratio=config.mask_ratio, rng=rng
    )
    if (masks.target.sum(axis=(1, 2)) == 0).any():
        logger.warning("batch contains items with an empty target mask; skipped")
    b = values.shape[0]
    t_np = rng.integers(1, model.schedule.n_steps + 1, size=b)
    eps_np = rng.standard_normal(values.shape).astype(np.float32)

    values_t = torch.as_tensor(values, dtype=torch.float32)
    cond_t = torch.as_tensor(masks.conditional, dtype=torch.float32)
    target_t = torch.as_tensor(masks.target, dtype=torch.float32)
    node_t = torch.as_tensor(masks.target_node, dtype=torch.long)
    t_t = torch.as_tensor(t_np, dtype=torch.long)
    eps_t = torch.as_tensor(eps_np)

    denoise, reg, _ = model.loss_terms(
        values_t, cond_t, target_t, node_t, t_t, eps_t, rho, rng
    )
    total = denoise + config.lambda1 * reg
    return total, denoise, reg


@dataclass
class FitResult:
    model: RelationalDiffusionModel
    history: list[dict[str, Any]] = field(default_factory=list)
    best_val: float = float("inf")
    stopped_epoch: int = 0
    checkpoint_path: Path | None = None


def _validation_loss(
    model: RelationalDiffusionModel,
    values: np.ndarray,
    observed: np.ndarray,
    config: TrainConfig,
    rho: float,
) -> float:
    """Denoise-only loss on a frozen stream (same draws every validation)."""
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, _VAL_STREAM)))
    model.eval()
    losses = []
    with torch.no_grad():
        for lo in range(0, values.shape[0], config.batch_size):
            hi = min(lo + config.batch_size, values.shape[0])
            _, denoise, _ = compute_loss(
                model, values[lo:hi], observed[lo:hi], config, rng, rho
            )
            losses.append(float(denoise) * (hi - lo))
    model.train()
    return float(np.sum(losses) / values.shape[0])


def fit(
    model: RelationalDiffusionModel,
    train_set: TimeSeriesDataset,
    val_set: TimeSeriesDataset,
    config: TrainConfig,
    run_dir: str | Path | None = None,
    resume_from: str | Path | None = None,
) -> FitResult:
    if val_set.n_samples == 0:
        raise InvalidConfigError("validation split is empty; training needs one")
    if train_set.n_samples == 0:
        raise InvalidConfigError("training split is empty")

    values = train_set.model_samples
    observed = train_set.model_observed_mask
    val_values = val_set.model_samples
    val_observed = val_set.model_observed_mask
    rho = config.rho if config.rho is not None else train_set.adjacency.density
    if not 0 < rho <= 1:
        raise InvalidConfigError(f"derived density prior {rho} outside (0, 1]")

    run_dir = Path(run_dir) if run_dir is not None else None
    if run_dir is not None:
        run_dir.mkdir(parents=True, exist_ok=True)
        metrics_path = run_dir / "metrics.jsonl"
    optimizer = torch.optim.Adam(
        model.parameters(), lr=config.lr, weight_decay=config.weight_decay
    )
    rng = np.random.default_rng(np.random.SeedSequence((config.seed, _TRAIN_STREAM)))
    stopper = EarlyStopper(config.patience)
    history: list[dict[str, Any]] = []
    start_epoch = 1
    best_state = None
    best_val = float("inf")

    if resume_from is not None:
        payload = load_checkpoint(resume_from)
        model = build_model(payload)
        optimizer = torch.optim.Adam(
            model.parameters(), lr=config.lr, weight_decay=config.weight_decay
        )
        restore_optimizer(payload, model, optimizer)
        extra = payload["extra"]
        rng.bit_generator.state = extra["rng_state"]
        start_epoch = extra["epoch"] + 1
        stopper.best = extra["stopper_best"]
        stopper.bad_count = extra["stopper_bad"]
        best_val = extra["best_val"]
        history = extra.get("history", [])

    model.train()
    n = values.shape[0]
    epoch = start_epoch - 1
    for epoch in range(start_epoch, config.max_epochs + 1):
        lr = lr_for_epoch(config, epoch)
        for group in optimizer.param_groups:
            group["lr"] = lr
        order = rng.permutation(n)
        denoise_sum = 0.0
        reg_sum = 0.0
        n_batches = 0
        for lo in range(0, n, config.batch_size):
            batch_idx = order[lo : lo + config.batch_size]
            total, denoise, reg = compute_loss(
                model, values[batch_idx], observed[batch_idx], config, rng, rho
            )
            if not torch.isfinite(total):
                if run_dir is not None:
                    save_checkpoint(
                        run_dir / "diverged.npz",
                        model,
                        optimizer,
                        epoch=epoch,
                        rng_state=rng.bit_generator.state,
                    )
                raise TrainingDivergedError(f"non-finite loss at epoch {epoch}")
            optimizer.zero_grad()
            total.backward()
            if config.grad_clip is not None:
                torch.nn.utils.clip_grad_norm_(model.parameters(), config.grad_clip)
            optimizer.step()
            denoise_sum += float(denoise.detach())
            reg_sum += float(reg.detach())
            n_batches += 1

        record = {
            "epoch": epoch,
            "train_denoise": denoise_sum / n_batches,
            "train_reg": reg_sum / n_batches,
            "lr": lr,
        }
        if epoch % config.val_interval == 0 or epoch == config.max_epochs:
            val_loss = _validation_loss(model, val_values, val_observed, config, rho)
            record["val_denoise"] = val_loss
            improved = stopper.update(val_loss)
            if improved:
                best_val = val_loss
                best_state = copy.deepcopy(model.state_dict())
            if run_dir is not None:
                with metrics_path.open("a") as fh:
                    fh.write(json.dumps(record) + "\n")
            history.append(record)
            if stopper.should_stop:
                break
        else:
            history.append(record)

    checkpoint_path = None
    if run_dir is not None:
        # last.npz holds the live state for exact resume; best.npz the
        # best-validation weights used downstream.
        extra = dict(
            train_config=asdict(config),
            epoch=epoch,
            best_val=best_val,
            rng_state=rng.bit_generator.state,
            stopper_best=stopper.best,
            stopper_bad=stopper.bad_count,
            history=history,
        )
        save_checkpoint(run_dir / "last.npz", model, optimizer, **extra)
    if best_state is not None:
        model.load_state_dict(best_state)
    if run_dir is not None:
        checkpoint_path = run_dir / "best.npz"
        save_checkpoint(checkpoint_path, model, optimizer, **extra)
    return FitResult(
        model=model,
        history=history,
        best_val=best_val,
        stopped_epoch=epoch,
        checkpoint_path=checkpoint_path,
    )
