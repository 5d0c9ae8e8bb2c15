"""Checkpoint container: header (configs, schedule, RNG state, counters) plus
named flat parameter and optimizer-moment arrays.  Reload is bit-exact.
"""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

import numpy as np
import torch

from .model import ModelConfig, RelationalDiffusionModel

SCHEMA_VERSION = 1


def save_checkpoint(
    path: str | Path,
    model: RelationalDiffusionModel,
    optimizer: torch.optim.Optimizer | None = None,
    **extra: Any,
) -> None:
    """``extra`` must be JSON-serializable (epoch, rng_state, train config...)."""
    header = {
        "schema_version": SCHEMA_VERSION,
        "n_nodes": model.n_nodes,
        "model_config": model.config.to_dict(),
        "extra": extra,
    }
    arrays: dict[str, np.ndarray] = {}
    for name, param in model.state_dict().items():
        arrays[f"param.{name}"] = param.detach().cpu().numpy()
    if optimizer is not None:
        named = [name for name, _ in model.named_parameters()]
        params = [p for _, p in model.named_parameters()]
        state = optimizer.state
        for name, param in zip(named, params):
            if param in state:
                entry = state[param]
                arrays[f"opt.{name}.step"] = np.asarray(
                    entry["step"].detach().cpu().numpy()
                )
                arrays[f"opt.{name}.exp_avg"] = entry["exp_avg"].detach().cpu().numpy()
                arrays[f"opt.{name}.exp_avg_sq"] = (
                    entry["exp_avg_sq"].detach().cpu().numpy()
                )
    np.savez(path, header=np.array(json.dumps(header)), **arrays)


def load_checkpoint(path: str | Path) -> dict[str, Any]:
    with np.load(path, allow_pickle=False) as payload:
        header = json.loads(str(payload["header"]))
        arrays = {k: payload[k] for k in payload.files if k != "header"}
    if header.get("schema_version") != SCHEMA_VERSION:
        from .errors import UnsupportedVersionError

        raise UnsupportedVersionError(
            f"checkpoint schema {header.get('schema_version')!r} not supported"
        )
    header["arrays"] = arrays
    return header


def build_model(payload: dict[str, Any]) -> RelationalDiffusionModel:
    """Reconstruct the model from a loaded checkpoint payload."""
    config = ModelConfig.from_dict(payload["model_config"])
    model = RelationalDiffusionModel(payload["n_nodes"], config)
    state = {
        name[len("param.") :]: torch.from_numpy(arr.copy())
        for name, arr in payload["arrays"].items()
        if name.startswith("param.")
    }
    model.load_state_dict(state)
    return model


def restore_optimizer(
    payload: dict[str, Any],
    model: RelationalDiffusionModel,
    optimizer: torch.optim.Optimizer,
) -> None:
    arrays = payload["arrays"]
    for name, param in model.named_parameters():
        key = f"opt.{name}.exp_avg"
        if key not in arrays:
            continue
        optimizer.state[param] = {
            "step": torch.from_numpy(arrays[f"opt.{name}.step"].copy()),
            "exp_avg": torch.from_numpy(arrays[f"opt.{name}.exp_avg"].copy()),
            "exp_avg_sq": torch.from_numpy(arrays[f"opt.{name}.exp_avg_sq"].copy()),
        }
