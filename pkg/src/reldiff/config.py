"""Declarative experiment configuration.

Experiments are described by a YAML document with four sections (dataset,
model, train, inference) plus seeds and output location.  The schema is
validated before any work: unknown keys are rejected with the offending line
number, and scalar fields can be overridden from the command line with
dotted paths (``train.lr=0.001``).
"""

from __future__ import annotations

import copy
import os
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Any

import yaml

from .denoiser import DenoiserConfig
from .errors import InvalidConfigError
from .model import ModelConfig
from .training import TrainConfig

OUTPUT_ROOT_ENV = "RELDIFF_OUTPUT_ROOT"


@dataclass(frozen=True)
class DatasetConfig:
    system: str = "kuramoto"  # kuramoto | spring | var | external
    path: str | None = None  # container path for system=external
    n_nodes: int = 5
    split_sizes: tuple[int, int, int] = (500, 100, 100)
    edge_prob: float = 0.5
    missing_ratio: float = 0.0
    n_steps: int | None = None
    dt: float = 0.05
    coupling_strength: float = 1.0
    omega_range: tuple[float, float] = (2.0, 10.0)
    spring_constant: float = 0.1
    var_order: int = 2
    var_noise_prob: float = 0.1

    @property
    def n_samples(self) -> int:
        return sum(self.split_sizes)


@dataclass(frozen=True)
class InferenceConfig:
    n_repeats: int = 10
    mask_ratio: float = 0.5
    rho: float | None = None  # None: density of the true graph
    binarize_scope: str = "global"  # global | row
    eval_mode: str = "directed"  # directed | symmetrized
    impute_metrics: bool = False
    impute_mask_ratio: float = 0.5
    chunk_size: int = 256


@dataclass(frozen=True)
class ExperimentConfig:
    name: str = "experiment"
    dataset: DatasetConfig = DatasetConfig()
    model: ModelConfig = ModelConfig()
    train: TrainConfig = TrainConfig()
    inference: InferenceConfig = InferenceConfig()
    seeds: tuple[int, ...] = (0, 1, 2, 3, 4)
    output_dir: str | None = None

    def to_dict(self) -> dict[str, Any]:
        return asdict(self)

    def resolved_output_dir(self) -> Path:
        if self.output_dir is not None:
            return Path(self.output_dir)
        return Path(os.environ.get(OUTPUT_ROOT_ENV, "runs"))


_SECTION_TYPES = {
    "dataset": DatasetConfig,
    "model": ModelConfig,
    "train": TrainConfig,
    "inference": InferenceConfig,
}
_TUPLE_FIELDS = {
    "split_sizes",
    "omega_range",
    "seeds",
    "lr_decay_milestones",
}


class ConfigFileError(InvalidConfigError):
    """Schema violation in a config document, with file/line context."""


def _key_lines(path: Path) -> dict[str, int]:
    """Map dotted key paths to 1-based line numbers."""
    try:
        root = yaml.compose(path.read_text())
    except yaml.YAMLError as exc:
        raise ConfigFileError(f"{path}: unparsable YAML: {exc}") from exc
    lines: dict[str, int] = {}

    def walk(node, prefix: str) -> None:
        if not isinstance(node, yaml.MappingNode):
            return
        for key_node, value_node in node.value:
            dotted = f"{prefix}{key_node.value}"
            lines[dotted] = key_node.start_mark.line + 1
            walk(value_node, dotted + ".")

    if root is not None:
        walk(root, "")
    return lines


def _allowed_keys(cls) -> set[str]:
    return {f.name for f in fields(cls)}


def _coerce(cls, payload: dict[str, Any], context: str, lines: dict[str, int], source: str):
    allowed = _allowed_keys(cls)
    for key in payload:
        if key not in allowed:
            dotted = f"{context}.{key}" if context else key
            line = lines.get(dotted)
            where = f"{source}:{line}: " if line else f"{source}: "
            raise ConfigFileError(f"{where}unknown key {dotted!r}")
    converted = dict(payload)
    for key in _TUPLE_FIELDS & converted.keys():
        if isinstance(converted[key], list):
            converted[key] = tuple(converted[key])
    try:
        return cls(**converted)
    except (TypeError, InvalidConfigError) as exc:
        raise ConfigFileError(f"{source}: section {context or 'top level'}: {exc}") from exc


def config_from_dict(
    payload: dict[str, Any], lines: dict[str, int] | None = None, source: str = "<dict>"
) -> ExperimentConfig:
    lines = lines or {}
    if not isinstance(payload, dict):
        raise ConfigFileError(f"{source}: document must be a mapping")
    top_allowed = _allowed_keys(ExperimentConfig)
    kwargs: dict[str, Any] = {}
    for key, value in payload.items():
        if key not in top_allowed:
            line = lines.get(key)
            where = f"{source}:{line}: " if line else f"{source}: "
            raise ConfigFileError(f"{where}unknown key {key!r}")
        if key in _SECTION_TYPES:
            if not isinstance(value, dict):
                raise ConfigFileError(f"{source}: section {key!r} must be a mapping")
            if key == "model":
                value = dict(value)
                denoiser = value.pop("denoiser", {})
                if not isinstance(denoiser, dict):
                    raise ConfigFileError(f"{source}: model.denoiser must be a mapping")
                den = _coerce(DenoiserConfig, denoiser, "model.denoiser", lines, source)
                value["denoiser"] = den
                kwargs[key] = _coerce(ModelConfig, value, "model", lines, source)
            else:
                kwargs[key] = _coerce(_SECTION_TYPES[key], value, key, lines, source)
        elif key == "seeds":
            if isinstance(value, (list, tuple)):
                kwargs[key] = tuple(int(v) for v in value)
            else:
                kwargs[key] = (int(value),)
        else:
            kwargs[key] = value
    return ExperimentConfig(**kwargs)


def load_config(path: str | Path) -> ExperimentConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigFileError(f"{path}: no such config file")
    payload = yaml.safe_load(path.read_text())
    if payload is None:
        payload = {}
    return config_from_dict(payload, _key_lines(path), str(path))


def apply_overrides(config: ExperimentConfig, overrides: list[str]) -> ExperimentConfig:
    """Apply ``section.key=value`` overrides (scalars only; values parsed as YAML)."""
    payload = config.to_dict()
    for item in overrides:
        if "=" not in item:
            raise ConfigFileError(f"override {item!r} is not of the form path=value")
        dotted, raw = item.split("=", 1)
        keys = dotted.split(".")
        node: Any = payload
        for key in keys[:-1]:
            if not isinstance(node, dict) or key not in node:
                raise ConfigFileError(f"override path {dotted!r} does not exist")
            node = node[key]
        leaf = keys[-1]
        if not isinstance(node, dict) or leaf not in node:
            raise ConfigFileError(f"override path {dotted!r} does not exist")
        if isinstance(node[leaf], (dict, list)) and leaf not in _TUPLE_FIELDS:
            raise ConfigFileError(f"override path {dotted!r} is not a scalar field")
        node[leaf] = yaml.safe_load(raw)
    return config_from_dict(payload, source="<overrides>")


# -- presets ------------------------------------------------------------------

def _preset(name: str, **sections: dict[str, Any]) -> dict[str, Any]:
    doc: dict[str, Any] = {"name": name}
    doc.update(sections)
    return doc


_PRESETS: dict[str, dict[str, Any]] = {
    "kuramoto5": _preset(
        "kuramoto5",
        dataset={"system": "kuramoto", "n_nodes": 5, "split_sizes": [500, 100, 100]},
        train={"patience": 10, "lambda1": 0.01},
    ),
    "kuramoto10": _preset(
        "kuramoto10",
        dataset={"system": "kuramoto", "n_nodes": 10, "split_sizes": [500, 100, 100]},
        train={"patience": 10, "lambda1": 0.01},
    ),
    "kuramoto25": _preset(
        "kuramoto25",
        dataset={"system": "kuramoto", "n_nodes": 25, "split_sizes": [1000, 200, 200]},
        train={"patience": 10, "lambda1": 0.0},
    ),
    "kuramoto50": _preset(
        "kuramoto50",
        dataset={"system": "kuramoto", "n_nodes": 50, "split_sizes": [2000, 400, 400]},
        train={"patience": 10, "lambda1": 0.0, "batch_size": 32},
    ),
    "spring5": _preset(
        "spring5",
        dataset={"system": "spring", "n_nodes": 5, "split_sizes": [500, 100, 100]},
        train={"patience": 10, "lambda1": 0.01},
    ),
    "spring10": _preset(
        "spring10",
        dataset={"system": "spring", "n_nodes": 10, "split_sizes": [1500, 300, 300]},
        train={"patience": 10, "lambda1": 0.01},
    ),
    "var5": _preset(
        "var5",
        dataset={"system": "var", "n_nodes": 5, "split_sizes": [500, 100, 100]},
        train={"patience": 5, "lambda1": 0.01},
    ),
    "netsim": _preset(
        "netsim",
        # no held-out block: scoring runs over all samples; a small val slice
        # is still carved out to drive early stopping
        dataset={"system": "external", "path": None, "n_nodes": 5, "split_sizes": [40, 10, 0]},
        model={
            "denoiser": {"residual_layers": 1, "attention_heads": 1, "feature_layer": "mlp"}
        },
        train={"patience": 5, "lambda1": 0.0},
        inference={"eval_mode": "symmetrized"},
    ),
}


def preset_names() -> list[str]:
    return sorted(_PRESETS)


def preset_config(name: str, **top_level: Any) -> ExperimentConfig:
    if name not in _PRESETS:
        raise InvalidConfigError(f"unknown preset {name!r}; available: {preset_names()}")
    doc = copy.deepcopy(_PRESETS[name])
    doc.update(top_level)
    return config_from_dict(doc, source=f"<preset {name}>")
