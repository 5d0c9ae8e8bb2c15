"""Command-line harness: generate | train | infer | eval | ablate | report.

Exit codes: 0 success, 2 configuration error, 3 runtime failure.  The output
root defaults to ``./runs`` and can be moved with RELDIFF_OUTPUT_ROOT.
Configs are YAML documents (see ``docs/config.md``); ``--preset`` loads a
built-in document and ``--set section.key=value`` overrides scalar fields.
"""

from __future__ import annotations

import argparse
import csv
import json
import re
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import container
from .config import (
    ConfigFileError,
    ExperimentConfig,
    apply_overrides,
    load_config,
    preset_config,
    preset_names,
)
from .errors import InvalidConfigError, ReldiffError

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3


def _resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    if args.config is None and args.preset is None:
        raise ConfigFileError("either --config or --preset is required")
    if args.config is not None and args.preset is not None:
        raise ConfigFileError("--config and --preset are mutually exclusive")
    config = (
        load_config(args.config) if args.config is not None else preset_config(args.preset)
    )
    if args.set:
        config = apply_overrides(config, args.set)
    if getattr(args, "output_dir", None):
        config = replace(config, output_dir=args.output_dir)
    return config


def cmd_generate(args: argparse.Namespace) -> int:
    from .experiments import dataset_for_run

    config = _resolve_config(args)
    root = config.resolved_output_dir()
    data_dir = root / "data"
    manifest = []
    for seed in config.seeds:
        dataset = dataset_for_run(config, seed, data_dir)
        blob = json.dumps(config.dataset.__dict__, sort_keys=True, default=str)
        import hashlib

        dhash = hashlib.sha256(blob.encode()).hexdigest()[:12]
        path = data_dir / f"{config.dataset.system}-{dhash}-seed{seed}.dri"
        manifest.append(
            {
                "seed": seed,
                "path": str(path),
                "n_samples": dataset.n_samples,
                "split_sizes": dataset.split_sizes,
                "n_nodes": dataset.n_nodes,
            }
        )
    manifest_path = data_dir / f"manifest-{config.name}.json"
    manifest_path.write_text(json.dumps(manifest, indent=1))
    print(f"wrote {len(manifest)} containers; manifest at {manifest_path}")
    return EXIT_OK


def cmd_train(args: argparse.Namespace) -> int:
    from .experiments import run_seed

    config = _resolve_config(args)
    if args.dataset is not None:
        config = replace(
            config, dataset=replace(config.dataset, system="external", path=args.dataset)
        )
    for seed in config.seeds if args.seed is None else [args.seed]:
        record = run_seed(config, seed, reuse=not args.force)
        print(
            f"seed {seed}: accuracy {record['accuracy']:.1f}, "
            f"auroc {record['auroc']:.3f}, epochs {record['stopped_epoch']}, "
            f"checkpoint {record['checkpoint']}"
        )
    return EXIT_OK


def cmd_infer(args: argparse.Namespace) -> int:
    from .checkpoint import build_model, load_checkpoint
    from .inference import auroc, binarize, accuracy, infer_scores

    config = _resolve_config(args)
    dataset = container.load(args.dataset)
    payload = load_checkpoint(args.checkpoint)
    model = build_model(payload)
    test = dataset.subset("test") if (dataset.split_sizes or (0, 0, 0))[2] > 0 else dataset
    inf = config.inference
    rho = inf.rho if inf.rho is not None else dataset.adjacency.density
    scores = infer_scores(
        model, test, n_repeats=inf.n_repeats, mask_ratio=inf.mask_ratio, seed=args.seed or 0
    )
    pred = binarize(scores, rho, scope=inf.binarize_scope)
    report = {
        "rho": rho,
        "accuracy": accuracy(pred, dataset.adjacency.edges, mode=inf.eval_mode),
        "auroc": auroc(scores, dataset.adjacency.edges),
        "scores": scores.tolist(),
        "adjacency_pred": pred.tolist(),
    }
    out = Path(args.out) if args.out else Path("inference-report.json")
    out.write_text(json.dumps(report, indent=1))
    print(f"accuracy {report['accuracy']:.1f} auroc {report['auroc']:.3f} -> {out}")
    return EXIT_OK


def cmd_eval(args: argparse.Namespace) -> int:
    from .inference import evaluate

    scores = np.loadtxt(args.scores, delimiter=",")
    dataset = container.load(args.dataset)
    rho = args.rho if args.rho is not None else dataset.adjacency.density
    metrics = evaluate(
        scores, dataset.adjacency.edges, rho, scope=args.scope, mode=args.mode
    )
    print(json.dumps(metrics, indent=1))
    return EXIT_OK


_GRIDS = {
    "reg_po": [
        {"label": "w/ Reg & w/ PO", "set": ["train.lambda1=0.01", "model.denoiser.interaction_mode=perturb"]},
        {"label": "w/o Reg & w/ PO", "set": ["train.lambda1=0.0", "model.denoiser.interaction_mode=perturb"]},
        {"label": "w/ Reg & w/o PO", "set": ["train.lambda1=0.01", "model.denoiser.interaction_mode=hard_mask"]},
        {"label": "w/o Reg & w/o PO", "set": ["train.lambda1=0.0", "model.denoiser.interaction_mode=hard_mask"]},
    ],
    "mr_mode": [
        {"label": f"MR={mr}% {mode}", "set": [f"dataset.missing_ratio={mr / 100}", f"train.mode={mode}"]}
        for mr in (0, 25, 50)
        for mode in ("imputation", "prediction")
    ],
    "feature_layer": [
        {"label": "LSTM", "set": ["model.denoiser.feature_layer=lstm"]},
        {"label": "MLP", "set": ["model.denoiser.feature_layer=mlp"]},
    ],
}


def cmd_ablate(args: argparse.Namespace) -> int:
    from .experiments import run_experiment

    base = _resolve_config(args)
    if args.grid not in _GRIDS:
        raise ConfigFileError(f"unknown grid {args.grid!r}; available: {sorted(_GRIDS)}")
    rows = []
    for cell in _GRIDS[args.grid]:
        config = apply_overrides(base, cell["set"])
        slug = re.sub(r"[^A-Za-z0-9.=-]+", "", cell["label"])
        config = replace(config, name=f"{base.name}-{args.grid}-{slug}")
        if args.dry_run:
            rows.append({"label": cell["label"], "name": config.name})
            continue
        summary = run_experiment(config, reuse=not args.force)
        rows.append(
            {
                "label": cell["label"],
                "accuracy_mean": summary["accuracy_mean"],
                "accuracy_std": summary["accuracy_std"],
                "auroc_mean": summary["auroc_mean"],
            }
        )
    _emit_table(rows, Path(args.out) if args.out else None)
    return EXIT_OK


def _emit_table(rows: list[dict], out: Path | None) -> None:
    if not rows:
        print("no rows")
        return
    keys = list(rows[0])
    widths = {k: max(len(k), *(len(_fmt(r[k])) for r in rows)) for k in keys}
    header = "  ".join(k.ljust(widths[k]) for k in keys)
    print(header)
    print("-" * len(header))
    for row in rows:
        print("  ".join(_fmt(row[k]).ljust(widths[k]) for k in keys))
    if out is not None:
        with out.open("w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=keys)
            writer.writeheader()
            writer.writerows(rows)
        print(f"table written to {out}")


def _fmt(value) -> str:
    if isinstance(value, float):
        return f"{value:.2f}"
    return str(value)


def cmd_report(args: argparse.Namespace) -> int:
    reports = sorted(Path(args.reports_dir).glob("*.json"))
    rows = []
    for path in reports:
        data = json.loads(path.read_text())
        rows.append(
            {
                "name": data.get("name", path.stem),
                "accuracy": f"{data.get('accuracy_mean', float('nan')):.1f}"
                f" ({data.get('accuracy_std', float('nan')):.1f})",
                "auroc": f"{data.get('auroc_mean', float('nan')):.3f}",
                "seeds": data.get("n_seeds", 0),
            }
        )
    _emit_table(rows, Path(args.out) if args.out else None)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="reldiff", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def add_config_args(p: argparse.ArgumentParser) -> None:
        p.add_argument("--config", help="YAML experiment config")
        p.add_argument(
            "--preset", choices=preset_names(), help="built-in experiment preset"
        )
        p.add_argument(
            "--set",
            action="append",
            default=[],
            metavar="PATH=VALUE",
            help="override a scalar config field (dotted path)",
        )
        p.add_argument("--output-dir", help="output root (default env or ./runs)")

    p = sub.add_parser("generate", help="write dataset containers per seed")
    add_config_args(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("train", help="train (and evaluate) per seed")
    add_config_args(p)
    p.add_argument("--dataset", help="train on an existing container instead")
    p.add_argument("--seed", type=int, help="run a single seed")
    p.add_argument("--force", action="store_true", help="ignore cached results")
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("infer", help="score edges with a trained checkpoint")
    add_config_args(p)
    p.add_argument("--checkpoint", required=True)
    p.add_argument("--dataset", required=True)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out")
    p.set_defaults(func=cmd_infer)

    p = sub.add_parser("eval", help="evaluate a saved score matrix")
    p.add_argument("--scores", required=True, help="CSV score matrix")
    p.add_argument("--dataset", required=True, help="container with ground truth")
    p.add_argument("--rho", type=float)
    p.add_argument("--scope", choices=("global", "row"), default="global")
    p.add_argument("--mode", choices=("directed", "symmetrized"), default="directed")
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("ablate", help="run an ablation grid")
    add_config_args(p)
    p.add_argument("--grid", required=True, choices=sorted(_GRIDS))
    p.add_argument("--dry-run", action="store_true", help="list planned cells only")
    p.add_argument("--force", action="store_true")
    p.add_argument("--out", help="CSV output path")
    p.set_defaults(func=cmd_ablate)

    p = sub.add_parser("report", help="tabulate per-experiment reports")
    p.add_argument("--reports-dir", required=True)
    p.add_argument("--out")
    p.set_defaults(func=cmd_report)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigFileError, InvalidConfigError, FileNotFoundError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ReldiffError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    except KeyboardInterrupt:
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
