"""Command-line interface.

Subcommands: ``run`` (one experiment), ``scan`` (axis sweep), ``gram``
(precompute and cache a Gram matrix), ``gen`` (write a synthetic CSV),
``report`` (collect summaries into plot-ready CSV/JSON).

Configuration comes from an optional JSON file (--config) whose keys are
ExperimentConfig fields; command-line flags override file values. Exit
codes: 0 success, 2 configuration error, 3 data error, 4 numerical
failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

import numpy as np

from . import __version__
from ._backend import active_backend
from .data import generate_synthetic, pca_fit, pca_transform, rescale_apply, rescale_fit, save_csv
from .errors import ConfigError, DataError, NumericalError
from .experiment import ExperimentConfig, SourceConfig, load_source, run_experiment, run_scan
from .featuremap import FeatureMapConfig
from .kernel import KernelSpec, gram_cache_key, gram_matrix_cached


def _add_override_flags(p: argparse.ArgumentParser) -> None:
    p.add_argument("--config", type=Path, help="JSON config file (flags override it)")
    p.add_argument("--qubits", type=int, dest="n_qubits", help="qubit count = PCA components")
    p.add_argument("--size", type=int, dest="dataset_size", help="events per train and per test sample")
    p.add_argument("--reps", type=int, dest="repetitions", help="number of independent repetitions")
    p.add_argument("--method", help="quantum-exact | quantum-sampled | linear | polynomial | rbf | classical-best")
    p.add_argument("--shots", type=int, help="measurement shots per sampled kernel entry")
    p.add_argument("--d", type=int, dest="feature_map_d", help="feature-map angle exponent")
    p.add_argument("--layers", type=int, dest="feature_map_layers", help="feature-map layer count")
    p.add_argument("--c-grid", dest="c_grid", help="comma-separated C grid, e.g. 0.1,1,10")
    p.add_argument("--gamma-grid", dest="gamma_grid", help="comma-separated gamma grid")
    p.add_argument("--degree-grid", dest="degree_grid", help="comma-separated degree grid")
    p.add_argument("--tol", type=float, help="SMO KKT tolerance")
    p.add_argument("--k-folds", type=int, dest="k_folds", help="cross-validation folds")
    p.add_argument("--split-mode", dest="split_mode", choices=["disjoint", "resample"])
    p.add_argument("--seed", type=int, help="root seed")
    p.add_argument("--out", dest="output_dir", help="output directory")
    p.add_argument("--jobs", type=int, dest="n_jobs", help="worker processes for Gram assembly (0 = all cores)")
    p.add_argument("--cache-dir", dest="cache_dir", help="Gram cache directory")
    p.add_argument("--csv", dest="source_csv", help="CSV dataset path (otherwise synthetic)")
    p.add_argument("--label-column", dest="label_column", help="label column name for --csv")
    p.add_argument("--events", type=int, dest="source_events", help="synthetic pool size")
    p.add_argument("--features", type=int, dest="source_features", help="synthetic raw feature count")
    p.add_argument("--separation", type=float, dest="source_separation", help="synthetic class separation")


_CONFIG_KEYS = (
    "n_qubits", "dataset_size", "repetitions", "method", "shots", "feature_map_d",
    "feature_map_layers", "tol", "k_folds", "split_mode", "seed", "output_dir",
    "n_jobs", "cache_dir",
)


def build_config(args: argparse.Namespace) -> ExperimentConfig:
    raw: dict = {}
    if args.config is not None:
        try:
            raw = json.loads(Path(args.config).read_text())
        except FileNotFoundError:
            raise ConfigError(f"config file not found: {args.config}") from None
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {args.config} is not valid JSON: {exc}") from None
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {args.config} must hold a JSON object")
    source = dict(raw.pop("source", {}))

    for key in _CONFIG_KEYS:
        value = getattr(args, key, None)
        if value is not None:
            raw[key] = value
    for key in ("c_grid", "gamma_grid", "degree_grid"):
        value = getattr(args, key, None)
        if value is not None:
            try:
                parsed = [float(v) for v in str(value).split(",") if v != ""]
            except ValueError:
                raise ConfigError(f"--{key.replace('_', '-')}: expected comma-separated numbers, got {value!r}") from None
            if key == "degree_grid":
                parsed = [int(v) for v in parsed]
            raw[key] = parsed

    if getattr(args, "source_csv", None):
        source.update({"type": "csv", "path": args.source_csv})
    if getattr(args, "label_column", None):
        source["label_column"] = args.label_column
    if getattr(args, "source_events", None) is not None:
        source["n_events"] = args.source_events
    if getattr(args, "source_features", None) is not None:
        source["n_raw_features"] = args.source_features
    if getattr(args, "source_separation", None) is not None:
        source["separation"] = args.source_separation
    if source:
        raw["source"] = source

    try:
        config = ExperimentConfig.from_dict(raw)
    except TypeError as exc:
        raise ConfigError(f"bad config value: {exc}") from None
    config.validate()
    return config


def cmd_run(args) -> int:
    config = build_config(args)
    result = run_experiment(config)
    print(f"backend={active_backend()} method={config.method} reps={config.repetitions}")
    print(f"AUC = {result.auc_mean:.4f} +- {result.auc_std:.4f}")
    print(f"outputs in {config.output_dir}")
    return 0


def cmd_scan(args) -> int:
    config = build_config(args)
    values: list = [v for v in args.values.split(",") if v != ""]
    if args.axis in ("dataset_size", "n_qubits"):
        try:
            values = [int(v) for v in values]
        except ValueError:
            raise ConfigError(f"--values for {args.axis} must be integers, got {args.values!r}") from None
    rows = run_scan(config, args.axis, values)
    for row in rows:
        print(f"{row['axis']}={row['value']} method={row['method']} "
              f"auc={row['auc_mean']:.4f}+-{row['auc_std']:.4f} [{row['status']}]")
    failed = [r for r in rows if r["status"] != "ok"]
    return 4 if failed else 0


def cmd_gram(args) -> int:
    config = build_config(args)
    if config.cache_dir is None:
        raise ConfigError("gram requires --cache-dir")
    if config.method == "classical-best":
        raise ConfigError("gram needs a concrete kernel method, not classical-best")
    dataset = load_source(config)
    pca = pca_fit(dataset.features, config.n_qubits)
    rescale = rescale_fit(pca_transform(pca, dataset.features))
    x = rescale_apply(rescale, pca_transform(pca, dataset.features))

    spec = KernelSpec(
        config.method, shots=config.shots, gamma=config.gamma_grid[0],
        degree=int(config.degree_grid[0]), seed=config.seed,
    )
    cfg = FeatureMapConfig(config.n_qubits, config.feature_map_d, config.feature_map_layers)
    gram = gram_matrix_cached(x, spec, cfg, n_jobs=config.n_jobs, cache_dir=config.cache_dir)
    key = gram_cache_key(x, spec, cfg)
    eig = float(np.linalg.eigvalsh(gram.entries)[0])
    print(f"cached {gram.n}x{gram.n} {spec.kind} gram, key={key}")
    print(f"min eigenvalue {eig:.3e}")
    return 0


def cmd_gen(args) -> int:
    dataset = generate_synthetic(args.events, args.features, args.separation, args.seed)
    save_csv(dataset, args.out)
    print(f"wrote {dataset.n} events x {dataset.n_features} features to {args.out}")
    return 0


def cmd_report(args) -> int:
    summaries = []
    for root in args.inputs:
        root = Path(root)
        if not root.exists():
            raise DataError(f"input path does not exist: {root}")
        found = sorted(root.rglob("summary.json"))
        if root.is_file():
            found = [root]
        for path in found:
            data = json.loads(path.read_text())
            cfg = data.get("config", {})
            summaries.append(
                {
                    "path": str(path.parent),
                    "method": cfg.get("method"),
                    "n_qubits": cfg.get("n_qubits"),
                    "dataset_size": cfg.get("dataset_size"),
                    "repetitions": cfg.get("repetitions"),
                    "auc_mean": data.get("auc_mean"),
                    "auc_std": data.get("auc_std"),
                }
            )
    if not summaries:
        raise DataError(f"no summary.json found under {', '.join(map(str, args.inputs))}")
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    lines = ["path,method,n_qubits,dataset_size,repetitions,auc_mean,auc_std"]
    for s in summaries:
        lines.append(
            f"{s['path']},{s['method']},{s['n_qubits']},{s['dataset_size']},"
            f"{s['repetitions']},{s['auc_mean']!r},{s['auc_std']!r}"
        )
    (out / "auc_table.csv").write_text("\n".join(lines) + "\n")
    (out / "combined.json").write_text(json.dumps(summaries, indent=2, sort_keys=True) + "\n")
    print(f"collected {len(summaries)} summaries into {out}")
    return 0


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qksvm", description=__doc__)
    parser.add_argument("--version", action="version", version=f"qksvm {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment")
    _add_override_flags(p_run)
    p_run.set_defaults(fn=cmd_run)

    p_scan = sub.add_parser("scan", help="sweep one axis (dataset_size | n_qubits | method)")
    _add_override_flags(p_scan)
    p_scan.add_argument("--axis", required=True, choices=["dataset_size", "n_qubits", "method"])
    p_scan.add_argument("--values", required=True, help="comma-separated scan values")
    p_scan.set_defaults(fn=cmd_scan)

    p_gram = sub.add_parser("gram", help="precompute and cache a Gram matrix")
    _add_override_flags(p_gram)
    p_gram.set_defaults(fn=cmd_gram)

    p_gen = sub.add_parser("gen", help="write a synthetic dataset CSV")
    p_gen.add_argument("--out", required=True, help="output CSV path")
    p_gen.add_argument("--events", type=int, default=2000)
    p_gen.add_argument("--features", type=int, default=23)
    p_gen.add_argument("--separation", type=float, default=3.0)
    p_gen.add_argument("--seed", type=int, default=0)
    p_gen.set_defaults(fn=cmd_gen)

    p_rep = sub.add_parser("report", help="collect summary.json files into plot-ready CSV/JSON")
    p_rep.add_argument("--inputs", nargs="+", required=True, help="run directories (searched recursively)")
    p_rep.add_argument("--out", required=True, help="output directory")
    p_rep.set_defaults(fn=cmd_report)
    return parser


def main(argv=None) -> int:
    parser = make_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except (ConfigError, ValueError) as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (DataError, OSError) as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 3
    except NumericalError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 4


if __name__ == "__main__":
    sys.exit(main())
