"""Experiment runner: the full study protocol over repeated splits.

One experiment runs, per repetition: stratified split, PCA fit on the
training sample, rescale fit on the training sample, cross-validated
hyperparameter selection, final SVM fit, test scoring, ROC/AUC. Splits
and fold assignments derive from the root seed only, never from the
method, so a method scan compares every method on identical data
(paired protocol).

Deterministic outputs (summary.json, roc_mean.csv, roc_rep_<k>.csv,
auc_table.csv) are byte-identical across reruns with the same config and
seed. Wall-clock numbers go to a separate timing.json, which is the one
output excluded from that guarantee.
"""

from __future__ import annotations

import dataclasses
import json
import time
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .data import (
    Dataset,
    generate_synthetic,
    load_csv,
    pca_fit,
    pca_transform,
    rescale_apply,
    rescale_fit,
    split_datasets,
)
from .errors import ConfigError, DataError
from .evaluation import (
    CvResult,
    RocCurve,
    auc,
    cross_validate,
    default_grid,
    mean_roc,
    roc_curve,
    summarize_repetitions,
)
from .featuremap import FeatureMapConfig
from .kernel import KINDS, gram_cross_cached
from .svm import decision_batch, platt_calibrate, train
from ._backend import active_backend

METHODS = KINDS + ("classical-best",)

_MASK64 = (1 << 64) - 1

# seed-derivation tags: one stream per protocol phase
_TAG_SPLIT = 1
_TAG_CV = 2
_TAG_KERNEL = 3


def derive_seed(root: int, *tags: int) -> int:
    """Fixed mixing of the root seed with integer tags (64-bit output)."""
    ss = np.random.SeedSequence([root & _MASK64, *tags])
    return int(ss.generate_state(1, np.uint64)[0])


@dataclass
class SourceConfig:
    """Where events come from: a synthetic generator or a CSV file."""

    type: str = "synthetic"
    n_events: int = 2000
    n_raw_features: int = 23
    separation: float = 3.0
    path: str | None = None
    label_column: str = "label"


@dataclass
class ExperimentConfig:
    source: SourceConfig = field(default_factory=SourceConfig)
    n_qubits: int = 8
    dataset_size: int = 100
    repetitions: int = 60
    method: str = "quantum-exact"
    shots: int = 8192
    feature_map_d: int = 3
    feature_map_layers: int = 2
    c_grid: tuple = (0.1, 1.0, 10.0, 100.0)
    gamma_grid: tuple = (0.01, 0.1, 1.0)
    degree_grid: tuple = (2, 3)
    tol: float = 1e-3
    k_folds: int = 5
    split_mode: str = "disjoint"
    seed: int = 0
    output_dir: str = "out"
    n_jobs: int = 1
    cache_dir: str | None = None

    def validate(self) -> None:
        if self.method not in METHODS:
            raise ConfigError(f"method must be one of {METHODS}, got {self.method!r}")
        if not 2 <= self.n_qubits <= 20:
            raise ConfigError(f"n_qubits must be in [2, 20], got {self.n_qubits}")
        if self.repetitions < 1:
            raise ConfigError(f"repetitions must be >= 1, got {self.repetitions}")
        if self.dataset_size < 2:
            raise ConfigError(f"dataset_size must be >= 2, got {self.dataset_size}")
        if self.shots < 1:
            raise ConfigError(f"shots must be >= 1, got {self.shots}")
        if self.feature_map_d < 1 or self.feature_map_layers < 1:
            raise ConfigError("feature_map_d and feature_map_layers must be >= 1")
        if not self.c_grid:
            raise ConfigError("c_grid must not be empty")
        if self.k_folds < 2:
            raise ConfigError(f"k_folds must be >= 2, got {self.k_folds}")
        if self.split_mode not in ("disjoint", "resample"):
            raise ConfigError(f"split_mode must be disjoint or resample, got {self.split_mode!r}")
        if self.source.type not in ("synthetic", "csv"):
            raise ConfigError(f"source.type must be synthetic or csv, got {self.source.type!r}")
        if self.source.type == "csv" and not self.source.path:
            raise ConfigError("source.type csv requires source.path")
        if self.source.type == "synthetic":
            if self.source.n_events < 2 or self.source.n_events % 2:
                raise ConfigError(f"source.n_events must be even and >= 2, got {self.source.n_events}")
            if self.source.n_raw_features < self.n_qubits:
                raise ConfigError(
                    f"source.n_raw_features ({self.source.n_raw_features}) must be >= n_qubits "
                    f"({self.n_qubits}) for PCA"
                )

    def to_dict(self) -> dict:
        d = dataclasses.asdict(self)
        d["c_grid"] = list(self.c_grid)
        d["gamma_grid"] = list(self.gamma_grid)
        d["degree_grid"] = [int(v) for v in self.degree_grid]
        return d

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        raw = dict(raw)
        src = raw.pop("source", {})
        if not isinstance(src, dict):
            raise ConfigError(f"source must be an object, got {type(src).__name__}")
        unknown = set(src) - {f.name for f in dataclasses.fields(SourceConfig)}
        if unknown:
            raise ConfigError(f"unknown source keys: {sorted(unknown)}")
        unknown = set(raw) - {f.name for f in dataclasses.fields(cls)}
        if unknown:
            raise ConfigError(f"unknown config keys: {sorted(unknown)}")
        for key in ("c_grid", "gamma_grid", "degree_grid"):
            if key in raw:
                raw[key] = tuple(raw[key])
        return cls(source=SourceConfig(**src), **raw)


@dataclass
class RepetitionResult:
    repetition: int
    auc: float
    curve: RocCurve
    best_kind: str
    best_C: float
    best_gamma: float
    best_degree: int
    calibration_A: float
    calibration_B: float


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    per_repetition: list[RepetitionResult]
    auc_mean: float
    auc_std: float
    mean_curve: np.ndarray
    timings: dict


def load_source(config: ExperimentConfig) -> Dataset:
    if config.source.type == "synthetic":
        return generate_synthetic(
            config.source.n_events,
            config.source.n_raw_features,
            config.source.separation,
            seed=config.seed,
        )
    dataset = load_csv(config.source.path, label_column=config.source.label_column)
    if dataset.n_features < config.n_qubits:
        raise DataError(
            f"{config.source.path}: {dataset.n_features} feature columns < n_qubits {config.n_qubits}"
        )
    if len(np.unique(dataset.labels)) < 2:
        raise DataError(f"{config.source.path}: both classes must be present")
    return dataset


def _run_repetition(config, rep, train_ds, test_ds, timings) -> RepetitionResult:
    cfg = FeatureMapConfig(config.n_qubits, config.feature_map_d, config.feature_map_layers)

    pca = pca_fit(train_ds.features, config.n_qubits)
    rescale = rescale_fit(pca_transform(pca, train_ds.features))
    x_train = rescale_apply(rescale, pca_transform(pca, train_ds.features))
    x_test = rescale_apply(rescale, pca_transform(pca, test_ds.features))

    grid = default_grid(
        config.method,
        config.c_grid,
        config.gamma_grid,
        config.degree_grid,
        shots=config.shots,
        seed=derive_seed(config.seed, _TAG_KERNEL, rep),
    )
    t0 = time.perf_counter()
    cv: CvResult = cross_validate(
        x_train,
        train_ds.labels,
        grid,
        cfg,
        k_folds=config.k_folds,
        seed=derive_seed(config.seed, _TAG_CV, rep),
        tol=config.tol,
        n_jobs=config.n_jobs,
        cache_dir=config.cache_dir,
    )
    timings["cv"] += time.perf_counter() - t0
    best = cv.best

    t0 = time.perf_counter()
    gram = cv.grams[best.spec]
    cross = gram_cross_cached(
        x_test, x_train, best.spec, cfg, n_jobs=config.n_jobs, cache_dir=config.cache_dir
    )
    timings["gram"] += time.perf_counter() - t0

    t0 = time.perf_counter()
    model = train(gram, train_ds.labels, best.C, tol=config.tol)
    calibration = platt_calibrate(model, gram, train_ds.labels)
    timings["train"] += time.perf_counter() - t0

    t0 = time.perf_counter()
    scores = decision_batch(model, cross)
    rep_auc = auc(scores, test_ds.labels)
    curve = roc_curve(scores, test_ds.labels)
    timings["eval"] += time.perf_counter() - t0

    return RepetitionResult(
        repetition=rep,
        auc=rep_auc,
        curve=curve,
        best_kind=best.spec.kind,
        best_C=best.C,
        best_gamma=best.spec.gamma,
        best_degree=best.spec.degree,
        calibration_A=calibration.A,
        calibration_B=calibration.B,
    )


def run_experiment(config: ExperimentConfig, write: bool = True) -> ExperimentResult:
    """Run all repetitions and (optionally) write the result bundle."""
    config.validate()
    timings = {"cv": 0.0, "gram": 0.0, "train": 0.0, "eval": 0.0}
    t_total = time.perf_counter()

    dataset = load_source(config)
    splits = split_datasets(
        dataset,
        config.repetitions,
        config.dataset_size,
        seed=derive_seed(config.seed, _TAG_SPLIT),
        mode=config.split_mode,
    )

    reps = []
    for rep, (train_ds, test_ds) in enumerate(splits):
        try:
            reps.append(_run_repetition(config, rep, train_ds, test_ds, timings))
        except Exception as exc:
            raise type(exc)(f"repetition {rep}: {exc}") from exc

    summary = summarize_repetitions([r.auc for r in reps])
    curve = mean_roc([r.curve for r in reps])
    timings["total"] = time.perf_counter() - t_total
    result = ExperimentResult(config, reps, summary.auc_mean, summary.auc_std, curve, timings)
    if write:
        write_result(result)
    return result


# ---------------------------------------------------------------------------
# Output bundle. All CSV floats use repr() so values round-trip exactly and
# files are byte-identical across reruns.

def _write_csv(path: Path, header: list[str], rows) -> None:
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(repr(float(v)) if isinstance(v, float) else str(v) for v in row))
    path.write_text("\n".join(lines) + "\n")


def write_result(result: ExperimentResult) -> Path:
    out = Path(result.config.output_dir)
    out.mkdir(parents=True, exist_ok=True)

    summary = {
        "config": result.config.to_dict(),
        "backend": active_backend(),
        "auc_mean": result.auc_mean,
        "auc_std": result.auc_std,
        "per_repetition": [
            {
                "repetition": r.repetition,
                "auc": r.auc,
                "kind": r.best_kind,
                "C": r.best_C,
                "gamma": r.best_gamma,
                "degree": r.best_degree,
                "calibration_A": r.calibration_A,
                "calibration_B": r.calibration_B,
            }
            for r in result.per_repetition
        ],
    }
    (out / "summary.json").write_text(json.dumps(summary, indent=2, sort_keys=True) + "\n")

    _write_csv(
        out / "roc_mean.csv",
        ["signal_efficiency", "background_rejection_mean"],
        [(float(e), float(r)) for e, r in result.mean_curve],
    )
    for r in result.per_repetition:
        _write_csv(
            out / f"roc_rep_{r.repetition}.csv",
            ["signal_efficiency", "background_rejection"],
            [(float(e), float(b)) for e, b in r.curve.points],
        )
    _write_csv(
        out / "auc_table.csv",
        ["repetition", "auc", "kind", "C", "gamma", "degree"],
        [
            (r.repetition, float(r.auc), r.best_kind, float(r.best_C), float(r.best_gamma), r.best_degree)
            for r in result.per_repetition
        ],
    )
    (out / "timing.json").write_text(json.dumps(result.timings, indent=2, sort_keys=True) + "\n")
    return out


# ---------------------------------------------------------------------------
# Axis scans (dataset size, qubit count, or method list).

SCAN_AXES = ("dataset_size", "n_qubits", "method")


def run_scan(base: ExperimentConfig, axis: str, values: list) -> list[dict]:
    """One run_experiment per scan value; failures are recorded, not fatal.

    Within a scan every point shares the root seed, so every method/axis
    point consumes identical per-repetition splits.
    """
    if axis not in SCAN_AXES:
        raise ConfigError(f"scan axis must be one of {SCAN_AXES}, got {axis!r}")
    if not values:
        raise ConfigError("scan values list is empty")
    base.validate()
    out_root = Path(base.output_dir)
    rows = []
    for value in values:
        sub = dataclasses.replace(
            base, **{axis: value}, output_dir=str(out_root / f"scan_{axis}_{value}")
        )
        try:
            result = run_experiment(sub)
            rows.append(
                {
                    "axis": axis,
                    "value": value,
                    "method": sub.method,
                    "auc_mean": result.auc_mean,
                    "auc_std": result.auc_std,
                    "status": "ok",
                }
            )
        except Exception as exc:  # record and continue with the next point
            rows.append(
                {
                    "axis": axis,
                    "value": value,
                    "method": sub.method,
                    "auc_mean": float("nan"),
                    "auc_std": float("nan"),
                    "status": f"failed: {exc}",
                }
            )
    out_root.mkdir(parents=True, exist_ok=True)
    _write_csv(
        out_root / "scan_table.csv",
        ["axis", "value", "method", "auc_mean", "auc_std", "status"],
        [
            (
                r["axis"],
                r["value"],
                r["method"],
                float(r["auc_mean"]),
                float(r["auc_std"]),
                '"' + r["status"].replace('"', "'") + '"',
            )
            for r in rows
        ],
    )
    return rows
