"""Dataset ingestion and preprocessing.

The preprocessing pipeline is: PCA fit on the training sample only,
transform train and test, rescale fit on the training sample only, apply
to both with clamping. Test rows never influence fitted parameters, and
the rescale output always lies in [-1, +1], the range the feature map
requires for its rotation angles.

CSV schema: a header row; one column named ``label`` holding {0, 1}
(1 = signal); every other column is a numeric feature.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import DegenerateDataError, ParseError, SchemaError


@dataclass
class Dataset:
    """Raw event sample: n rows of m features plus {0, 1} labels."""

    features: np.ndarray
    labels: np.ndarray

    @property
    def n(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]


@dataclass
class PcaModel:
    """Mean vector plus top-N orthonormal principal directions."""

    mean: np.ndarray
    components: np.ndarray  # (N, m), rows orthonormal
    explained_variance: np.ndarray  # non-increasing


@dataclass
class RescaleModel:
    """Per-column training min/max for the [-1, +1] affine rescale."""

    min: np.ndarray
    max: np.ndarray


def load_csv(path, label_column: str = "label") -> Dataset:
    """Parse a CSV of labelled events; every non-label column is a feature."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise SchemaError(f"{path}: empty file") from None
        header = [h.strip() for h in header]
        if label_column not in header:
            raise SchemaError(f"{path}: no {label_column!r} column in header {header}")
        label_idx = header.index(label_column)
        feature_names = [h for i, h in enumerate(header) if i != label_idx]
        if not feature_names:
            raise SchemaError(f"{path}: header has no feature columns")

        features, labels = [], []
        for row_no, row in enumerate(reader, start=2):
            if not row:
                continue
            if len(row) != len(header):
                raise ParseError(f"{path}:{row_no}: expected {len(header)} cells, got {len(row)}")
            raw_label = row[label_idx].strip()
            if raw_label not in ("0", "1"):
                raise SchemaError(f"{path}:{row_no}: unknown label value {raw_label!r}")
            labels.append(int(raw_label))
            vals = []
            for i, cell in enumerate(row):
                if i == label_idx:
                    continue
                name = header[i]
                try:
                    v = float(cell)
                except ValueError:
                    raise ParseError(f"{path}:{row_no}: column {name!r}: not a number: {cell!r}") from None
                if not np.isfinite(v):
                    raise ParseError(f"{path}:{row_no}: column {name!r}: non-finite value {cell!r}")
                vals.append(v)
            features.append(vals)

    if not features:
        raise SchemaError(f"{path}: no data rows")
    return Dataset(np.array(features, dtype=np.float64), np.array(labels, dtype=np.int64))


def save_csv(dataset: Dataset, path) -> None:
    """Write a dataset in the load_csv schema (floats round-trip exactly)."""
    path = Path(path)
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["label"] + [f"f{i}" for i in range(dataset.n_features)])
        for y, row in zip(dataset.labels, dataset.features):
            writer.writerow([int(y)] + [repr(float(v)) for v in row])


def pca_fit(train_features, n_components: int) -> PcaModel:
    """Top-N principal directions of the training sample.

    Sign convention: the largest-magnitude coordinate of each component is
    made positive, so outputs are deterministic across runs and platforms.
    """
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2:
        raise ValueError(f"expected 2-D features, got shape {X.shape}")
    n, m = X.shape
    if n < 2:
        raise ValueError(f"need at least 2 rows to fit PCA, got {n}")
    if not 1 <= n_components <= min(n, m):
        raise ValueError(f"n_components must be in [1, {min(n, m)}], got {n_components}")
    mean = X.mean(axis=0)
    centered = X - mean
    if not np.any(centered):
        raise DegenerateDataError("zero-variance data: all rows identical")
    _, s, vt = np.linalg.svd(centered, full_matrices=False)
    components = vt[:n_components].copy()
    for row in components:
        if row[np.argmax(np.abs(row))] < 0:
            row *= -1.0
    explained = (s[:n_components] ** 2) / (n - 1)
    return PcaModel(mean, components, explained)


def pca_transform(model: PcaModel, features) -> np.ndarray:
    """Project mean-centered rows onto the principal directions."""
    X = np.asarray(features, dtype=np.float64)
    squeeze = X.ndim == 1
    if squeeze:
        X = X.reshape(1, -1)
    if X.shape[1] != model.mean.shape[0]:
        raise ValueError(f"feature width {X.shape[1]} != fitted width {model.mean.shape[0]}")
    out = (X - model.mean) @ model.components.T
    return out[0] if squeeze else out


def rescale_fit(train_features) -> RescaleModel:
    """Per-column min/max of the training sample; constant columns are rejected."""
    X = np.asarray(train_features, dtype=np.float64)
    if X.ndim != 2 or X.shape[0] < 2:
        raise ValueError(f"expected >= 2 rows of features, got shape {X.shape}")
    lo, hi = X.min(axis=0), X.max(axis=0)
    flat = np.flatnonzero(hi <= lo)
    if flat.size:
        raise DegenerateDataError(f"constant feature column(s) {flat.tolist()}: max must exceed min")
    return RescaleModel(lo, hi)


def rescale_apply(model: RescaleModel, features) -> np.ndarray:
    """x -> -1 + 2 (x - min) / (max - min), clamped to [-1, +1].

    Training min maps to exactly -1 and training max to exactly +1;
    out-of-range test values clamp rather than extrapolate.
    """
    X = np.asarray(features, dtype=np.float64)
    out = -1.0 + 2.0 * (X - model.min) / (model.max - model.min)
    return np.clip(out, -1.0, 1.0)


def generate_synthetic(n_events: int, n_raw_features: int = 23, separation: float = 3.0,
                       seed: int = 0) -> Dataset:
    """Two correlated-Gaussian classes with mean separation ``separation``.

    Both classes share a random (per-seed) correlation structure with unit
    marginal variances; the class means sit ``separation`` apart along a
    random direction. Classes are balanced and rows are shuffled.
    """
    if n_events < 2 or n_events % 2:
        raise ValueError(f"n_events must be even and >= 2, got {n_events}")
    if n_raw_features < 1:
        raise ValueError(f"n_raw_features must be >= 1, got {n_raw_features}")
    if separation < 0:
        raise ValueError(f"separation must be >= 0, got {separation}")
    rng = np.random.default_rng(seed)
    m = n_raw_features

    direction = rng.normal(size=m)
    direction /= np.linalg.norm(direction)
    a = rng.normal(size=(m, m + 5))
    cov = a @ a.T
    d = np.sqrt(np.diag(cov))
    corr = cov / np.outer(d, d)
    chol = np.linalg.cholesky(corr)

    half = n_events // 2
    z = rng.normal(size=(n_events, m))
    X = z @ chol.T
    mu = 0.5 * separation * direction
    X[:half] -= mu
    X[half:] += mu
    y = np.concatenate([np.zeros(half, dtype=np.int64), np.ones(half, dtype=np.int64)])
    order = rng.permutation(n_events)
    return Dataset(X[order], y[order])


def _stratified_counts(size: int, labels: np.ndarray) -> tuple[int, int]:
    n_sig_pool = int(np.sum(labels == 1))
    frac = n_sig_pool / len(labels)
    n_sig = int(round(size * frac))
    n_sig = min(max(n_sig, 0), size)
    if n_sig == 0 or n_sig == size:
        raise DegenerateDataError(
            f"stratified sample of {size} events would hold a single class "
            f"(pool signal fraction {frac:.3f})"
        )
    return n_sig, size - n_sig


def split_datasets(dataset: Dataset, n_repetitions: int, size: int, seed: int = 0,
                   mode: str = "disjoint") -> list[tuple[Dataset, Dataset]]:
    """Stratified (train, test) pairs of ``size`` events each.

    ``disjoint`` (default): all 2*n_repetitions samples are pairwise
    disjoint; raises if the pool is too small. ``resample``: each
    repetition draws afresh from the full pool (train and test stay
    disjoint within a repetition, repetitions may overlap).
    """
    if mode not in ("disjoint", "resample"):
        raise ValueError(f"mode must be 'disjoint' or 'resample', got {mode!r}")
    if n_repetitions < 1:
        raise ValueError(f"n_repetitions must be >= 1, got {n_repetitions}")
    if size < 2:
        raise ValueError(f"size must be >= 2, got {size}")
    labels = dataset.labels
    n_sig, n_bkg = _stratified_counts(size, labels)
    sig_idx = np.flatnonzero(labels == 1)
    bkg_idx = np.flatnonzero(labels == 0)

    need_sig, need_bkg = 2 * n_sig, 2 * n_bkg
    if len(sig_idx) < need_sig or len(bkg_idx) < need_bkg:
        raise ValueError(
            f"pool too small for one repetition: need {need_sig} signal / {need_bkg} "
            f"background, have {len(sig_idx)} / {len(bkg_idx)}"
        )
    if mode == "disjoint" and (
        len(sig_idx) < need_sig * n_repetitions or len(bkg_idx) < need_bkg * n_repetitions
    ):
        raise ValueError(
            f"pool too small for {n_repetitions} disjoint repetitions: need "
            f"{need_sig * n_repetitions} signal / {need_bkg * n_repetitions} background, "
            f"have {len(sig_idx)} / {len(bkg_idx)}"
        )

    rng = np.random.default_rng(np.random.SeedSequence(seed & ((1 << 64) - 1)))
    pairs = []
    if mode == "disjoint":
        sig_pool = rng.permutation(sig_idx)
        bkg_pool = rng.permutation(bkg_idx)
        ps = pb = 0
        for _ in range(n_repetitions):
            tr = np.concatenate([sig_pool[ps:ps + n_sig], bkg_pool[pb:pb + n_bkg]])
            te = np.concatenate([sig_pool[ps + n_sig:ps + need_sig], bkg_pool[pb + n_bkg:pb + need_bkg]])
            ps += need_sig
            pb += need_bkg
            pairs.append((_subset(dataset, rng.permutation(tr)), _subset(dataset, rng.permutation(te))))
    else:
        for _ in range(n_repetitions):
            sig_pool = rng.permutation(sig_idx)
            bkg_pool = rng.permutation(bkg_idx)
            tr = np.concatenate([sig_pool[:n_sig], bkg_pool[:n_bkg]])
            te = np.concatenate([sig_pool[n_sig:need_sig], bkg_pool[n_bkg:need_bkg]])
            pairs.append((_subset(dataset, rng.permutation(tr)), _subset(dataset, rng.permutation(te))))
    return pairs


def _subset(dataset: Dataset, idx: np.ndarray) -> Dataset:
    return Dataset(dataset.features[idx], dataset.labels[idx])
