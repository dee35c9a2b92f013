"""Kernel entries and Gram matrices.

Three families:

* quantum-exact: k(xi, xj) = |<phi(xi)|phi(xj)>|^2 from two statevector
  encodings and an inner product;
* quantum-sampled: the probability of measuring all zeros on the
  inverse-encode circuit, estimated from a seeded binomial draw of
  ``shots`` measurement shots (models an ideal, noiseless sampled device);
* classical benchmarks: linear, polynomial (gamma x.x')^degree with no
  additive constant, and RBF exp(-gamma ||x - x'||^2).

Gram assembly computes each unordered pair independently (no shared
state), so pairs can be distributed over worker processes; sampled-mode
sub-seeds are a fixed function of (seed, i, j), which keeps results
independent of evaluation order. Symmetric Grams are computed once per
unordered pair and mirrored, and the quantum diagonal is set to exactly 1
without simulation.
"""

from __future__ import annotations

import hashlib
import itertools
import json
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from ._backend import backend
from .featuremap import FeatureMapConfig, circuit_for, inverse_ops, validate_features
from .statevector import zero_amplitudes

QUANTUM_EXACT = "quantum-exact"
QUANTUM_SAMPLED = "quantum-sampled"
LINEAR = "linear"
POLYNOMIAL = "polynomial"
RBF = "rbf"

KINDS = (QUANTUM_EXACT, QUANTUM_SAMPLED, LINEAR, POLYNOMIAL, RBF)
QUANTUM_KINDS = (QUANTUM_EXACT, QUANTUM_SAMPLED)
CLASSICAL_KINDS = (LINEAR, POLYNOMIAL, RBF)

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class KernelSpec:
    """Which kernel to evaluate, plus its hyperparameters and sampling seed."""

    kind: str
    shots: int = 8192
    gamma: float = 1.0
    degree: int = 3
    seed: int = 0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.kind == QUANTUM_SAMPLED and self.shots < 1:
            raise ValueError(f"shots must be >= 1, got {self.shots}")
        if self.kind in (POLYNOMIAL, RBF) and not self.gamma > 0:
            raise ValueError(f"gamma must be > 0, got {self.gamma}")
        if self.degree < 1:
            raise ValueError(f"degree must be >= 1, got {self.degree}")


@dataclass
class GramMatrix:
    """n x n symmetric kernel matrix; quantum entries lie in [0, 1]."""

    n: int
    entries: np.ndarray


def pair_subseed(seed: int, i: int, j: int) -> np.random.SeedSequence:
    """Fixed mixing of (seed, i, j); evaluation order cannot change draws."""
    return np.random.SeedSequence([seed & _MASK64, i, j])


def _encoded(x, circuit):
    amps = zero_amplitudes(circuit.n_qubits)
    backend.apply_ops(amps, circuit.n_qubits, circuit.codes, circuit.angles(x))
    return amps


def _exact_pair(xi, xj, circuit) -> float:
    v = abs(np.vdot(_encoded(xi, circuit), _encoded(xj, circuit))) ** 2
    return min(max(v, 0.0), 1.0)


def _sampled_pair(xi, xj, circuit, shots, subseed) -> float:
    if np.array_equal(xi, xj):
        return 1.0  # the inverse circuit restores |0...0> identically
    amps = _encoded(xj, circuit)
    inv_codes, inv_angles = inverse_ops(circuit, xi)
    backend.apply_ops(amps, circuit.n_qubits, inv_codes, inv_angles)
    p = min(max(abs(amps[0]) ** 2, 0.0), 1.0)
    rng = np.random.default_rng(subseed)
    return rng.binomial(shots, p) / shots


def _classical_pair(xi, xj, spec: KernelSpec) -> float:
    if spec.kind == LINEAR:
        return float(xi @ xj)
    if spec.kind == POLYNOMIAL:
        return float((spec.gamma * (xi @ xj)) ** spec.degree)
    diff = xi - xj
    return float(np.exp(-spec.gamma * (diff @ diff)))


def kernel_exact(xi, xj, cfg: FeatureMapConfig) -> float:
    """|<phi(xi)|phi(xj)>|^2 via two encodings and an inner product."""
    xi = validate_features(xi, cfg.n_qubits)
    xj = validate_features(xj, cfg.n_qubits)
    return _exact_pair(xi, xj, circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers))


def kernel_sampled(xi, xj, cfg: FeatureMapConfig, shots: int, seed: int) -> float:
    """Fraction of ``shots`` all-zero outcomes of the inverse-encode circuit.

    The state U(xj)|0> is evolved through the inverse of the xi encoding;
    the all-zeros probability p = |amplitude 0|^2 feeds a seeded binomial
    draw, statistically identical to simulating individual shots.
    """
    if shots < 1:
        raise ValueError(f"shots must be >= 1, got {shots}")
    xi = validate_features(xi, cfg.n_qubits)
    xj = validate_features(xj, cfg.n_qubits)
    circuit = circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers)
    return _sampled_pair(xi, xj, circuit, shots, np.random.SeedSequence(seed & _MASK64))


def kernel_classical(xi, xj, spec: KernelSpec) -> float:
    """Benchmark kernels: linear, polynomial or RBF."""
    if spec.kind not in CLASSICAL_KINDS:
        raise ValueError(f"kernel_classical needs a classical kind, got {spec.kind!r}")
    xi = np.ascontiguousarray(xi, dtype=np.float64)
    xj = np.ascontiguousarray(xj, dtype=np.float64)
    if xi.shape != xj.shape:
        raise ValueError(f"length mismatch: {xi.shape} vs {xj.shape}")
    return _classical_pair(xi, xj, spec)


def _as_matrix(X, name="X"):
    X = np.ascontiguousarray(X, dtype=np.float64)
    if X.ndim == 1:
        X = X.reshape(1, -1)
    if X.ndim != 2 or X.shape[0] == 0:
        raise ValueError(f"{name} must be a non-empty 2-D array, got shape {X.shape}")
    if not np.all(np.isfinite(X)):
        raise ValueError(f"{name} contains non-finite values")
    return X


def _require_cfg(spec, cfg, X):
    if cfg is None:
        raise ValueError(f"cfg is required for {spec.kind} kernels")
    if X.shape[1] != cfg.n_qubits:
        raise ValueError(f"feature width {X.shape[1]} != n_qubits {cfg.n_qubits}")
    if np.any(np.abs(X) > 1.0):
        raise ValueError("quantum kernels require features in [-1, +1]")


def _classical_matrix(A, B, spec: KernelSpec) -> np.ndarray:
    if spec.kind == LINEAR:
        return A @ B.T
    if spec.kind == POLYNOMIAL:
        return (spec.gamma * (A @ B.T)) ** spec.degree
    sq = np.sum(A * A, axis=1)[:, None] + np.sum(B * B, axis=1)[None, :] - 2.0 * (A @ B.T)
    np.maximum(sq, 0.0, out=sq)
    if A is B:
        np.fill_diagonal(sq, 0.0)
    return np.exp(-spec.gamma * sq)


def _quantum_cells(X_left, X_right, pairs, spec, cfg):
    """Kernel values for an explicit list of (i, j) index pairs."""
    circuit = circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers)
    out = np.empty(len(pairs))
    for t, (i, j) in enumerate(pairs):
        if spec.kind == QUANTUM_EXACT:
            out[t] = _exact_pair(X_left[i], X_right[j], circuit)
        else:
            out[t] = _sampled_pair(
                X_left[i], X_right[j], circuit, spec.shots, pair_subseed(spec.seed, i, j)
            )
    return out


def _chunk_worker(payload):
    X_left, X_right, pairs, spec, cfg = payload
    return _quantum_cells(X_left, X_right if X_right is not None else X_left, pairs, spec, cfg)


def _run_chunks(X_left, X_right, all_pairs, spec, cfg, n_jobs):
    if n_jobs is None or n_jobs == 0:
        n_jobs = os.cpu_count() or 1
    if n_jobs == 1 or len(all_pairs) < 2:
        return _quantum_cells(X_left, X_right if X_right is not None else X_left, all_pairs, spec, cfg)
    n_chunks = min(len(all_pairs), n_jobs * 4)
    bounds = np.linspace(0, len(all_pairs), n_chunks + 1).astype(int)
    chunks = [all_pairs[a:b] for a, b in zip(bounds[:-1], bounds[1:]) if b > a]
    payloads = [(X_left, X_right, chunk, spec, cfg) for chunk in chunks]
    with ProcessPoolExecutor(max_workers=n_jobs) as pool:
        parts = list(pool.map(_chunk_worker, payloads))
    return np.concatenate(parts)


def gram_matrix(X, spec: KernelSpec, cfg: FeatureMapConfig | None = None, n_jobs: int = 1) -> GramMatrix:
    """Symmetric kernel matrix over a sample.

    The upper triangle is computed once per unordered pair and mirrored;
    the diagonal of quantum kernels is set to exactly 1. ``n_jobs``
    distributes pair evaluation over worker processes (0 = all cores);
    results are independent of scheduling.
    """
    X = _as_matrix(X)
    n = X.shape[0]
    if spec.kind in CLASSICAL_KINDS:
        full = _classical_matrix(X, X, spec)
        entries = np.triu(full)
        entries = entries + np.triu(full, 1).T
        return GramMatrix(n, entries)

    _require_cfg(spec, cfg, X)
    rows, cols = np.triu_indices(n, k=1)
    pairs = list(zip(rows.tolist(), cols.tolist()))
    entries = np.eye(n)
    if pairs:
        values = _run_chunks(X, None, pairs, spec, cfg, n_jobs)
        entries[rows, cols] = values
        entries[cols, rows] = values
    return GramMatrix(n, entries)


def gram_cross(X_test, X_train, spec: KernelSpec, cfg: FeatureMapConfig | None = None, n_jobs: int = 1) -> np.ndarray:
    """Rectangular kernel matrix: entry [i][j] = k(X_test[i], X_train[j])."""
    X_test = _as_matrix(X_test, "X_test")
    X_train = _as_matrix(X_train, "X_train")
    if X_test.shape[1] != X_train.shape[1]:
        raise ValueError(f"feature widths differ: {X_test.shape[1]} vs {X_train.shape[1]}")
    if spec.kind in CLASSICAL_KINDS:
        return _classical_matrix(X_test, X_train, spec)

    _require_cfg(spec, cfg, X_test)
    _require_cfg(spec, cfg, X_train)
    cells = list(itertools.product(range(X_test.shape[0]), range(X_train.shape[0])))
    values = _run_chunks(X_test, X_train, cells, spec, cfg, n_jobs)
    return values.reshape(X_test.shape[0], X_train.shape[0])


# ---------------------------------------------------------------------------
# Gram cache: expensive quantum Grams are reusable across hyperparameter scans.
# Files: <key>.npz (entries) + <key>.json (human-readable metadata). The key
# hashes the feature bytes, the kernel spec (including seed) and the
# feature-map config, so a hit is bitwise-equivalent to recomputation.

def _spec_dict(spec: KernelSpec) -> dict:
    return {
        "kind": spec.kind,
        "shots": spec.shots,
        "gamma": spec.gamma,
        "degree": spec.degree,
        "seed": spec.seed,
    }


def _cfg_dict(cfg: FeatureMapConfig | None):
    if cfg is None:
        return None
    return {"n_qubits": cfg.n_qubits, "d": cfg.d, "n_layers": cfg.n_layers}


def gram_cache_key(X, spec: KernelSpec, cfg: FeatureMapConfig | None = None, X_right=None) -> str:
    h = hashlib.sha256()
    h.update(np.ascontiguousarray(X, dtype=np.float64).tobytes())
    if X_right is not None:
        h.update(b"cross")
        h.update(np.ascontiguousarray(X_right, dtype=np.float64).tobytes())
    h.update(json.dumps([_spec_dict(spec), _cfg_dict(cfg)], sort_keys=True).encode())
    return h.hexdigest()


def save_gram(cache_dir, key: str, entries: np.ndarray, meta: dict) -> Path:
    cache_dir = Path(cache_dir)
    cache_dir.mkdir(parents=True, exist_ok=True)
    np.savez(cache_dir / f"{key}.npz", entries=entries)
    (cache_dir / f"{key}.json").write_text(json.dumps(meta, indent=2, sort_keys=True))
    return cache_dir / f"{key}.npz"


def load_gram(cache_dir, key: str) -> np.ndarray | None:
    path = Path(cache_dir) / f"{key}.npz"
    if not path.exists():
        return None
    with np.load(path) as data:
        return data["entries"]


def gram_matrix_cached(X, spec, cfg=None, n_jobs=1, cache_dir=None) -> GramMatrix:
    """gram_matrix with an optional on-disk cache."""
    if cache_dir is None:
        return gram_matrix(X, spec, cfg, n_jobs)
    X = _as_matrix(X)
    key = gram_cache_key(X, spec, cfg)
    cached = load_gram(cache_dir, key)
    if cached is not None:
        return GramMatrix(X.shape[0], cached)
    gram = gram_matrix(X, spec, cfg, n_jobs)
    meta = {"n": gram.n, "spec": _spec_dict(spec), "cfg": _cfg_dict(cfg), "kind": "gram"}
    save_gram(cache_dir, key, gram.entries, meta)
    return gram


def gram_cross_cached(X_test, X_train, spec, cfg=None, n_jobs=1, cache_dir=None) -> np.ndarray:
    """gram_cross with an optional on-disk cache."""
    if cache_dir is None:
        return gram_cross(X_test, X_train, spec, cfg, n_jobs)
    X_test = _as_matrix(X_test, "X_test")
    X_train = _as_matrix(X_train, "X_train")
    key = gram_cache_key(X_test, spec, cfg, X_right=X_train)
    cached = load_gram(cache_dir, key)
    if cached is not None:
        return cached
    cross = gram_cross(X_test, X_train, spec, cfg, n_jobs)
    meta = {
        "shape": list(cross.shape),
        "spec": _spec_dict(spec),
        "cfg": _cfg_dict(cfg),
        "kind": "cross",
    }
    save_gram(cache_dir, key, cross, meta)
    return cross
