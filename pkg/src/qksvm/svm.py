"""Soft-margin SVM on a precomputed Gram matrix.

Training solves the standard dual

    max  sum_i a_i - 1/2 sum_ij a_i a_j y_i y_j K_ij
    s.t. 0 <= a_i <= C,   sum_i a_i y_i = 0

by sequential pairwise coordinate optimization: each step picks the
most-violating pair from the optimality conditions and solves the
two-variable subproblem in closed form, stopping when the KKT violation
gap drops below ``tol``. Labels arrive as {0, 1} and are mapped to
{-1, +1} at this boundary.

The decision score for a test point with kernel row r is
``sum_i a_i y_i r_i + b``; its sign is the class prediction. Platt
calibration fits a sigmoid 1/(1 + exp(A s + B)) to the training scores
by regularized maximum likelihood; being strictly monotone, it leaves
ROC curves and AUC untouched.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import CalibrationError, ConvergenceError, DegenerateDataError
from .kernel import GramMatrix


@dataclass
class SvmModel:
    """Dual solution: coefficients, bias, support set, internal +-1 labels."""

    alpha: np.ndarray
    bias: float
    support_indices: np.ndarray
    labels: np.ndarray
    C: float


@dataclass
class PlattCalibration:
    """Sigmoid parameters: p(signal | score s) = 1 / (1 + exp(A*s + B))."""

    A: float
    B: float


def _as_gram_array(gram) -> np.ndarray:
    K = gram.entries if isinstance(gram, GramMatrix) else np.asarray(gram, dtype=np.float64)
    if K.ndim != 2 or K.shape[0] != K.shape[1]:
        raise ValueError(f"gram must be square, got shape {K.shape}")
    if not np.array_equal(K, K.T):
        raise ValueError("gram matrix is not symmetric")
    return K


def train(gram, labels, C: float, tol: float = 1e-3, max_iter: int | None = None) -> SvmModel:
    """Fit the dual on a precomputed Gram; stop at KKT violation < tol."""
    K = _as_gram_array(gram)
    labels = np.asarray(labels)
    n = K.shape[0]
    if labels.shape != (n,):
        raise ValueError(f"labels shape {labels.shape} does not match gram size {n}")
    if not C > 0:
        raise ValueError(f"C must be > 0, got {C}")
    if set(np.unique(labels)) - {0, 1}:
        raise ValueError("labels must be in {0, 1}")
    y = 2.0 * labels - 1.0
    if np.all(y > 0) or np.all(y < 0):
        raise DegenerateDataError("training labels contain a single class")
    if max_iter is None:
        max_iter = max(10_000, 1000 * n)

    alpha = np.zeros(n)
    g = np.zeros(n)  # g_i = sum_j alpha_j y_j K_ij, updated incrementally
    pos = y > 0
    # Variables within bound_eps of a box edge count as on it; otherwise a
    # variable parked one ulp off its bound gets reselected forever with no
    # representable room to move.
    bound_eps = 1e-12 * C

    for _ in range(max_iter):
        minus_f = y - g
        at_upper = alpha >= C - bound_eps
        at_lower = alpha <= bound_eps
        up = (pos & ~at_upper) | (~pos & ~at_lower)
        low = (pos & ~at_lower) | (~pos & ~at_upper)

        up_idx = np.flatnonzero(up)
        low_idx = np.flatnonzero(low)
        if not len(up_idx) or not len(low_idx):
            break  # no feasible ascent direction remains
        i = up_idx[np.argmax(minus_f[up_idx])]
        j = low_idx[np.argmin(minus_f[low_idx])]
        gap = minus_f[i] - minus_f[j]
        if gap < tol:
            break

        # step t >= 0 along alpha_i += y_i t, alpha_j -= y_j t (keeps sum a.y)
        eta = max(K[i, i] + K[j, j] - 2.0 * K[i, j], 1e-12)
        t_star = gap / eta
        t_i_max = C - alpha[i] if y[i] > 0 else alpha[i]
        t_j_max = alpha[j] if y[j] > 0 else C - alpha[j]
        t = min(t_star, t_i_max, t_j_max)
        ai_old, aj_old = alpha[i], alpha[j]
        if t == t_i_max:  # i hits its box edge: place it there exactly
            ai = C if y[i] > 0 else 0.0
        else:
            ai = min(max(ai_old + y[i] * t, 0.0), C)
        if t == t_j_max:
            aj = 0.0 if y[j] > 0 else C
        else:
            aj = min(max(aj_old - y[j] * t, 0.0), C)
        alpha[i], alpha[j] = ai, aj
        g += (ai - ai_old) * y[i] * K[:, i] + (aj - aj_old) * y[j] * K[:, j]
    else:
        raise ConvergenceError(
            f"SMO did not reach KKT tolerance {tol} in {max_iter} iterations (gap {gap:.3e})"
        )

    margin = (alpha > bound_eps) & (alpha < C - bound_eps)
    minus_f = y - g
    if np.any(margin):
        bias = float(np.mean(minus_f[margin]))
    else:
        bias = float((minus_f[i] + minus_f[j]) / 2.0)
    return SvmModel(alpha, bias, np.flatnonzero(alpha > 0.0), y, C)


def kkt_gap(model: SvmModel, gram) -> float:
    """Final KKT violation of a trained model (diagnostic)."""
    K = _as_gram_array(gram)
    g = K @ (model.alpha * model.labels)
    minus_f = model.labels - g
    pos = model.labels > 0
    eps = 1e-12 * model.C
    at_upper = model.alpha >= model.C - eps
    at_lower = model.alpha <= eps
    up = (pos & ~at_upper) | (~pos & ~at_lower)
    low = (pos & ~at_lower) | (~pos & ~at_upper)
    return float(np.max(minus_f[up]) - np.min(minus_f[low]))


def decision(model: SvmModel, kernel_row) -> float:
    """sum_i alpha_i y_i k(x_i, x) + b for one test point."""
    row = np.asarray(kernel_row, dtype=np.float64)
    if row.shape != model.alpha.shape:
        raise ValueError(f"kernel row length {row.shape} != training size {model.alpha.shape}")
    return float(row @ (model.alpha * model.labels) + model.bias)


def decision_batch(model: SvmModel, kernel_rows) -> np.ndarray:
    """Decision scores for a (n_test, n_train) cross-kernel matrix."""
    rows = np.asarray(kernel_rows, dtype=np.float64)
    if rows.ndim != 2 or rows.shape[1] != len(model.alpha):
        raise ValueError(f"expected (n_test, {len(model.alpha)}) rows, got {rows.shape}")
    return rows @ (model.alpha * model.labels) + model.bias


def training_scores(model: SvmModel, gram) -> np.ndarray:
    return _as_gram_array(gram) @ (model.alpha * model.labels) + model.bias


def platt_calibrate(model: SvmModel, gram, labels, max_iter: int = 200) -> PlattCalibration:
    """Regularized ML sigmoid fit on training decision scores.

    All-equal scores yield the flat calibration (A=0, B=0), i.e.
    probability 0.5 everywhere.
    """
    labels = np.asarray(labels)
    scores = training_scores(model, gram)
    if np.ptp(scores) == 0.0:
        return PlattCalibration(0.0, 0.0)

    n1 = int(np.sum(labels == 1))
    n0 = len(labels) - n1
    hi, lo = (n1 + 1.0) / (n1 + 2.0), 1.0 / (n0 + 2.0)
    t = np.where(labels == 1, hi, lo)

    A, B = 0.0, math.log((n0 + 1.0) / (n1 + 1.0))
    sigma = 1e-12  # Hessian ridge

    def nll(a, b):
        f = a * scores + b
        return float(np.sum(np.where(f >= 0, t * f + np.log1p(np.exp(-f)), (t - 1) * f + np.log1p(np.exp(f)))))

    fval = nll(A, B)
    for _ in range(max_iter):
        f = A * scores + B
        ef = np.exp(-np.abs(f))
        p = np.where(f >= 0, ef / (1.0 + ef), 1.0 / (1.0 + ef))
        q = 1.0 - p
        d1 = t - p
        d2 = p * q
        grad_a = float(np.dot(scores, d1))
        grad_b = float(np.sum(d1))
        if abs(grad_a) < 1e-5 and abs(grad_b) < 1e-5:
            return PlattCalibration(A, B)
        h11 = float(np.dot(scores * scores, d2)) + sigma
        h22 = float(np.sum(d2)) + sigma
        h21 = float(np.dot(scores, d2))
        det = h11 * h22 - h21 * h21
        dA = -(h22 * grad_a - h21 * grad_b) / det
        dB = -(-h21 * grad_a + h11 * grad_b) / det
        gd = grad_a * dA + grad_b * dB
        step = 1.0
        while step >= 1e-10:
            new_a, new_b = A + step * dA, B + step * dB
            new_f = nll(new_a, new_b)
            if new_f < fval + 1e-4 * step * gd:
                A, B, fval = new_a, new_b, new_f
                break
            step /= 2.0
        else:
            raise CalibrationError(
                f"line search failed at A={A:.4g} B={B:.4g} grad=({grad_a:.3e},{grad_b:.3e})"
            )
    raise CalibrationError(f"no convergence in {max_iter} Newton iterations")


def predict_proba(calibration: PlattCalibration, scores) -> np.ndarray:
    """Calibrated signal probabilities for raw decision scores."""
    f = calibration.A * np.asarray(scores, dtype=np.float64) + calibration.B
    ef = np.exp(-np.abs(f))
    return np.where(f >= 0, ef / (1.0 + ef), 1.0 / (1.0 + ef))


# ---------------------------------------------------------------------------
# JSON serialization. Layout:
# {
#   "alpha": [...], "bias": float, "support_indices": [...],
#   "labels": [-1/+1 ints], "C": float,
#   "kernel": {...} | null,            # optional kernel-spec reference
#   "calibration": {"A": ..., "B": ...} | null
# }

def model_to_dict(model: SvmModel, kernel_ref: dict | None = None,
                  calibration: PlattCalibration | None = None) -> dict:
    return {
        "alpha": model.alpha.tolist(),
        "bias": model.bias,
        "support_indices": model.support_indices.tolist(),
        "labels": [int(v) for v in model.labels],
        "C": model.C,
        "kernel": kernel_ref,
        "calibration": None if calibration is None else {"A": calibration.A, "B": calibration.B},
    }


def model_from_dict(data: dict) -> tuple[SvmModel, PlattCalibration | None]:
    model = SvmModel(
        alpha=np.asarray(data["alpha"], dtype=np.float64),
        bias=float(data["bias"]),
        support_indices=np.asarray(data["support_indices"], dtype=np.intp),
        labels=np.asarray(data["labels"], dtype=np.float64),
        C=float(data["C"]),
    )
    calib = data.get("calibration")
    return model, None if calib is None else PlattCalibration(calib["A"], calib["B"])


def save_model(path, model: SvmModel, kernel_ref: dict | None = None,
               calibration: PlattCalibration | None = None) -> None:
    Path(path).write_text(json.dumps(model_to_dict(model, kernel_ref, calibration), indent=2))


def load_model(path) -> tuple[SvmModel, PlattCalibration | None]:
    return model_from_dict(json.loads(Path(path).read_text()))
