"""Independent reference implementations used to pin expected values.

These deliberately take the slow, obviously-correct route: full
2^N x 2^N Kronecker-product matrices for circuits, a dense QP solver for
the SVM dual, and exhaustive pair counting for AUC. None of them share
code with the library paths they check.
"""

import numpy as np

from qksvm._pure import OP_CNOT, OP_H, OP_RY, OP_RZ

_H = np.array([[1.0, 1.0], [1.0, -1.0]]) / np.sqrt(2.0)


def rz_matrix(theta: float) -> np.ndarray:
    return np.diag([np.exp(-0.5j * theta), np.exp(0.5j * theta)])


def ry_matrix(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2.0), np.sin(theta / 2.0)
    return np.array([[c, -s], [s, c]])


def single_qubit_matrix(u: np.ndarray, n_qubits: int, qubit: int) -> np.ndarray:
    """Embed a 2x2 gate on one qubit (qubit 0 = least significant bit)."""
    return np.kron(np.eye(1 << (n_qubits - qubit - 1)), np.kron(u, np.eye(1 << qubit)))


def cnot_matrix(n_qubits: int, control: int, target: int) -> np.ndarray:
    dim = 1 << n_qubits
    m = np.zeros((dim, dim))
    for col in range(dim):
        row = col ^ (1 << target) if (col >> control) & 1 else col
        m[row, col] = 1.0
    return m


def circuit_matrix(codes, angles, n_qubits: int) -> np.ndarray:
    """Full unitary of a gate sequence (later gates left-multiplied)."""
    u = np.eye(1 << n_qubits, dtype=np.complex128)
    for (code, a, b), theta in zip(codes, angles):
        if code == OP_H:
            g = single_qubit_matrix(_H, n_qubits, a)
        elif code == OP_RZ:
            g = single_qubit_matrix(rz_matrix(theta), n_qubits, a)
        elif code == OP_RY:
            g = single_qubit_matrix(ry_matrix(theta), n_qubits, a)
        elif code == OP_CNOT:
            g = cnot_matrix(n_qubits, a, b)
        else:
            raise ValueError(f"unknown op code {code}")
        u = g @ u
    return u


def random_circuit(rng: np.random.Generator, n_qubits: int, n_gates: int):
    """Random (codes, angles) drawn uniformly over the four gate types."""
    rows, angles = [], []
    for _ in range(n_gates):
        code = rng.integers(0, 4) if n_qubits > 1 else int(rng.integers(0, 3))
        if code == OP_CNOT:
            c, t = rng.choice(n_qubits, size=2, replace=False)
            rows.append((OP_CNOT, int(c), int(t)))
            angles.append(0.0)
        else:
            q = int(rng.integers(0, n_qubits))
            rows.append((int(code), q, 0))
            angles.append(float(rng.uniform(-2 * np.pi, 2 * np.pi)) if code else 0.0)
    return np.array(rows, dtype=np.int64), np.array(angles, dtype=np.float64)


def auc_pair_counting(scores, labels) -> float:
    """Exhaustive Mann-Whitney: wins + half-ties over all signal-background pairs."""
    scores = np.asarray(scores, dtype=np.float64)
    labels = np.asarray(labels)
    sig = scores[labels == 1]
    bkg = scores[labels == 0]
    wins = 0.0
    for s in sig:
        for b in bkg:
            if s > b:
                wins += 1.0
            elif s == b:
                wins += 0.5
    return wins / (len(sig) * len(bkg))


def svm_dual_qp(K, y, C, tol=1e-12):
    """Dense QP solution of the soft-margin dual via cvxopt.

    Returns (alpha, bias, dual_objective); bias is the average of y_i - f_i
    over margin support vectors, matching the library's convention.
    """
    from cvxopt import matrix, solvers

    K = np.asarray(K, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    n = len(y)
    P = matrix(np.outer(y, y) * K + 1e-10 * np.eye(n))
    q = matrix(-np.ones(n))
    G = matrix(np.vstack([-np.eye(n), np.eye(n)]))
    h = matrix(np.hstack([np.zeros(n), np.full(n, C)]))
    A = matrix(y.reshape(1, n))
    b = matrix(0.0)
    sol = solvers.qp(
        P, q, G, h, A, b,
        options={"show_progress": False, "abstol": tol, "reltol": tol, "feastol": 1e-10},
    )
    alpha = np.asarray(sol["x"]).ravel()
    alpha = np.clip(alpha, 0.0, C)
    f = K @ (alpha * y)
    # same bias convention as the library: average of y - f over margin
    # support vectors, else the midpoint of the feasible bias interval
    margin = (alpha > 1e-6 * C) & (alpha < C * (1 - 1e-6))
    if np.any(margin):
        bias = float(np.mean((y - f)[margin]))
    else:
        pos = y > 0
        at_upper = alpha >= C * (1 - 1e-6)
        at_lower = alpha <= 1e-6 * C
        up = (pos & ~at_upper) | (~pos & ~at_lower)
        low = (pos & ~at_lower) | (~pos & ~at_upper)
        bias = float((np.max((y - f)[up]) + np.min((y - f)[low])) / 2.0)
    objective = float(alpha.sum() - 0.5 * (alpha * y) @ K @ (alpha * y))
    return alpha, bias, objective
