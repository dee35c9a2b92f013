"""Two-layer quantum feature map: encode a rescaled feature vector as an N-qubit state.

Each layer applies H on every qubit, then a data-encoding block:

* per qubit k: Rz(x_k) followed by Ry(x_k^d),
* an entangling chain over neighbour pairs (k-1, k) for k = 1..N-1,
  each pair contributing CNOT(k-1 -> k), Rz(((x_{k-1} + x_k)/2)^d) on
  qubit k, CNOT(k-1 -> k). Pair blocks are scheduled even-k first, then
  odd-k (ascending within each group), the alternating pattern that keeps
  the circuit depth short. Qubit 0 has no left neighbour, so it carries
  no pair rotation; the chain does not wrap around.

Gate layout (op codes and qubit slots) depends only on (n_qubits, d,
n_layers) and is cached; per-call work is just filling in the angles.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from ._pure import OP_CNOT, OP_H, OP_RY, OP_RZ
from .statevector import StateVector, apply_ops, init_state


@dataclass(frozen=True)
class FeatureMapConfig:
    """Feature-map shape: qubit count, angle exponent d, layer count."""

    n_qubits: int
    d: int = 3
    n_layers: int = 2

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError(f"n_qubits must be >= 1, got {self.n_qubits}")
        if self.d < 1:
            raise ValueError(f"d must be >= 1, got {self.d}")
        if self.n_layers < 1:
            raise ValueError(f"n_layers must be >= 1, got {self.n_layers}")


class FeatureMapCircuit:
    """Cached gate layout for one (n_qubits, d, n_layers) combination."""

    def __init__(self, n_qubits: int, d: int, n_layers: int):
        self.n_qubits = n_qubits
        self.d = d
        self.n_layers = n_layers

        rows = []       # (code, q0, q1)
        slot_x = []     # (op index, feature index): angle = x[i]
        slot_xd = []    # (op index, feature index): angle = x[i]**d
        slot_pair = []  # (op index, pair index k-1): angle = ((x[k-1]+x[k])/2)**d

        # even-k pair blocks first, then odd-k; blocks within a group act on
        # disjoint qubit pairs
        pair_order = list(range(2, n_qubits, 2)) + list(range(1, n_qubits, 2))

        for _ in range(n_layers):
            for q in range(n_qubits):
                rows.append((OP_H, q, 0))
            for q in range(n_qubits):
                slot_x.append((len(rows), q))
                rows.append((OP_RZ, q, 0))
                slot_xd.append((len(rows), q))
                rows.append((OP_RY, q, 0))
            for k in pair_order:
                rows.append((OP_CNOT, k - 1, k))
                slot_pair.append((len(rows), k - 1))
                rows.append((OP_RZ, k, 0))
                rows.append((OP_CNOT, k - 1, k))

        self.codes = np.array(rows, dtype=np.int64)
        self._x_ops, self._x_idx = _slot_arrays(slot_x)
        self._xd_ops, self._xd_idx = _slot_arrays(slot_xd)
        self._pair_ops, self._pair_idx = _slot_arrays(slot_pair)

    def angles(self, x: np.ndarray) -> np.ndarray:
        """Rotation angles for one feature vector, aligned with self.codes."""
        ang = np.zeros(len(self.codes))
        ang[self._x_ops] = x[self._x_idx]
        ang[self._xd_ops] = x[self._xd_idx] ** self.d
        if len(self._pair_ops):
            pair_means = 0.5 * (x[:-1] + x[1:])
            ang[self._pair_ops] = pair_means[self._pair_idx] ** self.d
        return ang


def _slot_arrays(slots):
    if not slots:
        return np.array([], dtype=np.intp), np.array([], dtype=np.intp)
    ops, idx = zip(*slots)
    return np.array(ops, dtype=np.intp), np.array(idx, dtype=np.intp)


@lru_cache(maxsize=None)
def circuit_for(n_qubits: int, d: int, n_layers: int) -> FeatureMapCircuit:
    return FeatureMapCircuit(n_qubits, d, n_layers)


def validate_features(x, n_qubits: int) -> np.ndarray:
    """Check length and the [-1, +1] range; return a float64 array."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 1 or len(x) != n_qubits:
        raise ValueError(f"expected {n_qubits} features, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features must be finite")
    if np.any(np.abs(x) > 1.0):
        worst = float(np.max(np.abs(x)))
        raise ValueError(f"features must lie in [-1, +1], got magnitude {worst}")
    return x


def encode(x, cfg: FeatureMapConfig) -> StateVector:
    """Feature-map state for x: the encoding circuit applied to |0...0>."""
    x = validate_features(x, cfg.n_qubits)
    circuit = circuit_for(cfg.n_qubits, cfg.d, cfg.n_layers)
    state = init_state(cfg.n_qubits)
    return apply_ops(state, circuit.codes, circuit.angles(x))


def inverse_ops(circuit: FeatureMapCircuit, x: np.ndarray):
    """(codes, angles) of the inverse encoding circuit for x.

    All gates are H/CNOT (self-inverse) or Rz/Ry (inverse = negated angle),
    so the inverse is the reversed sequence with negated angles.
    """
    codes = circuit.codes[::-1]
    angles = -circuit.angles(x)[::-1]
    return np.ascontiguousarray(codes), np.ascontiguousarray(angles)
