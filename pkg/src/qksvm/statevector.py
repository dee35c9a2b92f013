"""Dense statevector simulation of N-qubit circuits.

The simulator supports exactly the four gates the feature map needs:
Hadamard, Rz, Ry and CNOT. Gates mutate the amplitude array in place
with stride-based index arithmetic; no 2^N x 2^N matrices are built.

Conventions (fixed once, referenced by all tests):

* Bit ordering: amplitude index k encodes qubit q as bit q of k, so
  qubit 0 is the least significant bit. State |10> on two qubits
  (qubit 1 set, qubit 0 clear) is amplitude index 2.
* Half-angle rotations: Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2}),
  Ry(theta) = [[cos(theta/2), -sin(theta/2)], [sin(theta/2), cos(theta/2)]].
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ._backend import backend
from ._pure import OP_CNOT, OP_H, OP_RY, OP_RZ
from .errors import ConfigError

MAX_QUBITS = 24  # 2^24 complex amplitudes = 256 MiB, the desk-scale memory bound


@dataclass
class StateVector:
    """An N-qubit pure state: 2^n_qubits complex amplitudes with unit L2 norm."""

    n_qubits: int
    amplitudes: np.ndarray

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.n_qubits, self.amplitudes.copy())


def zero_amplitudes(n_qubits: int) -> np.ndarray:
    """Raw |0...0> amplitude array (fast path used by the kernel module)."""
    amps = np.zeros(1 << n_qubits, dtype=np.complex128)
    amps[0] = 1.0
    return amps


def init_state(n_qubits: int, max_qubits: int = MAX_QUBITS) -> StateVector:
    """Prepare |0...0> on n_qubits qubits."""
    if not 1 <= n_qubits <= max_qubits:
        raise ConfigError(f"n_qubits must be in [1, {max_qubits}], got {n_qubits}")
    return StateVector(n_qubits, zero_amplitudes(n_qubits))


def _check_qubit(state: StateVector, qubit: int) -> None:
    if not 0 <= qubit < state.n_qubits:
        raise ValueError(f"qubit {qubit} out of range for {state.n_qubits} qubits")


def _single(state: StateVector, code: int, qubit: int, theta: float = 0.0) -> StateVector:
    codes = np.array([[code, qubit, 0]], dtype=np.int64)
    angles = np.array([theta], dtype=np.float64)
    backend.apply_ops(state.amplitudes, state.n_qubits, codes, angles)
    return state


def apply_h(state: StateVector, qubit: int) -> StateVector:
    """Hadamard on one qubit (in place)."""
    _check_qubit(state, qubit)
    return _single(state, OP_H, qubit)


def apply_rz(state: StateVector, qubit: int, theta: float) -> StateVector:
    """Rz(theta) = diag(e^{-i theta/2}, e^{+i theta/2}) on one qubit (in place)."""
    _check_qubit(state, qubit)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return _single(state, OP_RZ, qubit, theta)


def apply_ry(state: StateVector, qubit: int, theta: float) -> StateVector:
    """Ry(theta) rotation on one qubit (in place)."""
    _check_qubit(state, qubit)
    if not math.isfinite(theta):
        raise ValueError(f"theta must be finite, got {theta}")
    return _single(state, OP_RY, qubit, theta)


def apply_cnot(state: StateVector, control: int, target: int) -> StateVector:
    """CNOT: flip the target bit on basis states where the control bit is 1."""
    _check_qubit(state, control)
    _check_qubit(state, target)
    if control == target:
        raise ValueError("control and target must differ")
    codes = np.array([[OP_CNOT, control, target]], dtype=np.int64)
    backend.apply_ops(state.amplitudes, state.n_qubits, codes, np.zeros(1))
    return state


def apply_ops(state: StateVector, codes: np.ndarray, angles: np.ndarray) -> StateVector:
    """Apply a whole gate sequence in one backend call (in place)."""
    backend.apply_ops(state.amplitudes, state.n_qubits, codes, angles)
    return state


def inner_product(a: StateVector, b: StateVector) -> complex:
    """<a|b> = sum_k conj(a_k) b_k."""
    if a.n_qubits != b.n_qubits:
        raise ValueError(f"qubit counts differ: {a.n_qubits} vs {b.n_qubits}")
    return complex(np.vdot(a.amplitudes, b.amplitudes))
