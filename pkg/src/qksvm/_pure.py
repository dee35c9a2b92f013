"""Pure-numpy gate kernels. Fallback used when the compiled core is absent.

Both backends implement the same contract:

    apply_ops(amps, n_qubits, codes, angles) -> None   (in place)

``codes`` is an int64 array of shape (m, 3): column 0 is the op code,
column 1 the qubit (or CNOT control), column 2 the CNOT target (0 for
single-qubit ops). ``angles`` is a float64 array of shape (m,), zero for
H and CNOT rows.

Bit-ordering convention: amplitude index k encodes qubit q as bit q of k,
i.e. qubit 0 is the least significant bit.
"""

import math

import numpy as np

OP_H = 0
OP_RZ = 1
OP_RY = 2
OP_CNOT = 3

_INV_SQRT2 = 1.0 / math.sqrt(2.0)


def _halves(amps, n_qubits, qubit):
    """Views of the qubit=0 and qubit=1 halves of the state."""
    v = amps.reshape(1 << (n_qubits - qubit - 1), 2, 1 << qubit)
    return v[:, 0, :], v[:, 1, :]


def _apply_h(amps, n_qubits, qubit):
    lo, hi = _halves(amps, n_qubits, qubit)
    tmp = lo.copy()
    lo += hi
    lo *= _INV_SQRT2
    hi *= -1.0
    hi += tmp
    hi *= _INV_SQRT2


def _apply_rz(amps, n_qubits, qubit, theta):
    half = 0.5 * theta
    c, s = math.cos(half), math.sin(half)
    lo, hi = _halves(amps, n_qubits, qubit)
    lo *= complex(c, -s)
    hi *= complex(c, s)


def _apply_ry(amps, n_qubits, qubit, theta):
    half = 0.5 * theta
    c, s = math.cos(half), math.sin(half)
    lo, hi = _halves(amps, n_qubits, qubit)
    tmp = lo.copy()
    lo *= c
    lo -= s * hi
    hi *= c
    hi += s * tmp


def _apply_cnot(amps, n_qubits, control, target):
    v = amps.reshape((2,) * n_qubits)
    # axis j of the reshaped view corresponds to qubit n_qubits-1-j
    src = [slice(None)] * n_qubits
    src[n_qubits - 1 - control] = 1
    dst = list(src)
    src[n_qubits - 1 - target] = 0
    dst[n_qubits - 1 - target] = 1
    src, dst = tuple(src), tuple(dst)
    tmp = v[src].copy()
    v[src] = v[dst]
    v[dst] = tmp


def apply_ops(amps, n_qubits, codes, angles):
    """Apply a gate sequence in place to a 2**n_qubits amplitude array."""
    for g in range(codes.shape[0]):
        code = codes[g, 0]
        if code == OP_H:
            _apply_h(amps, n_qubits, codes[g, 1])
        elif code == OP_RZ:
            _apply_rz(amps, n_qubits, codes[g, 1], angles[g])
        elif code == OP_RY:
            _apply_ry(amps, n_qubits, codes[g, 1], angles[g])
        elif code == OP_CNOT:
            _apply_cnot(amps, n_qubits, codes[g, 1], codes[g, 2])
        else:
            raise ValueError(f"unknown op code {code}")
