# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled gate kernels. Same contract as qksvm._pure.apply_ops.

Amplitude index k encodes qubit q as bit q of k (qubit 0 = least
significant bit). All loops run without the GIL on the raw buffer.
"""

from libc.math cimport cos, sin

ctypedef double complex cplx

DEF OP_H = 0
DEF OP_RZ = 1
DEF OP_RY = 2
DEF OP_CNOT = 3

cdef double INV_SQRT2 = 0.7071067811865475244


cdef void _h(cplx* a, Py_ssize_t dim, int q) noexcept nogil:
    cdef Py_ssize_t mask = (<Py_ssize_t>1) << q
    cdef Py_ssize_t i, i0, i1
    cdef cplx x, y
    for i in range(dim >> 1):
        i0 = ((i >> q) << (q + 1)) | (i & (mask - 1))
        i1 = i0 | mask
        x = a[i0]
        y = a[i1]
        a[i0] = (x + y) * INV_SQRT2
        a[i1] = (x - y) * INV_SQRT2


cdef void _rz(cplx* a, Py_ssize_t dim, int q, double theta) noexcept nogil:
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef cplx p0 = c - 1j * s
    cdef cplx p1 = c + 1j * s
    cdef Py_ssize_t mask = (<Py_ssize_t>1) << q
    cdef Py_ssize_t i, i0
    for i in range(dim >> 1):
        i0 = ((i >> q) << (q + 1)) | (i & (mask - 1))
        a[i0] = a[i0] * p0
        a[i0 | mask] = a[i0 | mask] * p1


cdef void _ry(cplx* a, Py_ssize_t dim, int q, double theta) noexcept nogil:
    cdef double c = cos(0.5 * theta)
    cdef double s = sin(0.5 * theta)
    cdef Py_ssize_t mask = (<Py_ssize_t>1) << q
    cdef Py_ssize_t i, i0, i1
    cdef cplx x, y
    for i in range(dim >> 1):
        i0 = ((i >> q) << (q + 1)) | (i & (mask - 1))
        i1 = i0 | mask
        x = a[i0]
        y = a[i1]
        a[i0] = c * x - s * y
        a[i1] = s * x + c * y


cdef void _cnot(cplx* a, Py_ssize_t dim, int c, int t) noexcept nogil:
    cdef Py_ssize_t cm = (<Py_ssize_t>1) << c
    cdef Py_ssize_t tm = (<Py_ssize_t>1) << t
    cdef Py_ssize_t i, j
    cdef cplx tmp
    for i in range(dim):
        if (i & cm) != 0 and (i & tm) == 0:
            j = i | tm
            tmp = a[i]
            a[i] = a[j]
            a[j] = tmp


def apply_ops(cplx[::1] amps, int n_qubits, long long[:, ::1] codes, double[::1] angles):
    """Apply a gate sequence in place to a 2**n_qubits amplitude array."""
    cdef Py_ssize_t dim = amps.shape[0]
    cdef Py_ssize_t m = codes.shape[0]
    cdef Py_ssize_t g
    cdef long long code
    if m != angles.shape[0]:
        raise ValueError("codes and angles length mismatch")
    for g in range(m):
        code = codes[g, 0]
        if code < OP_H or code > OP_CNOT:
            raise ValueError(f"unknown op code {code}")
    with nogil:
        for g in range(m):
            code = codes[g, 0]
            if code == OP_H:
                _h(&amps[0], dim, <int>codes[g, 1])
            elif code == OP_RZ:
                _rz(&amps[0], dim, <int>codes[g, 1], angles[g])
            elif code == OP_RY:
                _ry(&amps[0], dim, <int>codes[g, 1], angles[g])
            else:
                _cnot(&amps[0], dim, <int>codes[g, 1], <int>codes[g, 2])
