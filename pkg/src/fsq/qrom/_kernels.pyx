# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled inner loops for batched state-vector simulation.

States are (D, K) complex128 arrays: K independent columns over the register
layout (control, query input, outputs, query output, work).
"""

import numpy as np

cimport numpy as cnp

cnp.import_array()


def xor_oracle(cnp.complex128_t[:, ::1] states, cnp.int64_t[:, ::1] tables,
               Py_ssize_t n_x, Py_ssize_t n_o, Py_ssize_t n_y, Py_ssize_t n_w):
    """|1, x, o, y, w> -> |1, x, o, y ^ T_k[x], w> independently per column k."""
    cdef Py_ssize_t D = states.shape[0], K = states.shape[1]
    out_arr = np.empty((D, K), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out = out_arr
    cdef Py_ssize_t half = n_x * n_o * n_y * n_w
    cdef Py_ssize_t row_x = n_o * n_y * n_w, row_y = n_w
    cdef Py_ssize_t d, k, x, o, y, w, t, src, dst, base
    for d in range(half):
        for k in range(K):
            out[d, k] = states[d, k]
    for x in range(n_x):
        for o in range(n_o):
            base = half + x * row_x + o * n_y * n_w
            for y in range(n_y):
                for w in range(n_w):
                    dst = base + y * row_y + w
                    for k in range(K):
                        t = tables[k, x]
                        src = base + (y ^ t) * row_y + w
                        out[dst, k] = states[src, k]
    return out_arr


def project(cnp.complex128_t[:, ::1] states, cnp.int64_t[::1] reg_values, cnp.int64_t[::1] targets):
    """Zero every amplitude whose register value differs from the column's target."""
    cdef Py_ssize_t D = states.shape[0], K = states.shape[1]
    out_arr = np.empty((D, K), dtype=np.complex128)
    cdef cnp.complex128_t[:, ::1] out = out_arr
    cdef Py_ssize_t d, k
    cdef cnp.int64_t v
    for d in range(D):
        v = reg_values[d]
        for k in range(K):
            if v == targets[k]:
                out[d, k] = states[d, k]
            else:
                out[d, k] = 0
    return out_arr


def masked_norms(cnp.complex128_t[:, ::1] states, cnp.uint8_t[:, ::1] mask):
    """Per-column squared norm restricted to mask."""
    cdef Py_ssize_t D = states.shape[0], K = states.shape[1]
    out_arr = np.zeros(K, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t d, k
    cdef cnp.complex128_t a
    # branch-free: random masks defeat branch prediction
    for d in range(D):
        for k in range(K):
            a = states[d, k]
            out[k] += <double>mask[d, k] * (a.real * a.real + a.imag * a.imag)
    return out_arr
