# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled implementations of the hot numerical kernels.

Same contracts as `_ref`; see that module for documentation.
"""

import numpy as np

from libc.math cimport hypot, log

BACKEND_NAME = "cython"


def clenshaw_cheb(const double[::1] coeffs, const double[::1] x):
    cdef Py_ssize_t n = coeffs.shape[0]
    cdef Py_ssize_t m = x.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double b0, b1, b2, xi, two_x
    if n == 1:
        out_arr[:] = coeffs[0]
        return out_arr
    with nogil:
        for i in range(m):
            xi = x[i]
            two_x = 2.0 * xi
            b1 = 0.0
            b2 = 0.0
            for k in range(n - 1, 0, -1):
                b0 = coeffs[k] + two_x * b1 - b2
                b2 = b1
                b1 = b0
            out[i] = coeffs[0] + xi * b1 - b2
    return out_arr


def horner(const double complex[::1] coeffs, const double complex[::1] z):
    cdef Py_ssize_t n = coeffs.shape[0]
    cdef Py_ssize_t m = z.shape[0]
    out_arr = np.empty(m, dtype=np.complex128)
    cdef double complex[::1] out = out_arr
    cdef Py_ssize_t i, k
    cdef double complex acc, zi
    with nogil:
        for i in range(m):
            zi = z[i]
            acc = coeffs[n - 1]
            for k in range(n - 2, -1, -1):
                acc = acc * zi + coeffs[k]
            out[i] = acc
    return out_arr


def log_abs_sum(const double complex[::1] nodes, const double[::1] weights,
                const double complex[::1] z):
    cdef Py_ssize_t n = nodes.shape[0]
    cdef Py_ssize_t m = z.shape[0]
    out_arr = np.empty(m, dtype=np.float64)
    cdef double[::1] out = out_arr
    cdef Py_ssize_t i, j
    cdef double acc, zr, zi
    with nogil:
        for i in range(m):
            zr = z[i].real
            zi = z[i].imag
            acc = 0.0
            for j in range(n):
                acc += weights[j] * log(hypot(zr - nodes[j].real, zi - nodes[j].imag))
            out[i] = acc
    return out_arr
