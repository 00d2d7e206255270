# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled log-sum-exp kernels for the Schrodinger fixed-point updates.

Both kernels take a dense cost block and return the soft-minimum

    out = -eps * log sum exp((pot - cost) / eps + log_w)

reduced over columns (``softmin_rows``) or over rows (``softmin_cols``).
The reduction is max-stabilised, so ``exp`` never sees a positive argument.
"""

import numpy as np
from libc.math cimport exp, log


def softmin_rows(const double[:, ::1] cost, const double[::1] pot,
                 const double[::1] log_w, double eps, double[::1] out):
    cdef Py_ssize_t n = cost.shape[0], m = cost.shape[1], i, j
    cdef double inv = 1.0 / eps, mx, acc, v
    cdef double[::1] h = np.empty(m, dtype=np.float64)
    for j in range(m):
        h[j] = pot[j] * inv + log_w[j]
    with nogil:
        for i in range(n):
            mx = h[0] - cost[i, 0] * inv
            for j in range(1, m):
                v = h[j] - cost[i, j] * inv
                if v > mx:
                    mx = v
            acc = 0.0
            for j in range(m):
                acc = acc + exp(h[j] - cost[i, j] * inv - mx)
            out[i] = -eps * (mx + log(acc))


def softmin_cols(const double[:, ::1] cost, const double[::1] pot,
                 const double[::1] log_w, double eps, double[::1] out):
    cdef Py_ssize_t n = cost.shape[0], m = cost.shape[1], i, j
    cdef double inv = 1.0 / eps, v, hi
    cdef double[::1] h = np.empty(n, dtype=np.float64)
    cdef double[::1] mx = np.empty(m, dtype=np.float64)
    cdef double[::1] acc = np.zeros(m, dtype=np.float64)
    for i in range(n):
        h[i] = pot[i] * inv + log_w[i]
    with nogil:
        for j in range(m):
            mx[j] = h[0] - cost[0, j] * inv
        for i in range(1, n):
            hi = h[i]
            for j in range(m):
                v = hi - cost[i, j] * inv
                if v > mx[j]:
                    mx[j] = v
        for i in range(n):
            hi = h[i]
            for j in range(m):
                acc[j] = acc[j] + exp(hi - cost[i, j] * inv - mx[j])
        for j in range(m):
            out[j] = -eps * (mx[j] + log(acc[j]))
