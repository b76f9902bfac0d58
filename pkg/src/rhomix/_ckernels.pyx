# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops. Signatures mirror ``_pykernels``."""
import numpy as np
cimport numpy as cnp

cnp.import_array()


def var_filter(const double[:, ::1] A, const double[::1] x0, const double[:, ::1] E):
    """Run ``x[t] = A x[t-1] + E[t]`` starting from ``x[-1] = x0``."""
    cdef Py_ssize_t T = E.shape[0]
    cdef Py_ssize_t p = E.shape[1]
    cdef Py_ssize_t t, i, j
    cdef double acc
    out_arr = np.empty((T, p), dtype=np.float64)
    cdef double[:, ::1] out = out_arr
    prev_arr = np.array(x0, dtype=np.float64, copy=True)
    cdef double[::1] prev = prev_arr
    for t in range(T):
        for i in range(p):
            acc = 0.0
            for j in range(p):
                acc = acc + A[i, j] * prev[j]
            out[t, i] = acc + E[t, i]
        for i in range(p):
            prev[i] = out[t, i]
    return out_arr


def contingency_phi2(const cnp.int64_t[::1] cx, const cnp.int64_t[::1] cy, Py_ssize_t bins):
    """Chi-square statistic divided by n for two integer-coded samples."""
    cdef Py_ssize_t n = cx.shape[0]
    cdef Py_ssize_t s, i, j
    counts_arr = np.zeros((bins, bins), dtype=np.int64)
    cdef cnp.int64_t[:, ::1] counts = counts_arr
    rows_arr = np.zeros(bins, dtype=np.int64)
    cols_arr = np.zeros(bins, dtype=np.int64)
    cdef cnp.int64_t[::1] rows = rows_arr
    cdef cnp.int64_t[::1] cols = cols_arr
    for s in range(n):
        counts[cx[s], cy[s]] += 1
        rows[cx[s]] += 1
        cols[cy[s]] += 1
    cdef double total = 0.0
    cdef double e, d
    for i in range(bins):
        for j in range(bins):
            e = <double>rows[i] * <double>cols[j] / <double>n
            if e > 0.0:
                d = <double>counts[i, j] - e
                total = total + d * d / e
    return total / <double>n
