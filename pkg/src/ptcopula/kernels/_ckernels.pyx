# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled inner loops for the Monte Carlo estimators.

Every routine here has a numpy twin in :mod:`ptcopula.kernels._pykernels`
that performs the same floating point operations in the same order, so both
backends return bitwise-identical results.
"""
import numpy as np


def row_max_scaled(const double[:, ::1] Z, const double[::1] a):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j
    cdef double m, v
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        m = a[0] * Z[i, 0]
        for j in range(1, d):
            v = a[j] * Z[i, j]
            if v > m:
                m = v
        o[i] = m
    return out


def row_min_scaled(const double[:, ::1] Z, const double[::1] a):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j
    cdef double m, v
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    for i in range(n):
        m = a[0] * Z[i, 0]
        for j in range(1, d):
            v = a[j] * Z[i, j]
            if v < m:
                m = v
        o[i] = m
    return out


def thinned_row_max(const double[:, ::1] Z, const double[:, ::1] U,
                    const double[::1] u, const double[::1] a):
    cdef Py_ssize_t n = Z.shape[0], d = Z.shape[1], i, j
    cdef double m, v
    out = np.empty(n, dtype=np.float64)
    cdef double[::1] o = out
    cdef double[::1] denom = np.subtract(1.0, u)
    for i in range(n):
        m = 0.0
        for j in range(d):
            if U[i, j] > u[j]:
                v = (a[j] * Z[i, j]) / denom[j]
                if v > m:
                    m = v
        o[i] = m
    return out


def count_dominated(const double[:, ::1] S, const double[:, ::1] P):
    cdef Py_ssize_t n = S.shape[0], d = S.shape[1], k = P.shape[0]
    cdef Py_ssize_t i, j, p
    cdef long long c
    out = np.zeros(k, dtype=np.int64)
    cdef long long[::1] o = out
    for p in range(k):
        c = 0
        for i in range(n):
            for j in range(d):
                if not (S[i, j] <= P[p, j]):
                    break
            else:
                c += 1
        o[p] = c
    return out


def count_exceeding(const double[:, ::1] S, const double[:, ::1] P):
    cdef Py_ssize_t n = S.shape[0], d = S.shape[1], k = P.shape[0]
    cdef Py_ssize_t i, j, p
    cdef long long c
    out = np.zeros(k, dtype=np.int64)
    cdef long long[::1] o = out
    for p in range(k):
        c = 0
        for i in range(n):
            for j in range(d):
                if not (S[i, j] > P[p, j]):
                    break
            else:
                c += 1
        o[p] = c
    return out
