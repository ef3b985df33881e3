# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled kernels: dyadic cell sums, Euler stepping and the Z-sum MC loop."""

import numpy as np

cimport numpy as cnp
from libc.math cimport floor, fabs, sqrt, M_PI

BACKEND = "cython"


def cell_index(Py_ssize_t n, int j):
    cdef cnp.ndarray[cnp.int64_t, ndim=1] out = np.empty(n, dtype=np.int64)
    cdef long long[::1] o = out
    cdef long long i, p = 1LL << j, nn = n
    for i in range(1, nn + 1):
        o[i - 1] = (i * p - 1) // nn
    return out


def cell_sums(double[::1] w, Py_ssize_t n, int j):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(1 << j, dtype=np.float64)
    cdef double[::1] o = out
    cdef long long i, k, p = 1LL << j, nn = n
    for i in range(1, nn + 1):
        k = (i * p - 1) // nn
        o[k] += w[i - 1]
    return out


def signed_cell_sums(double[::1] w, Py_ssize_t n, int j):
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.zeros(1 << j, dtype=np.float64)
    cdef double[::1] o = out
    cdef long long i, k, p = 1LL << j, nn = n
    for i in range(1, nn + 1):
        k = (i * p - 1) // nn
        if 2 * i * p <= (2 * k + 1) * nn:
            o[k] -= w[i - 1]
        else:
            o[k] += w[i - 1]
    return out


def euler_path(double x0, double[::1] dw, double dt, int family,
               double sigma0, bint drift_on, double nu, double mu):
    cdef Py_ssize_t m = dw.shape[0]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(m + 1, dtype=np.float64)
    cdef double[::1] o = out
    cdef double x = x0, drift
    cdef Py_ssize_t i, z
    cdef bint exited = False
    o[0] = x0
    if family == 0:
        for i in range(m):
            x = x + sigma0 * dw[i]
            o[i + 1] = x
        for i in range(m + 1):
            if o[i] <= nu or o[i] >= mu:
                exited = True
                break
        return out, exited
    for i in range(m):
        drift = 0.5 * sigma0 * sigma0 * x * dt if drift_on else 0.0
        x = x + sigma0 * x * dw[i] + drift
        o[i + 1] = x
        if not (nu < x < mu):
            exited = True
            for z in range(i + 2, m + 1):
                o[z] = x
            break
    return out, exited


def zsum_squares(double[::1] u, double[:, ::1] dw, double beta, double sigma):
    cdef Py_ssize_t reps = dw.shape[0], n = dw.shape[1]
    cdef cnp.ndarray[cnp.float64_t, ndim=1] out = np.empty(reps, dtype=np.float64)
    cdef double[::1] o = out
    cdef double c = sigma / beta, scale = beta * sqrt(M_PI / 2.0)
    cdef double w_prev, v, frac, s, z
    cdef Py_ssize_t r, i
    for r in range(reps):
        w_prev = 0.0
        s = 0.0
        for i in range(n):
            v = u[r] + c * w_prev
            frac = v - floor(v)
            z = scale * fabs(floor(frac + c * dw[r, i])) - sigma
            s += z
            w_prev += dw[r, i]
        o[r] = s * s / n
    return out
