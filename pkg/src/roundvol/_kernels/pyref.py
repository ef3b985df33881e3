"""Pure-numpy reference implementations of the hot kernels.

Cell membership is exact integer arithmetic: i/n lies in the left-open dyadic
cell (k 2^-j, (k+1) 2^-j] iff k*n < i*2^j <= (k+1)*n, i.e. k = (i*2^j - 1) // n.
"""

import numpy as np

BACKEND = "python"


def cell_index(n, j):
    i = np.arange(1, n + 1, dtype=np.int64)
    return (i * (1 << j) - 1) // n


def cell_sums(w, n, j):
    """Sum w[i-1] over i = 1..n within each of the 2^j dyadic cells."""
    k = cell_index(n, j)
    return np.bincount(k, weights=w, minlength=1 << j)


def signed_cell_sums(w, n, j):
    """Like cell_sums but with sign -1 on the left half-cell, +1 on the right.

    i/n belongs to the left half of cell k iff 2*i*2^j <= (2k+1)*n, matching
    the left-open convention used for the full cells.
    """
    i = np.arange(1, n + 1, dtype=np.int64)
    k = (i * (1 << j) - 1) // n
    left = 2 * i * (1 << j) <= (2 * k + 1) * n
    signed = np.where(left, -w, w)
    return np.bincount(k, weights=signed, minlength=1 << j)


def euler_path(x0, dw, dt, family, sigma0, drift_on, nu, mu):
    """Euler-Maruyama recursion for the built-in families.

    family: 0 = constant sigma, 1 = black_scholes (sigma(x) = sigma0 * x).
    Returns (values, exited_flag); values has len(dw) + 1 entries and the
    recursion stops updating once the path leaves (nu, mu).
    """
    m = dw.shape[0]
    out = np.empty(m + 1)
    out[0] = x0
    if family == 0:
        # constant sigma: the recursion is linear, vectorize it
        out[1:] = x0 + sigma0 * np.cumsum(dw)
        exited = bool(np.any((out <= nu) | (out >= mu)))
        return out, exited
    x = x0
    exited = False
    for i in range(m):
        drift = 0.5 * sigma0 * sigma0 * x * dt if drift_on else 0.0
        x = x + sigma0 * x * dw[i] + drift
        out[i + 1] = x
        if not (nu < x < mu):
            exited = True
            out[i + 2:] = x
            break
    return out, exited


def zsum_squares(u, dw, beta, sigma):
    """(n^{-1/2} sum_i Z_i)^2 per replication, for the long-run variance MC.

    u: (reps,) uniforms; dw: (reps, n) standard normal increments.
    Z_i = beta*sqrt(pi/2)*|floor(frac(U + c*W_{i-1}) + c*dW_i)| - sigma,
    with c = sigma / beta.
    """
    reps, n = dw.shape
    c = sigma / beta
    w_prev = np.concatenate([np.zeros((reps, 1)), np.cumsum(dw[:, :-1], axis=1)], axis=1)
    v = u[:, None] + c * w_prev
    frac = v - np.floor(v)
    inc = np.floor(frac + c * dw)
    z = beta * np.sqrt(np.pi / 2.0) * np.abs(inc) - sigma
    s = z.sum(axis=1)
    return s * s / n
