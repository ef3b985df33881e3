"""Haar system evaluation and the oracle side of the estimation problem.

The oracle computes, from an *unrounded* fine-grid path, the true Haar
coefficients of s -> g(X_s) sigma(X_s) and the true target
theta = int g(X_s)^2 sigma(X_s)^2 ds.  Integrals are taken against the
piecewise-linear interpolant of the fine-grid profile, which makes cell
integrals exact even when wavelet jumps fall between grid nodes.
"""

from __future__ import annotations

import io
from dataclasses import dataclass
from typing import Dict

import numpy as np

from .exceptions import ParameterError, ResolutionError
from .model import VolatilityModel, WeightFunction
from .simulate import PathSample


def haar_eval(j: int, k: int, s, kind: str):
    """Evaluate the Haar indicator or wavelet at points of [0, 1].

    indicator: 2^{j/2} on the left-open cell (k 2^-j, (k+1) 2^-j], else 0.
    wavelet:   2^{j/2} psi(2^j s - k) with psi = -1 on [0, 1/2], +1 on
    (1/2, 1], 0 elsewhere.
    """
    if j < 0 or not 0 <= k < (1 << j):
        raise ParameterError(f"bad Haar index (j={j}, k={k})")
    s = np.asarray(s, dtype=float)
    if np.any((s < 0) | (s > 1)):
        raise ParameterError("s must lie in [0, 1]")
    scale = 2.0 ** (j / 2.0)
    u = (1 << j) * s - k
    if kind == "indicator":
        out = np.where((u > 0) & (u <= 1), scale, 0.0)
    elif kind == "wavelet":
        out = np.where((u >= 0) & (u <= 0.5), -scale, np.where((u > 0.5) & (u <= 1), scale, 0.0))
    else:
        raise ParameterError(f"kind must be 'indicator' or 'wavelet', got {kind!r}")
    return out if out.ndim else float(out)


@dataclass(frozen=True)
class CoefficientTable:
    """True Haar coefficients: c at the base level, d per level j0..jmax."""

    j0: int
    c: np.ndarray
    d: Dict[int, np.ndarray]

    @property
    def jmax(self) -> int:
        return max(self.d) if self.d else self.j0 - 1

    def energy(self, upto: int = None) -> float:
        """Parseval energy sum(c^2) + sum_{j<=upto} sum(d_j^2)."""
        upto = self.jmax if upto is None else upto
        total = float(np.sum(self.c**2))
        for j, dj in self.d.items():
            if j <= upto:
                total += float(np.sum(dj**2))
        return total

    def to_csv(self, fileobj=None) -> str:
        buf = fileobj or io.StringIO()
        buf.write("level,translate,kind,value\n")
        for k, v in enumerate(self.c):
            buf.write(f"{self.j0},{k},c,{float(v)!r}\n")
        for j in sorted(self.d):
            for k, v in enumerate(self.d[j]):
                buf.write(f"{j},{k},d,{float(v)!r}\n")
        return buf.getvalue() if fileobj is None else None


class _LinearProfile:
    """Exact integration of the piecewise-linear interpolant of grid values."""

    def __init__(self, values):
        values = np.asarray(values, dtype=float)
        self.values = values
        self.N = len(values) - 1
        h = 1.0 / self.N
        self.anti = np.concatenate([[0.0], np.cumsum((values[:-1] + values[1:]) * (h / 2.0))])

    def integral_to(self, t: float) -> float:
        """int_0^t of the interpolant."""
        N = self.N
        pos = t * N
        i = min(int(np.floor(pos)), N - 1)
        frac = pos - i
        g0, g1 = self.values[i], self.values[i + 1]
        part = (frac / N) * (g0 + 0.5 * frac * (g1 - g0))
        return float(self.anti[i] + part)


def profile_from_path(path: PathSample, weight: WeightFunction, model: VolatilityModel) -> np.ndarray:
    """g(X_s) * sigma(X_s) along the fine grid."""
    x = path.fine_values
    return np.asarray(weight.g(x), dtype=float) * np.asarray(model.sigma(x), dtype=float)


def coefficients_from_profile(values, j0: int, jmax: int) -> CoefficientTable:
    """Haar coefficients of the piecewise-linear interpolant of a sampled profile."""
    if jmax < j0:
        raise ParameterError(f"need jmax >= j0, got j0={j0}, jmax={jmax}")
    prof = _LinearProfile(values)
    if (1 << jmax) > prof.N:
        raise ResolutionError(
            f"grid of {prof.N} cells cannot resolve level {jmax}; need at least {1 << jmax}",
            required_grid=1 << jmax,
        )
    c = np.empty(1 << j0)
    scale0 = 2.0 ** (j0 / 2.0)
    for k in range(1 << j0):
        left = prof.integral_to(k / (1 << j0))
        right = prof.integral_to((k + 1) / (1 << j0))
        c[k] = scale0 * (right - left)
    d = {}
    for j in range(j0, jmax + 1):
        scale = 2.0 ** (j / 2.0)
        dj = np.empty(1 << j)
        for k in range(1 << j):
            left = prof.integral_to(k / (1 << j))
            mid = prof.integral_to((2 * k + 1) / (1 << (j + 1)))
            right = prof.integral_to((k + 1) / (1 << j))
            dj[k] = scale * (right - 2.0 * mid + left)
        d[j] = dj
    return CoefficientTable(j0, c, d)


def oracle_coefficients(path: PathSample, weight: WeightFunction, model: VolatilityModel,
                        j0: int, jmax: int) -> CoefficientTable:
    """True coefficients of s -> g(X_s) sigma(X_s) from the unrounded fine path."""
    if path.exited:
        raise ParameterError("refusing an exited path")
    return coefficients_from_profile(profile_from_path(path, weight, model), j0, jmax)


def theta_from_profile(values) -> float:
    """Trapezoid quadrature of the squared profile: int (g sigma)^2 ds."""
    values = np.asarray(values, dtype=float)
    sq = values**2
    return float(np.trapezoid(sq, dx=1.0 / (len(values) - 1)))


def theta_oracle(path: PathSample, weight: WeightFunction, model: VolatilityModel) -> float:
    """True target theta = int_0^1 g(X_s)^2 sigma(X_s)^2 ds by fine-grid quadrature."""
    if path.exited:
        raise ParameterError("refusing an exited path")
    return theta_from_profile(profile_from_path(path, weight, model))
