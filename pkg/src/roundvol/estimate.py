"""Estimators computable from the rounded sample.

Empirical wavelet coefficients use rescaled absolute increments of the
rounded values, with the weight evaluated at the *rounded* previous value
(values pushed outside the weight's interval contribute 0 through the
out-of-domain convention).  The first estimator squares the base-level cell
averages; the compensated estimator adds a tail compensator built from one
detail level and, for monotone weights, a rounding-bias correction term.
"""

from __future__ import annotations

import json
import math
import warnings
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import _kernels
from .exceptions import LevelError, ParameterError
from .model import WeightFunction
from .simulate import RoundedObservations

_HALF_NORM = math.sqrt(math.pi / 2.0)  # 1 / E|N(0,1)|

_SIGN_FACTOR = {"nonnegative": 1.0, "nonpositive": -1.0, "identically-zero": 0.0}


@dataclass(frozen=True)
class LevelPlan:
    """Resolution levels for the estimators at a given (n, alpha)."""

    j0: int
    a: float
    rho: float
    j1: int
    j2: int
    jtop: int
    r_n: float
    n: int
    alpha: float


@dataclass(frozen=True)
class EstimateResult:
    theta_hat: float
    estimator_kind: str
    n: int
    alpha: float
    beta: float
    plan: Optional[LevelPlan] = None
    components: dict = field(default_factory=dict)

    def to_json(self) -> str:
        payload = {
            "theta_hat": self.theta_hat,
            "estimator_kind": self.estimator_kind,
            "n": self.n,
            "alpha": self.alpha,
            "beta": self.beta,
            "components": self.components,
        }
        if self.plan is not None:
            payload["plan"] = {
                "j0": self.plan.j0, "a": self.plan.a, "rho": self.plan.rho,
                "j1": self.plan.j1, "j2": self.plan.j2, "jtop": self.plan.jtop,
                "r_n": self.plan.r_n, "n": self.plan.n, "alpha": self.plan.alpha,
            }
        return json.dumps(payload, sort_keys=True)


def _check_level(n: int, j: int, max_cells: int):
    if j < 0:
        raise LevelError(f"level must be >= 0, got {j}")
    if (1 << j) > max_cells:
        raise LevelError(f"level {j} too fine for n={n}")
    if n & (n - 1):
        warnings.warn(f"n={n} is not a power of two; dyadic cells have uneven sample counts",
                      stacklevel=3)


def _weighted_increments(obs: RoundedObservations, gfun) -> np.ndarray:
    values = obs.values
    absdiff = np.abs(np.diff(values))
    gprev = np.asarray(gfun(values[:-1]), dtype=float)
    return np.ascontiguousarray(gprev * absdiff)


def c_hat(obs: RoundedObservations, weight: WeightFunction, j: int) -> np.ndarray:
    """Base-type coefficients: rescaled per-cell averages of |rounded increments|."""
    _check_level(obs.n, j, obs.n)
    w = _weighted_increments(obs, weight.g)
    sums = _kernels.cell_sums(w, obs.n, j)
    return _HALF_NORM * 2.0 ** (j / 2.0) / math.sqrt(obs.n) * np.asarray(sums)


def d_hat(obs: RoundedObservations, weight: WeightFunction, j: int) -> np.ndarray:
    """Detail-type coefficients: signed (-/+ per half-cell) rescaled averages."""
    _check_level(obs.n, j, obs.n // 2)
    w = _weighted_increments(obs, weight.g)
    sums = _kernels.signed_cell_sums(w, obs.n, j)
    return _HALF_NORM * 2.0 ** (j / 2.0) / math.sqrt(obs.n) * np.asarray(sums)


def e_hat(obs: RoundedObservations, weight: WeightFunction, j0: int) -> np.ndarray:
    """Like c_hat with the weight replaced by |g * g'|^(1/2)."""
    _check_level(obs.n, j0, obs.n)
    w = _weighted_increments(obs, weight.sqrt_abs_gg_prime)
    sums = _kernels.cell_sums(w, obs.n, j0)
    return _HALF_NORM * 2.0 ** (j0 / 2.0) / math.sqrt(obs.n) * np.asarray(sums)


def base_level(n: int, alpha: float) -> int:
    """j0 = floor(log2(min(1/alpha, sqrt(n)))), clamped to >= 0."""
    return max(0, int(math.floor(math.log2(min(1.0 / alpha, math.sqrt(n))))))


def theta_tilde(obs: RoundedObservations, weight: WeightFunction) -> EstimateResult:
    """First estimator: sum of squared base-level coefficients."""
    if obs.n < 4:
        raise ParameterError(f"need n >= 4, got {obs.n}")
    j0 = base_level(obs.n, obs.alpha)
    c = c_hat(obs, weight, j0)
    value = float(np.sum(c**2))
    return EstimateResult(value, "theta_tilde", obs.n, obs.alpha, obs.beta,
                          components={"j0": j0})


def default_level_plan(n: int, alpha: float, rho: float = 0.5) -> LevelPlan:
    """Levels j1 = floor(log2 r_n^{-3/4}), j2 = floor(log2 r_n^{-2/3}), a = rho."""
    if n < 16:
        raise ParameterError(f"need n >= 16, got {n}")
    if alpha <= 0:
        raise ParameterError(f"need alpha > 0, got {alpha}")
    if not 0 < rho < 1:
        raise ParameterError(f"need 0 < rho < 1, got {rho}")
    r_n = max(alpha, n**-0.5)
    ell = math.log2(1.0 / r_n)  # >= 0 as soon as alpha <= 1
    j1 = max(0, int(math.floor(0.75 * ell)))
    j2 = max(0, int(math.floor(ell * 2.0 / 3.0)))
    jtop = max(0, int(math.floor((1.0 + rho) * ell)), j1)
    return LevelPlan(j0=base_level(n, alpha), a=rho, rho=rho, j1=j1, j2=j2,
                     jtop=jtop, r_n=r_n, n=n, alpha=float(alpha))


def validate_level_plan(plan: LevelPlan, n: int, alpha: float, threshold: float = 1.0) -> dict:
    """Finite-n values of the seven asymptotic smallness conditions on the plan.

    Each entry maps a condition name to (value, passed) where passed means
    value <= threshold.  Extra 'warnings' entries flag levels finer than the
    sample and compensator levels above log2 n.
    """
    r_n = max(alpha, n**-0.5)
    logn = math.log(n)
    vals = {
        "alpha^(1-a)*log(n)^2": alpha ** (1.0 - plan.a) * logn**2,
        "r_n*2^(2j2-j1)": r_n * 2.0 ** (2 * plan.j2 - plan.j1),
        "r_n^-1*2^(j1/2)*(alpha^2*log(n)+1/n)": (alpha**2 * logn + 1.0 / n) * 2.0 ** (plan.j1 / 2.0) / r_n,
        "r_n*2^j1": r_n * 2.0**plan.j1,
        "r_n^-1*2^(-3j1/2)": 2.0 ** (-1.5 * plan.j1) / r_n,
        "2^(j2-j1)": 2.0 ** (plan.j2 - plan.j1),
        "r_n^-1*2^(-(j1+j2/2))": 2.0 ** (-(plan.j1 + plan.j2 / 2.0)) / r_n,
    }
    report = {name: (v, v <= threshold) for name, v in vals.items()}
    warnings_list = []
    if (1 << plan.j1) > n:
        warnings_list.append("2^j1 exceeds n: empty cells at the main level")
    if plan.jtop > math.log2(n):
        warnings_list.append("jtop exceeds log2 n (harmless: only the 2^(j2-j) factor uses j)")
    report["warnings"] = warnings_list
    return report


def theta_hat(obs: RoundedObservations, weight: WeightFunction, plan: LevelPlan) -> EstimateResult:
    """Compensated estimator: main sum + detail-tail compensator + bias term."""
    if plan.n != obs.n or plan.alpha != obs.alpha:
        raise ParameterError(
            f"plan built for (n={plan.n}, alpha={plan.alpha}) does not match "
            f"observations (n={obs.n}, alpha={obs.alpha})")
    c = c_hat(obs, weight, plan.j1)
    c_part = float(np.sum(c**2))
    d = d_hat(obs, weight, plan.j2)
    q_hat = float(np.sum(d**2))
    # sum_{j=j1}^{jtop} 2^(j2-j) * Q_hat; j enters only through the geometric factor
    geo = sum(2.0 ** (plan.j2 - j) for j in range(plan.j1, plan.jtop + 1))
    r_part = geo * q_hat
    sign = _SIGN_FACTOR[weight.sign_g_prime]
    if sign == 0.0:
        bias_part = 0.0
    else:
        e = e_hat(obs, weight, plan.j0)
        bias_part = obs.alpha * sign * float(np.sum(e**2))
    total = c_part + r_part + bias_part
    return EstimateResult(total, "theta_hat_S", obs.n, obs.alpha, obs.beta, plan=plan,
                          components={"c_part": c_part, "R_part": r_part, "bias_part": bias_part})


def realized_volatility(obs: RoundedObservations, mode: str = "levels") -> EstimateResult:
    """Sum of squared increments of (log-)rounded values; the biased baseline."""
    if mode == "levels":
        diffs = np.diff(obs.values)
        kind = "rv"
    elif mode == "log_levels":
        if np.any(obs.values <= 0):
            raise ParameterError("log_levels requires strictly positive rounded values")
        diffs = np.diff(np.log(obs.values))
        kind = "rv_log"
    else:
        raise ParameterError(f"mode must be 'levels' or 'log_levels', got {mode!r}")
    return EstimateResult(float(np.sum(diffs**2)), kind, obs.n, obs.alpha, obs.beta)
