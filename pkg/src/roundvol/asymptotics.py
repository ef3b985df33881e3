"""Limit-law ingredients: the long-run variance function of the rounded
increment sums, the p-variation limit functional, regime-dependent limit
standard deviations and confidence intervals.

The long-run variance Delta(beta, sigma) is evaluated by Monte Carlo from its
definition: with U uniform, W a standard random walk and c = sigma/beta,

    Z_i = beta * sqrt(pi/2) * |floor(frac(U + c*W_{i-1}) + c*(W_i - W_{i-1}))| - sigma,

Delta = lim E[(n^{-1/2} sum Z_i)^2].  The floor reproduces the grid-difference
identity for rounded increments and makes E[Z_i] = 0 exactly (frac(U + Y) is
uniform and independent of any independent Y).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import integrate, stats

from . import _kernels
from .exceptions import ParameterError
from .model import VolatilityModel, WeightFunction
from .simulate import PathSample, generator

REGIMES = ("beta_to_zero", "beta_fixed", "beta_to_infinity")


@dataclass(frozen=True)
class RegimeSpec:
    """Declared asymptotic regime of beta_n = alpha_n * sqrt(n)."""

    regime: str
    beta: float = None

    def __post_init__(self):
        if self.regime not in REGIMES:
            raise ParameterError(f"regime must be one of {REGIMES}")
        if self.regime == "beta_fixed" and (self.beta is None or self.beta <= 0):
            raise ParameterError("beta_fixed regime needs beta > 0")

    def rate(self, n: int, alpha: float) -> float:
        """Normalization applied to (estimate - theta) in the limit theorem."""
        if self.regime == "beta_to_infinity":
            return 1.0 / alpha
        return math.sqrt(n)


@dataclass(frozen=True)
class DeltaBetaEstimate:
    beta: float
    sigma_value: float
    value: float          # MC mean of (n^{-1/2} sum Z)^2 at 2*n_inner
    std_error: float
    n_inner: int
    replications: int
    value_coarse: float   # same at n_inner, exposes residual n-dependence
    band: float           # |value - value_coarse|


def _zsq_mean(beta, sigma, n, replications, seed, tag):
    total = 0.0
    total_sq = 0.0
    batch = max(1, (1 << 22) // n)
    done = 0
    idx = 0
    while done < replications:
        take = min(batch, replications - done)
        rng = generator(seed, tag, idx)
        u = rng.random(take)
        dw = rng.standard_normal((take, n))
        vals = np.asarray(_kernels.zsum_squares(np.ascontiguousarray(u),
                                                np.ascontiguousarray(dw), beta, sigma))
        total += float(vals.sum())
        total_sq += float((vals**2).sum())
        done += take
        idx += 1
    mean = total / replications
    var = max(total_sq / replications - mean**2, 0.0)
    return mean, math.sqrt(var / replications)


def delta_beta(beta: float, sigma_value: float, n_inner: int = 4096,
               replications: int = 400, seed: int = 0) -> DeltaBetaEstimate:
    """Monte Carlo estimate of the long-run variance Delta(beta, sigma).

    The quantity is evaluated at n_inner and 2*n_inner inner steps; ``value``
    is the finer of the two and ``band`` their gap.
    """
    if beta <= 0 or sigma_value <= 0:
        raise ParameterError("need beta > 0 and sigma_value > 0")
    if n_inner < 256:
        raise ParameterError(f"need n_inner >= 256, got {n_inner}")
    if replications < 100:
        raise ParameterError(f"need replications >= 100, got {replications}")
    coarse, _ = _zsq_mean(beta, sigma_value, n_inner, replications, seed, 1)
    fine, se = _zsq_mean(beta, sigma_value, 2 * n_inner, replications, seed, 2)
    return DeltaBetaEstimate(beta, sigma_value, fine, se, n_inner, replications,
                             coarse, abs(fine - coarse))


def delta_beta_converged(beta: float, sigma_value: float, replications: int = 400,
                         seed: int = 0, start: int = 1024, cap: int = 1 << 16) -> DeltaBetaEstimate:
    """Double n_inner until successive values differ by < 2 combined s.e. (cap 2^16)."""
    n = start
    est = delta_beta(beta, sigma_value, n, replications, seed)
    while 2 * n < cap:
        n *= 2
        nxt = delta_beta(beta, sigma_value, n, replications, seed)
        if abs(nxt.value - est.value) < 2.0 * (nxt.std_error + est.std_error):
            return nxt
        est = nxt
    return est


def _excess(x):
    """E[(N - x)_+] for standard normal N, x >= 0; positive, decreasing, convex."""
    return stats.norm.pdf(x) - x * stats.norm.sf(x)


def gamma_p(sigma_value: float, beta: float, p: float) -> float:
    """The p-variation limit functional for grid-rounded Gaussian shifts.

    gamma_p = int_0^1 du int h(y) |round_beta(beta*u + sigma*y)|^p dy with
    round_beta(z) = beta*floor(z/beta).  Since beta*u + sigma*y rounds to
    beta*m exactly when floor(u + (sigma/beta) y) = m, the y-integral is a sum
    of Gaussian cell probabilities and the u-integral has a closed form, so
    the whole expression reduces to an exact series in m (truncated at
    negligible Gaussian tails; both integrals are analytic, error < 1e-10).
    """
    if p <= 0:
        raise ParameterError(f"need p > 0, got {p}")
    if beta <= 0:
        raise ParameterError(f"need beta > 0, got {beta}")
    if sigma_value < 0:
        raise ParameterError(f"need sigma_value >= 0, got {sigma_value}")
    if sigma_value == 0.0:
        return 0.0
    s = sigma_value / beta
    m_max = int(math.ceil(12.0 * s + 2.0 * math.sqrt(p) * s)) + 8
    m = np.arange(1, m_max + 1, dtype=float)
    # A_m = int_0^1 P(sN in [m-u, m+1-u)) du = s * second difference of E[(N-x)_+]
    a = s * (_excess((m + 1.0) / s) - 2.0 * _excess(m / s) + _excess((m - 1.0) / s))
    a = np.clip(a, 0.0, None)
    # negative m contribute symmetrically
    return float(2.0 * beta**p * np.sum(m**p * a))


def expected_abs_uniform_shift(sigma_value: float) -> float:
    """E|U + Z| for U uniform on [0,1] independent of Z ~ N(0, sigma^2), by quadrature."""

    def integrand(u):
        return u * (2.0 * stats.norm.cdf(u / sigma_value) - 1.0) \
            + 2.0 * sigma_value * stats.norm.pdf(u / sigma_value)

    val, _ = integrate.quad(integrand, 0.0, 1.0, epsabs=1e-12, epsrel=1e-12)
    return val


def expected_abs_rounded_uniform_shift(sigma_value: float) -> float:
    """E|floor(U + Z)| for U uniform independent of Z ~ N(0, sigma^2) (exact series)."""
    return gamma_p(sigma_value, 1.0, 1.0)


def uniform_shift_identity_gap(sigma_value: float) -> float:
    """Gap E|U+Z| - E|Z|: zero only in the floored form, reported as a diagnostic."""
    return expected_abs_uniform_shift(sigma_value) - sigma_value * math.sqrt(2.0 / math.pi)


def p_variation_stat(obs, p: float, path: PathSample = None,
                     model: VolatilityModel = None, profile_nodes: int = 513):
    """Rounded p-variation statistic and (when a path is supplied) its theory value.

    statistic = alpha^-p * beta * n^-1 * sum |rounded increments|^p;
    theory = beta^(1-p) * int gamma_p(sigma(X_s), beta) ds along the fine path.
    """
    if p <= 0:
        raise ParameterError(f"need p > 0, got {p}")
    diffs = np.abs(np.diff(obs.values))
    statistic = float(obs.alpha**-p * obs.beta / obs.n * np.sum(diffs**p))
    if path is None or model is None:
        return statistic, None
    sig = np.asarray(model.sigma(path.fine_values), dtype=float)
    if len(sig) > profile_nodes:
        step = max(1, (len(sig) - 1) // (profile_nodes - 1))
        sig = sig[::step]
    if np.ptp(sig) == 0.0:
        integral = gamma_p(float(sig[0]), obs.beta, p)
    else:
        g_vals = np.array([gamma_p(float(sv), obs.beta, p) for sv in sig])
        integral = float(np.trapezoid(g_vals, dx=1.0 / (len(g_vals) - 1)))
    theory = obs.beta ** (1.0 - p) * integral
    return statistic, theory


def limit_std(regime: RegimeSpec, path: PathSample, weight: WeightFunction,
              model: VolatilityModel, delta_fn=None) -> float:
    """Conditional standard deviation of the mixed-normal limit for the regime.

    delta_fn: callable sigma -> Delta(beta, sigma), required for beta_fixed.
    Integrals run along the fine path by trapezoid quadrature.
    """
    x = path.fine_values
    g = np.asarray(weight.g(x), dtype=float)
    sig = np.asarray(model.sigma(x), dtype=float)
    dx = 1.0 / (len(x) - 1)
    if regime.regime == "beta_to_zero":
        return math.sqrt(2.0 * (math.pi - 2.0) * float(np.trapezoid(g**4 * sig**4, dx=dx)))
    if regime.regime == "beta_to_infinity":
        return math.sqrt(4.0 / 3.0 * float(np.trapezoid(g**4 * sig**2, dx=dx)))
    if delta_fn is None:
        raise ParameterError("beta_fixed regime needs a Delta(beta, sigma) evaluator")
    if np.ptp(sig) == 0.0:
        delta_vals = np.full_like(sig, float(delta_fn(float(sig[0]))))
    else:
        delta_vals = np.array([float(delta_fn(float(sv))) for sv in sig])
    return math.sqrt(4.0 * float(np.trapezoid(g**4 * sig**2 * delta_vals, dx=dx)))


def make_delta_evaluator(beta: float, replications: int = 400, n_inner: int = 4096,
                         seed: int = 0):
    """Callable sigma -> Delta(beta, sigma) using the scaling
    Delta(beta, sigma) = sigma^2 * Delta(beta/sigma, 1); evaluations are cached."""
    cache = {}

    def evaluate(sigma_value: float) -> float:
        key = round(beta / sigma_value, 12)
        if key not in cache:
            cache[key] = delta_beta(beta / sigma_value, 1.0, n_inner, replications, seed).value
        return sigma_value**2 * cache[key]

    return evaluate


def confidence_interval(result, regime: RegimeSpec, limit_std_value: float, level: float):
    """Interval theta_hat +- z * limit_std / rate(n); rate per regime."""
    if not 0.0 < level < 1.0:
        raise ParameterError(f"need 0 < level < 1, got {level}")
    if limit_std_value < 0:
        raise ParameterError("limit_std must be >= 0")
    z = stats.norm.ppf((1.0 + level) / 2.0)
    half = z * limit_std_value / regime.rate(result.n, result.alpha)
    return result.theta_hat - half, result.theta_hat + half
