"""Diffusion models and weight functions.

A :class:`VolatilityModel` bundles a diffusion coefficient ``sigma`` on an
open interval ``(nu, mu)`` together with its first two derivatives, a start
value ``x0`` and a drift mode.  A :class:`WeightFunction` bundles the weight
``g`` entering the integrated-volatility functional, its derivative and the
auxiliary function ``|g * g'|**0.5``; all three evaluate to exactly 0 outside
the interval.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy import integrate, optimize

from .exceptions import DomainError, ParameterError, RangeError

_QUAD_TOL = 1e-12

DRIFT_MODES = ("zero", "assumption_D", "custom")
SIGN_CHOICES = ("nonnegative", "nonpositive", "identically-zero")


@dataclass(frozen=True)
class VolatilityModel:
    """State-dependent diffusion specification dX = sigma(X) dW + a(X) dt."""

    name: str
    params: tuple
    domain: tuple  # open interval (nu, mu)
    x0: float
    drift_mode: str = "zero"
    exact_transform_available: bool = False
    sigma: Callable = None
    sigma_prime: Callable = None
    sigma_second: Callable = None
    drift_fn: Optional[Callable] = None  # only for drift_mode == "custom"
    # closed-form natural scale and its inverse, if the family has one
    scale_fn: Optional[Callable] = field(default=None, repr=False)
    scale_inv_fn: Optional[Callable] = field(default=None, repr=False)

    @property
    def nu(self):
        return self.domain[0]

    @property
    def mu(self):
        return self.domain[1]

    def contains(self, x):
        x = np.asarray(x, dtype=float)
        return (x > self.nu) & (x < self.mu)

    def to_json(self) -> str:
        if self.name == "custom":
            raise ParameterError("custom models carry callables and are not serializable")
        return json.dumps(
            {
                "name": self.name,
                "params": list(self.params),
                "domain": list(self.domain),
                "x0": self.x0,
                "drift_mode": self.drift_mode,
            }
        )

    @staticmethod
    def from_json(text: str) -> "VolatilityModel":
        spec = json.loads(text)
        return make_model(
            spec["name"],
            spec["params"],
            x0=spec.get("x0"),
            drift_mode=spec.get("drift_mode", "zero"),
        )


@dataclass(frozen=True)
class WeightFunction:
    """Weight g with derivative and |g*g'|^(1/2), zero outside the interval."""

    name: str
    domain: tuple
    g: Callable = None
    g_prime: Callable = None
    sign_g_prime: str = "identically-zero"
    sqrt_abs_gg_prime: Callable = None

    def to_json(self) -> str:
        if self.name == "custom":
            raise ParameterError("custom weights carry callables and are not serializable")
        return json.dumps({"name": self.name, "domain": list(self.domain)})

    @staticmethod
    def from_json(text: str) -> "WeightFunction":
        spec = json.loads(text)
        return make_weight(spec["name"], domain=tuple(spec["domain"]))


def _masked(fn, domain):
    """Wrap fn so it returns 0 outside the open interval, elementwise."""
    nu, mu = domain
    if np.isfinite(nu) and np.isfinite(mu):
        fill = 0.5 * (nu + mu)
    elif np.isfinite(nu):
        fill = nu + 1.0
    elif np.isfinite(mu):
        fill = mu - 1.0
    else:
        fill = 0.0

    def wrapped(x):
        x = np.asarray(x, dtype=float)
        inside = (x > nu) & (x < mu)
        out = np.where(inside, fn(np.where(inside, x, fill)), 0.0)
        return out if out.ndim else float(out)

    return wrapped


def make_model(name, params, x0=None, drift_mode="zero", **custom) -> VolatilityModel:
    """Build a model from a named family.

    Families: ``constant`` (sigma(x) = sigma0 on R), ``black_scholes``
    (sigma(x) = sigma0 * x on (0, inf)) and ``custom`` (callables supplied
    through keyword arguments ``sigma``, ``sigma_prime``, ``sigma_second``,
    ``domain``, optionally ``drift_fn``).
    """
    if drift_mode not in DRIFT_MODES:
        raise ParameterError(f"unknown drift_mode {drift_mode!r}")
    params = tuple(float(p) for p in params)

    if name == "constant":
        (sigma0,) = params
        if sigma0 <= 0:
            raise ParameterError(f"constant family needs sigma0 > 0, got {sigma0}")
        x0 = 0.0 if x0 is None else float(x0)
        return VolatilityModel(
            name="constant",
            params=params,
            domain=(-math.inf, math.inf),
            x0=x0,
            drift_mode=drift_mode,
            # drift is 0 under both "zero" and "assumption_D", so the exact
            # transform X = x0 + sigma0 * W applies in either mode
            exact_transform_available=drift_mode in ("zero", "assumption_D"),
            sigma=lambda x, s=sigma0: np.full_like(np.asarray(x, dtype=float), s) if np.ndim(x) else s,
            sigma_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0,
            sigma_second=lambda x: np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0,
            scale_fn=lambda x, s=sigma0, x0=x0: (x - x0) / s,
            scale_inv_fn=lambda w, s=sigma0, x0=x0: x0 + s * w,
        )

    if name == "black_scholes":
        (sigma0,) = params
        if sigma0 <= 0:
            raise ParameterError(f"black_scholes family needs sigma0 > 0, got {sigma0}")
        x0 = 1.0 if x0 is None else float(x0)
        if x0 <= 0:
            raise ParameterError(f"black_scholes needs x0 > 0, got {x0}")
        return VolatilityModel(
            name="black_scholes",
            params=params,
            domain=(0.0, math.inf),
            x0=x0,
            drift_mode=drift_mode,
            # the lognormal representation X = x0 * exp(sigma0 * W) carries
            # the drift sigma0^2 * X / 2, i.e. the assumption_D drift
            exact_transform_available=drift_mode == "assumption_D",
            sigma=lambda x, s=sigma0: s * np.asarray(x, dtype=float) if np.ndim(x) else s * x,
            sigma_prime=lambda x, s=sigma0: np.full_like(np.asarray(x, dtype=float), s) if np.ndim(x) else s,
            sigma_second=lambda x: np.zeros_like(np.asarray(x, dtype=float)) if np.ndim(x) else 0.0,
            scale_fn=lambda x, s=sigma0, x0=x0: np.log(x / x0) / s,
            scale_inv_fn=lambda w, s=sigma0, x0=x0: x0 * np.exp(s * w),
        )

    if name == "custom":
        domain = tuple(custom.get("domain", (-math.inf, math.inf)))
        if x0 is None:
            raise ParameterError("custom model needs x0")
        x0 = float(x0)
        if not (domain[0] < x0 < domain[1]):
            raise ParameterError(f"x0={x0} outside domain {domain}")
        for key in ("sigma", "sigma_prime", "sigma_second"):
            if key not in custom:
                raise ParameterError(f"custom model needs callable {key!r}")
        if drift_mode == "custom" and "drift_fn" not in custom:
            raise ParameterError("drift_mode='custom' needs drift_fn")
        return VolatilityModel(
            name="custom",
            params=params,
            domain=domain,
            x0=x0,
            drift_mode=drift_mode,
            exact_transform_available=bool(custom.get("exact_transform_available", False)),
            sigma=custom["sigma"],
            sigma_prime=custom["sigma_prime"],
            sigma_second=custom["sigma_second"],
            drift_fn=custom.get("drift_fn"),
            scale_fn=custom.get("scale_fn"),
            scale_inv_fn=custom.get("scale_inv_fn"),
        )

    raise ParameterError(f"unknown model family {name!r}")


def eval_coefficients(model: VolatilityModel, x: float):
    """Return (sigma(x), sigma'(x), drift a(x)) at a point inside the interval."""
    if not (model.nu < x < model.mu):
        raise DomainError(f"x={x} outside ({model.nu}, {model.mu})")
    s = float(model.sigma(x))
    sp = float(model.sigma_prime(x))
    if model.drift_mode == "zero":
        a = 0.0
    elif model.drift_mode == "assumption_D":
        a = 0.5 * s * sp
    else:
        a = float(model.drift_fn(x))
    return s, sp, a


def scale_transform(model: VolatilityModel, value: float, direction: str) -> float:
    """Natural scale S(x) = int_{x0}^{x} dy / sigma(y) and its inverse.

    ``forward`` maps a state value to scale coordinates (S(x0) = 0);
    ``inverse`` maps back.  Closed forms are used when the family has them,
    otherwise adaptive quadrature and monotone root finding.
    """
    value = float(value)
    if direction == "forward":
        if not (model.nu < value < model.mu):
            raise DomainError(f"value={value} outside ({model.nu}, {model.mu})")
        if model.scale_fn is not None:
            return float(model.scale_fn(value))
        res, _ = integrate.quad(lambda y: 1.0 / float(model.sigma(y)), model.x0, value,
                                epsabs=_QUAD_TOL, epsrel=_QUAD_TOL, limit=200)
        return res

    if direction != "inverse":
        raise ParameterError(f"direction must be 'forward' or 'inverse', got {direction!r}")

    if model.scale_inv_fn is not None:
        return float(model.scale_inv_fn(value))

    def f(x):
        return scale_transform(model, x, "forward") - value

    # expand a bracket around x0; S is strictly increasing
    lo = hi = model.x0
    step = 1.0
    for _ in range(200):
        cand = max(lo - step, (model.nu + lo) / 2 if np.isfinite(model.nu) else lo - step)
        if cand <= model.nu:
            cand = lo + (model.nu - lo) * 0.999999 if np.isfinite(model.nu) else lo - step
        lo = cand
        if f(lo) <= 0:
            break
        step *= 2
    else:
        raise RangeError(f"value={value} below the range of the scale transform")
    step = 1.0
    for _ in range(200):
        cand = min(hi + step, (model.mu + hi) / 2 if np.isfinite(model.mu) else hi + step)
        hi = cand
        if f(hi) >= 0:
            break
        step *= 2
    else:
        raise RangeError(f"value={value} above the range of the scale transform")
    return float(optimize.brentq(f, lo, hi, xtol=_QUAD_TOL, rtol=8.9e-16))


def make_weight(name, domain=None, **custom) -> WeightFunction:
    """Build a weight function: ``absolute`` (g = 1), ``relative`` (g = 1/x) or ``custom``."""
    if name == "absolute":
        domain = (-math.inf, math.inf) if domain is None else tuple(domain)
        return WeightFunction(
            name="absolute",
            domain=domain,
            g=_masked(lambda x: np.ones_like(x), domain),
            g_prime=_masked(lambda x: np.zeros_like(x), domain),
            sign_g_prime="identically-zero",
            sqrt_abs_gg_prime=_masked(lambda x: np.zeros_like(x), domain),
        )

    if name == "relative":
        domain = (0.0, math.inf) if domain is None else tuple(domain)
        if domain[0] < 0:
            raise ParameterError(f"relative weight needs a domain inside (0, inf), got {domain}")
        return WeightFunction(
            name="relative",
            domain=domain,
            g=_masked(lambda x: 1.0 / x, domain),
            g_prime=_masked(lambda x: -1.0 / x**2, domain),
            sign_g_prime="nonpositive",
            sqrt_abs_gg_prime=_masked(lambda x: x**-1.5, domain),
        )

    if name == "custom":
        if domain is None:
            domain = custom.get("domain")
        if domain is None:
            raise ParameterError("custom weight needs a domain")
        domain = tuple(domain)
        sign = custom["sign_g_prime"]
        if sign not in SIGN_CHOICES:
            raise ParameterError(f"sign_g_prime must be one of {SIGN_CHOICES}")
        g = custom["g"]
        gp = custom["g_prime"]
        return WeightFunction(
            name="custom",
            domain=domain,
            g=_masked(g, domain),
            g_prime=_masked(gp, domain),
            sign_g_prime=sign,
            sqrt_abs_gg_prime=_masked(
                custom.get("sqrt_abs_gg_prime", lambda x: np.sqrt(np.abs(g(x) * gp(x)))), domain
            ),
        )

    raise ParameterError(f"unknown weight {name!r}")
