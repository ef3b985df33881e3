"""Path simulation on [0, 1] and grid rounding of the observations.

Paths are generated on a fine grid i/(n*substeps) either exactly through the
natural-scale transform (X_t = h(W_t), available when the drift matches the
half-sigma-sigma' form) or by Euler-Maruyama.  Observations are the coarse
samples rounded down to an alpha-grid.

Randomness is counter-based and splittable: every path is driven by a Philox
generator keyed by a :class:`numpy.random.SeedSequence`, so independent
streams are derived as ``SeedSequence(seed, spawn_key=(...indices...))`` and
results are reproducible regardless of scheduling.
"""

from __future__ import annotations

import io
import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .exceptions import ExitedPathError, ParameterError
from .model import VolatilityModel, eval_coefficients

_FAMILY_CODE = {"constant": 0, "black_scholes": 1}


def generator(seed, *spawn_key) -> np.random.Generator:
    """Philox generator for the stream identified by (seed, spawn_key)."""
    if isinstance(seed, np.random.SeedSequence):
        seq = seed
    else:
        seq = np.random.SeedSequence(int(seed), spawn_key=tuple(int(i) for i in spawn_key))
    return np.random.Generator(np.random.Philox(seq))


@dataclass(frozen=True)
class PathSample:
    """Fine-grid diffusion sample: values at i/(n*substeps), i = 0..n*substeps."""

    n: int
    substeps: int
    fine_values: np.ndarray
    seed: object
    scheme: str
    exited: bool = False

    def __post_init__(self):
        if len(self.fine_values) != self.n * self.substeps + 1:
            raise ParameterError("fine_values length must be n*substeps + 1")

    @property
    def coarse_values(self) -> np.ndarray:
        """Values at the observation times i/n, i = 0..n."""
        return self.fine_values[:: self.substeps]

    @property
    def fine_times(self) -> np.ndarray:
        return np.arange(self.n * self.substeps + 1) / (self.n * self.substeps)


@dataclass(frozen=True)
class RoundedObservations:
    """The observed sample: n+1 values on the alpha-grid, beta = alpha*sqrt(n)."""

    n: int
    alpha: float
    beta: float
    values: np.ndarray


def simulate_path(model: VolatilityModel, n: int, substeps: int = 1, seed=0,
                  scheme: str = None) -> PathSample:
    """Simulate a path of the model on the fine grid.

    scheme: ``exact_scale`` (X = h(W), requires the model's exact transform),
    ``euler`` or None to pick automatically.  Deterministic given
    (model, n, substeps, seed).
    """
    if n < 2:
        raise ParameterError(f"need n >= 2, got {n}")
    if substeps < 1:
        raise ParameterError(f"need substeps >= 1, got {substeps}")
    if scheme is None:
        scheme = "exact_scale" if model.exact_transform_available else "euler"
    if scheme == "exact_scale" and not model.exact_transform_available:
        raise ParameterError("model has no exact natural-scale representation")

    nfine = n * substeps
    rng = generator(seed)
    dw = rng.standard_normal(nfine) * math.sqrt(1.0 / nfine)

    if scheme == "exact_scale":
        w = np.empty(nfine + 1)
        w[0] = 0.0
        np.cumsum(dw, out=w[1:])
        if model.scale_inv_fn is not None:
            values = np.asarray(model.scale_inv_fn(w), dtype=float)
        else:
            from .model import scale_transform
            values = np.array([scale_transform(model, wi, "inverse") for wi in w])
        exited = bool(np.any(~((values > model.nu) & (values < model.mu))))
        return PathSample(n, substeps, values, seed, "exact_scale", exited)

    if scheme != "euler":
        raise ParameterError(f"unknown scheme {scheme!r}")

    dt = 1.0 / nfine
    family = _FAMILY_CODE.get(model.name)
    if family is not None:
        drift_on = model.drift_mode == "assumption_D"
        values, exited = _kernels.euler_path(
            model.x0, np.ascontiguousarray(dw), dt, family, model.params[0],
            drift_on, model.nu, model.mu)
    else:
        values = np.empty(nfine + 1)
        values[0] = model.x0
        x = model.x0
        exited = False
        for i in range(nfine):
            s, _, a = eval_coefficients(model, x)
            x = x + s * dw[i] + a * dt
            values[i + 1] = x
            if not (model.nu < x < model.mu):
                exited = True
                values[i + 2:] = x
                break
    return PathSample(n, substeps, np.asarray(values), seed, "euler", bool(exited))


def round_to_grid(x, alpha):
    """alpha * floor(x / alpha), audited so that result <= x < result + alpha.

    The floor index is corrected by +-1 when floating-point division puts it
    on the wrong side of the grid cell.  Accepts scalars and arrays.
    """
    if alpha <= 0:
        raise ParameterError(f"need alpha > 0, got {alpha}")
    x = np.asarray(x, dtype=float)
    k = np.floor(x / alpha)
    k = np.where(alpha * k > x, k - 1.0, k)
    k = np.where(alpha * (k + 1.0) <= x, k + 1.0, k)
    out = alpha * k
    return out if out.ndim else float(out)


def observe_rounded(path: PathSample, alpha: float) -> RoundedObservations:
    """Round the coarse samples of the path to the alpha-grid."""
    if path.exited:
        raise ExitedPathError("path left the state interval; refusing to observe")
    values = round_to_grid(path.coarse_values, alpha)
    return RoundedObservations(path.n, float(alpha), float(alpha) * math.sqrt(path.n), values)


def fractional_part_diagnostic(path: PathSample, alpha: float, bins: int = 20):
    """Fractional parts {X_{i/n} / alpha}, i = 1..n: KS distance to U[0,1] and histogram.

    Small alpha should give nearly uniform fractional parts (the classical
    Kosulajeff/Tukey phenomenon); large alpha concentrates them.
    """
    if path.n < 100:
        raise ParameterError("need n >= 100 for a meaningful diagnostic")
    if alpha <= 0:
        raise ParameterError(f"need alpha > 0, got {alpha}")
    x = path.coarse_values[1:]
    ratio = x / alpha
    frac = ratio - np.floor(ratio)
    srt = np.sort(frac)
    n = len(srt)
    # KS distance of the empirical CDF against the U[0,1] CDF
    up = np.max(np.arange(1, n + 1) / n - srt)
    down = np.max(srt - np.arange(0, n) / n)
    ks = float(max(up, down))
    hist, _ = np.histogram(frac, bins=bins, range=(0.0, 1.0))
    return ks, (hist / n * bins).tolist()


def path_to_csv(path: PathSample, fileobj=None) -> str:
    """CSV of the coarse observations (index, time, value) with a metadata header."""
    buf = fileobj or io.StringIO()
    buf.write(f"# n={path.n} substeps={path.substeps} seed={path.seed} scheme={path.scheme}\n")
    buf.write("index,time,value\n")
    for i, v in enumerate(path.coarse_values):
        buf.write(f"{i},{i / path.n!r},{float(v)!r}\n")
    return buf.getvalue() if fileobj is None else None


def observations_to_csv(obs: RoundedObservations, fileobj=None) -> str:
    buf = fileobj or io.StringIO()
    buf.write(f"# n={obs.n} alpha={obs.alpha!r} beta={obs.beta!r}\n")
    buf.write("index,time,value\n")
    for i, v in enumerate(obs.values):
        buf.write(f"{i},{i / obs.n!r},{float(v)!r}\n")
    return buf.getvalue() if fileobj is None else None


def read_values_csv(fileobj) -> np.ndarray:
    """Read the value column of a (index, time, value) CSV, skipping '#' headers."""
    values = []
    for line in fileobj:
        line = line.strip()
        if not line or line.startswith("#") or line.startswith("index"):
            continue
        values.append(float(line.split(",")[-1]))
    return np.asarray(values)


def observations_from_values(values, alpha: float) -> RoundedObservations:
    """Wrap uniform-grid prices as rounded observations (values are re-rounded)."""
    values = np.asarray(values, dtype=float)
    n = len(values) - 1
    if n < 2:
        raise ParameterError("need at least 3 price points")
    return RoundedObservations(n, float(alpha), float(alpha) * math.sqrt(n),
                               round_to_grid(values, alpha))
