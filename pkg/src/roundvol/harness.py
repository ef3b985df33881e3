"""Monte Carlo experiment runner.

Regimes are encoded through the grid family alpha_n = c_alpha * n^(-gamma):
gamma > 1/2 drives beta_n to 0, gamma = 1/2 keeps beta_n = c_alpha fixed and
gamma < 1/2 drives beta_n to infinity.  The regime is a configuration-level
declaration, never inferred from a sample.

Replications are the unit of parallelism; each replication draws from the
stream SeedSequence(seed, spawn_key=(n_index, replication, attempt)) and
results are accumulated in replication order, so reports are byte-identical
across thread counts.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict
from typing import Optional

import numpy as np
from scipy import stats

from . import estimate as est
from .asymptotics import RegimeSpec, make_delta_evaluator, limit_std
from .exceptions import ExperimentAbortedError, ParameterError
from .model import make_model, make_weight
from .simulate import observe_rounded, simulate_path
from .wavelet import theta_oracle

_MAX_RESAMPLE_ATTEMPTS = 64

ESTIMATOR_NAMES = ("theta_tilde", "theta_hat_S", "rv", "rv_log")


@dataclass
class ExperimentConfig:
    model: dict
    weight: dict
    gamma: float
    n_list: list
    replications: int
    seed: int
    estimators: list = field(default_factory=lambda: ["theta_tilde"])
    c_alpha: float = 1.0
    substeps: int = 1
    rho: Optional[float] = None
    plan_overrides: Optional[dict] = None  # optional {a, j0, j1, j2}
    threads: Optional[int] = None

    def __post_init__(self):
        if any(name not in ESTIMATOR_NAMES for name in self.estimators):
            raise ParameterError(f"estimators must be among {ESTIMATOR_NAMES}")
        if sorted(self.n_list) != list(self.n_list):
            raise ParameterError("n_list must be ascending")
        for n in self.n_list:
            if n & (n - 1):
                raise ParameterError(f"n_list entries must be powers of two, got {n}")
        if self.gamma < 0:
            raise ParameterError(f"gamma must be >= 0, got {self.gamma}")
        if self.replications < 1:
            raise ParameterError("replications must be >= 1")

    @property
    def regime(self) -> RegimeSpec:
        if self.gamma > 0.5:
            return RegimeSpec("beta_to_zero")
        if self.gamma == 0.5:
            return RegimeSpec("beta_fixed", beta=self.c_alpha)
        return RegimeSpec("beta_to_infinity")

    def alpha_for(self, n: int) -> float:
        return self.c_alpha * float(n) ** (-self.gamma)

    def rho_for(self) -> float:
        return self.rho if self.rho is not None else min(max(self.gamma, 0.1), 0.9)

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @staticmethod
    def from_json(text: str) -> "ExperimentConfig":
        return ExperimentConfig(**json.loads(text))


@dataclass
class ExperimentReport:
    kind: str
    config: dict
    rows: list
    slopes: dict
    exit_counts: dict
    wall_clock: float = 0.0

    def to_json(self, include_timing: bool = False) -> str:
        # Thread count is an execution detail with no effect on the numbers,
        # so it is dropped to keep reports byte-identical across machines.
        config = {k: v for k, v in self.config.items() if k != "threads"}
        payload = {
            "kind": self.kind,
            "config": config,
            "rows": self.rows,
            "slopes": self.slopes,
            "exit_counts": self.exit_counts,
        }
        if include_timing:
            payload["wall_clock"] = self.wall_clock
        return json.dumps(payload, sort_keys=True, indent=1)


def fit_log_slope(points) -> float:
    """OLS slope through points already expressed in log2 coordinates."""
    points = list(points)
    xs = np.array([p[0] for p in points], dtype=float)
    ys = np.array([p[1] for p in points], dtype=float)
    if len(set(xs.tolist())) < 2:
        raise ParameterError("need at least 2 distinct abscissae")
    return float(np.polyfit(xs, ys, 1)[0])


def _thread_count(config: ExperimentConfig) -> int:
    if config.threads is not None:
        return max(1, config.threads)
    env = os.environ.get("ROUNDVOL_THREADS")
    return max(1, int(env)) if env else 1


def _build(config: ExperimentConfig):
    spec = dict(config.model)
    model = make_model(spec.pop("name"), spec.pop("params", ()), **spec)
    wspec = dict(config.weight)
    weight = make_weight(wspec.pop("name"), **wspec)
    return model, weight


def _plan_for(config: ExperimentConfig, n: int, alpha: float):
    plan = est.default_level_plan(n, alpha, rho=config.rho_for())
    if config.plan_overrides:
        o = config.plan_overrides
        fields = {k: plan.__dict__[k] for k in
                  ("j0", "a", "rho", "j1", "j2", "jtop", "r_n", "n", "alpha")}
        fields.update({k: o[k] for k in ("a", "j0", "j1", "j2") if k in o})
        ell = math.log2(1.0 / plan.r_n)
        fields["jtop"] = max(fields["j1"], int(math.floor((1.0 + fields["a"]) * ell)))
        plan = est.LevelPlan(**fields)
    return plan


def _one_replication(model, weight, config, n_index, n, alpha, plan, rep):
    """Simulate (resampling exited paths), estimate, and return (errors, exits)."""
    exits = 0
    for attempt in range(_MAX_RESAMPLE_ATTEMPTS):
        seq = np.random.SeedSequence(config.seed, spawn_key=(n_index, rep, attempt))
        path = simulate_path(model, n, config.substeps, seed=seq)
        if not path.exited:
            break
        exits += 1
    else:
        raise ExperimentAbortedError(
            f"replication {rep} at n={n}: {_MAX_RESAMPLE_ATTEMPTS} consecutive path exits")
    obs = observe_rounded(path, alpha)
    theta = theta_oracle(path, weight, model)
    errors = {}
    for name in config.estimators:
        if name == "theta_tilde":
            value = est.theta_tilde(obs, weight).theta_hat
        elif name == "theta_hat_S":
            value = est.theta_hat(obs, weight, plan).theta_hat
        elif name == "rv":
            value = est.realized_volatility(obs, "levels").theta_hat
        else:
            value = est.realized_volatility(obs, "log_levels").theta_hat
        errors[name] = value - theta
    return errors, exits, theta


def _run_cell(model, weight, config, n_index, n, alpha, plan):
    """All replications for one n, deterministic regardless of thread count."""
    reps = config.replications

    def task(rep):
        return _one_replication(model, weight, config, n_index, n, alpha, plan, rep)

    workers = _thread_count(config)
    if workers == 1:
        results = [task(rep) for rep in range(reps)]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(task, range(reps)))
    exits = sum(r[1] for r in results)
    if exits > 0.10 * (exits + reps):
        raise ExperimentAbortedError(
            f"exit rate {exits}/{exits + reps} above 10% at n={n}")
    errors = {name: np.array([r[0][name] for r in results]) for name in config.estimators}
    thetas = np.array([r[2] for r in results])
    return errors, exits, thetas


def run_rate_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Median absolute error per n and fitted log2-slope per estimator."""
    if len(config.n_list) < 3:
        raise ParameterError("rate experiment needs at least 3 values of n")
    t0 = time.perf_counter()
    model, weight = _build(config)
    rows = []
    exit_counts = {}
    med_points = {name: [] for name in config.estimators}
    for n_index, n in enumerate(config.n_list):
        alpha = config.alpha_for(n)
        plan = _plan_for(config, n, alpha) if "theta_hat_S" in config.estimators else None
        errors, exits, _ = _run_cell(model, weight, config, n_index, n, alpha, plan)
        exit_counts[str(n)] = exits
        rate = config.regime.rate(n, alpha)
        for name in config.estimators:
            e = errors[name]
            med = float(np.median(np.abs(e)))
            rows.append({
                "n": n,
                "alpha": alpha,
                "estimator": name,
                "replications": config.replications,
                "mean_error": float(np.mean(e)),
                "median_abs_error": med,
                "var_normalized_error": float(np.var(rate * e, ddof=1)),
                "ks_distance": None,
                "exits": exits,
            })
            if med > 0:
                med_points[name].append((math.log2(n), math.log2(med)))
    slopes = {}
    for name, pts in med_points.items():
        slopes[name] = fit_log_slope(pts) if len(pts) >= 2 else None
    return ExperimentReport("mc-rate", json.loads(config.to_json()), rows, slopes,
                            exit_counts, time.perf_counter() - t0)


def run_clt_experiment(config: ExperimentConfig) -> ExperimentReport:
    """Normalized-error variance and normality check for the compensated estimator."""
    if "theta_hat_S" not in config.estimators:
        raise ParameterError("CLT experiment needs the theta_hat_S estimator")
    if config.replications < 200:
        raise ParameterError("CLT experiment needs at least 200 replications")
    t0 = time.perf_counter()
    model, weight = _build(config)
    regime = config.regime
    delta_fn = None
    if regime.regime == "beta_fixed":
        delta_fn = make_delta_evaluator(regime.beta, replications=400, seed=config.seed)
    rows = []
    exit_counts = {}
    for n_index, n in enumerate(config.n_list):
        alpha = config.alpha_for(n)
        plan = _plan_for(config, n, alpha)
        errors, exits, _ = _run_cell(model, weight, config, n_index, n, alpha, plan)
        exit_counts[str(n)] = exits
        rate = regime.rate(n, alpha)
        # reference path for the path-conditional limit variance
        ref = simulate_path(model, n, config.substeps,
                            seed=np.random.SeedSequence(config.seed, spawn_key=(n_index, 0, 0)))
        lstd = limit_std(regime, ref, weight, model, delta_fn=delta_fn)
        sigma_constant = model.name == "constant"
        for name in config.estimators:
            z = rate * errors[name]
            if sigma_constant:
                ks = float(stats.kstest(z, "norm",
                                        args=(float(np.mean(z)), float(np.std(z, ddof=1)))).statistic)
                note = None
            else:
                ks = None
                note = "mixed normal limit: KS suppressed, variance matching only"
            row = {
                "n": n,
                "alpha": alpha,
                "estimator": name,
                "replications": config.replications,
                "mean_error": float(np.mean(errors[name])),
                "median_abs_error": float(np.median(np.abs(errors[name]))),
                "var_normalized_error": float(np.var(z, ddof=1)),
                "limit_variance": lstd**2,
                "ks_distance": ks,
                "exits": exits,
            }
            if note:
                row["note"] = note
            rows.append(row)
    return ExperimentReport("mc-clt", json.loads(config.to_json()), rows, {},
                            exit_counts, time.perf_counter() - t0)
