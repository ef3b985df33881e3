"""Command line interface.

Exit codes: 0 success, 2 validation failure, 3 experiment aborted.
"""

from __future__ import annotations

import json
import sys

import click

from . import estimate as est
from .asymptotics import delta_beta, gamma_p
from .exceptions import ExperimentAbortedError, RoundVolError
from .harness import ExperimentConfig, run_clt_experiment, run_rate_experiment
from .model import make_model, make_weight
from .simulate import (observations_from_values, observations_to_csv,
                       observe_rounded, read_values_csv, simulate_path)


def _fail(exc):
    click.echo(f"error: {exc}", err=True)
    code = 3 if isinstance(exc, ExperimentAbortedError) else 2
    sys.exit(code)


@click.group()
def main():
    """Integrated volatility estimation under round-off error."""


@main.command()
@click.option("--model", "model_name", default="constant", show_default=True)
@click.option("--params", default="1.0", show_default=True, help="comma-separated family parameters")
@click.option("--x0", type=float, default=None)
@click.option("--drift-mode", default="zero", show_default=True)
@click.option("--n", type=int, required=True)
@click.option("--substeps", type=int, default=1, show_default=True)
@click.option("--alpha", type=float, required=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(writable=True), default="-")
def simulate(model_name, params, x0, drift_mode, n, substeps, alpha, seed, out):
    """Simulate a rounded sample and write it as CSV."""
    try:
        model = make_model(model_name, [float(p) for p in params.split(",")],
                           x0=x0, drift_mode=drift_mode)
        path = simulate_path(model, n, substeps, seed=seed)
        obs = observe_rounded(path, alpha)
    except RoundVolError as exc:
        _fail(exc)
    text = observations_to_csv(obs)
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w") as fh:
            fh.write(text)


@main.command("estimate")
@click.option("--in", "infile", type=click.File("r"), required=True)
@click.option("--alpha", type=float, required=True)
@click.option("--weight", "weight_name",
              type=click.Choice(["absolute", "relative"]), default="absolute", show_default=True)
@click.option("--estimator", type=click.Choice(["tilde", "hat", "rv", "rvlog"]),
              default="tilde", show_default=True)
@click.option("--plan", "plan_text", default=None, help="a,j1,j2,j0 override for --estimator hat")
@click.option("--rho", type=float, default=0.5, show_default=True)
def estimate_cmd(infile, alpha, weight_name, estimator, plan_text, rho):
    """Estimate integrated volatility from a CSV of uniform-grid prices."""
    try:
        values = read_values_csv(infile)
        obs = observations_from_values(values, alpha)
        weight = make_weight(weight_name)
        if estimator == "tilde":
            result = est.theta_tilde(obs, weight)
        elif estimator == "hat":
            plan = est.default_level_plan(obs.n, alpha, rho=rho)
            if plan_text:
                a, j1, j2, j0 = plan_text.split(",")
                import math
                ell = math.log2(1.0 / plan.r_n)
                a = float(a)
                j1 = int(j1)
                plan = est.LevelPlan(j0=int(j0), a=a, rho=a, j1=j1, j2=int(j2),
                                     jtop=max(j1, int(math.floor((1 + a) * ell))),
                                     r_n=plan.r_n, n=obs.n, alpha=obs.alpha)
            result = est.theta_hat(obs, weight, plan)
        elif estimator == "rv":
            result = est.realized_volatility(obs, "levels")
        else:
            result = est.realized_volatility(obs, "log_levels")
    except RoundVolError as exc:
        _fail(exc)
    click.echo(result.to_json())


def _run_experiment(config_file, out, runner):
    try:
        config = ExperimentConfig.from_json(config_file.read())
        report = runner(config)
    except RoundVolError as exc:
        _fail(exc)
    text = report.to_json()
    if out == "-":
        click.echo(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)
    click.echo(f"wall clock: {report.wall_clock:.2f}s", err=True)


@main.command("mc-rate")
@click.option("--config", "config_file", type=click.File("r"), required=True)
@click.option("--out", type=click.Path(writable=True), default="-")
def mc_rate(config_file, out):
    """Run a rate-of-convergence Monte Carlo experiment."""
    _run_experiment(config_file, out, run_rate_experiment)


@main.command("mc-clt")
@click.option("--config", "config_file", type=click.File("r"), required=True)
@click.option("--out", type=click.Path(writable=True), default="-")
def mc_clt(config_file, out):
    """Run a central-limit-theorem Monte Carlo experiment."""
    _run_experiment(config_file, out, run_clt_experiment)


@main.command("delta-beta")
@click.option("--beta", "betas", type=float, multiple=True, required=True)
@click.option("--sigma", "sigmas", type=float, multiple=True, default=(1.0,), show_default=True)
@click.option("--n-inner", type=int, default=4096, show_default=True)
@click.option("--replications", type=int, default=400, show_default=True)
@click.option("--seed", type=int, default=0, show_default=True)
@click.option("--out", type=click.Path(writable=True), default="-")
def delta_beta_cmd(betas, sigmas, n_inner, replications, seed, out):
    """Tabulate the long-run variance function over (beta, sigma)."""
    lines = ["beta,sigma,value,std_error"]
    try:
        for beta in betas:
            for sigma in sigmas:
                estv = delta_beta(beta, sigma, n_inner, replications, seed)
                lines.append(f"{beta!r},{sigma!r},{estv.value!r},{estv.std_error!r}")
    except RoundVolError as exc:
        _fail(exc)
    text = "\n".join(lines) + "\n"
    if out == "-":
        click.echo(text, nl=False)
    else:
        with open(out, "w") as fh:
            fh.write(text)


@main.command("gamma-p")
@click.option("--p", "ps", type=float, multiple=True, required=True)
@click.option("--beta", "betas", type=float, multiple=True, required=True)
@click.option("--sigma", "sigmas", type=float, multiple=True, default=(1.0,), show_default=True)
def gamma_p_cmd(ps, betas, sigmas):
    """Evaluate the p-variation limit functional; CSV on stdout."""
    click.echo("p,beta,sigma,value")
    try:
        for p in ps:
            for beta in betas:
                for sigma in sigmas:
                    click.echo(f"{p!r},{beta!r},{sigma!r},{gamma_p(sigma, beta, p)!r}")
    except RoundVolError as exc:
        _fail(exc)


if __name__ == "__main__":
    main()
