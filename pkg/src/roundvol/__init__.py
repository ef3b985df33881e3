"""Integrated volatility estimation for diffusions observed with round-off error.

Simulation of rounded diffusion samples, Haar-based estimators of the
(weighted) integrated volatility, numerical limit-law ingredients and a
Monte Carlo verification harness.
"""

from ._kernels import BACKEND
from .asymptotics import (DeltaBetaEstimate, RegimeSpec, confidence_interval,
                          delta_beta, delta_beta_converged, gamma_p, limit_std,
                          make_delta_evaluator, p_variation_stat)
from .estimate import (EstimateResult, LevelPlan, base_level, c_hat, d_hat,
                       default_level_plan, e_hat, realized_volatility,
                       theta_hat, theta_tilde, validate_level_plan)
from .harness import (ExperimentConfig, ExperimentReport, fit_log_slope,
                      run_clt_experiment, run_rate_experiment)
from .model import (VolatilityModel, WeightFunction, eval_coefficients,
                    make_model, make_weight, scale_transform)
from .simulate import (PathSample, RoundedObservations,
                       fractional_part_diagnostic, observe_rounded,
                       round_to_grid, simulate_path)
from .wavelet import (CoefficientTable, coefficients_from_profile, haar_eval,
                      oracle_coefficients, theta_from_profile, theta_oracle)

__version__ = "0.1.0"

__all__ = [
    "BACKEND", "CoefficientTable", "DeltaBetaEstimate", "EstimateResult",
    "ExperimentConfig", "ExperimentReport", "LevelPlan", "PathSample",
    "RegimeSpec", "RoundedObservations", "VolatilityModel", "WeightFunction",
    "base_level", "c_hat", "coefficients_from_profile", "confidence_interval",
    "d_hat", "default_level_plan", "delta_beta", "delta_beta_converged",
    "e_hat", "eval_coefficients", "fit_log_slope",
    "fractional_part_diagnostic", "gamma_p", "haar_eval", "limit_std",
    "make_delta_evaluator", "make_model", "make_weight", "observe_rounded",
    "oracle_coefficients", "p_variation_stat", "realized_volatility",
    "round_to_grid", "run_clt_experiment", "run_rate_experiment",
    "scale_transform", "simulate_path", "theta_from_profile", "theta_hat",
    "theta_oracle", "theta_tilde", "validate_level_plan",
]
