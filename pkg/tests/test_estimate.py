import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import roundvol as rv
from roundvol.exceptions import LevelError, ParameterError


HALF_NORM = math.sqrt(math.pi / 2.0)


def obs_from(values, alpha):
    values = np.asarray(values, dtype=float)
    n = len(values) - 1
    return rv.RoundedObservations(n, alpha, alpha * math.sqrt(n), values)


def stair(n, step):
    """n+1 prices climbing by a constant step each tick."""
    return np.arange(n + 1) * step


def test_c_hat_equal_increments_hand_value(abs_weight):
    # n = 8, j = 1, every |increment| = 0.1:
    # each cell holds 4 increments, c = sqrt(pi/2) * sqrt(2/8) * 0.4
    obs = obs_from(stair(8, 0.1), alpha=0.1)
    c = rv.c_hat(obs, abs_weight, 1)
    assert c.shape == (2,)
    want = HALF_NORM * math.sqrt(2.0 / 8.0) * 0.4
    assert np.allclose(c, want)
    assert c[0] == pytest.approx(0.2506628, abs=1e-7)


def test_theta_tilde_frozen_hand_value(abs_weight):
    # n = 8, alpha = 0.5 picks the base level j0 = 1; equal |increment| = 0.1
    # gives theta_tilde = 2 * 0.2506628^2 = pi * 0.04
    obs = obs_from(stair(8, 0.1), alpha=0.5)
    res = rv.theta_tilde(obs, abs_weight)
    assert res.theta_hat == pytest.approx(math.pi * 0.04, rel=1e-9)
    assert res.estimator_kind == "theta_tilde"
    assert res.components["j0"] == 1


def test_d_hat_hand_value(abs_weight):
    # n = 8, j = 0, |increment| 0.1 on the left half and 0.2 on the right:
    # d = sqrt(pi/2) / sqrt(8) * (-0.4 + 0.8)
    steps = [0.1] * 4 + [0.2] * 4
    obs = obs_from(np.concatenate([[0.0], np.cumsum(steps)]), alpha=0.1)
    d = rv.d_hat(obs, abs_weight, 0)
    assert d.shape == (1,)
    assert d[0] == pytest.approx(0.1772454, abs=1e-7)
    # mirrored mass flips the sign
    obs_m = obs_from(np.concatenate([[0.0], np.cumsum(steps[::-1])]), alpha=0.1)
    assert rv.d_hat(obs_m, abs_weight, 0)[0] == pytest.approx(-d[0], rel=1e-9)


def test_d_hat_vanishes_for_within_cell_balance(abs_weight):
    obs = obs_from(stair(8, 0.1), alpha=0.1)
    assert np.allclose(rv.d_hat(obs, abs_weight, 1), 0.0, atol=1e-15)


def test_e_hat_hand_value():
    # weight with |g g'|^(1/2) frozen at 4^(-3/2) reproduces the scaled c value
    w = rv.make_weight(
        "custom",
        domain=(-np.inf, np.inf),
        g=lambda x: np.ones_like(np.asarray(x, dtype=float)),
        g_prime=lambda x: np.zeros_like(np.asarray(x, dtype=float)),
        sign_g_prime="nonpositive",
        sqrt_abs_gg_prime=lambda x: np.full_like(np.asarray(x, dtype=float), 4.0**-1.5),
    )
    obs = obs_from(stair(8, 0.1), alpha=0.1)
    e = rv.e_hat(obs, w, 1)
    assert np.allclose(e, 0.2506628 * 4.0**-1.5, atol=1e-7)
    assert e[0] == pytest.approx(0.0313329, abs=1e-7)


def test_coefficient_squares_refinement_identity(abs_weight, short_obs):
    # Haar refinement: sum of c_{j+1}^2 equals sum of c_j^2 + d_j^2
    for j in range(0, 5):
        cj = rv.c_hat(short_obs, abs_weight, j)
        dj = rv.d_hat(short_obs, abs_weight, j)
        cnext = rv.c_hat(short_obs, abs_weight, j + 1)
        assert float(np.sum(cnext**2)) == pytest.approx(
            float(np.sum(cj**2) + np.sum(dj**2)), rel=1e-12
        )


def test_base_level_values():
    assert rv.base_level(2**16, 2**-16) == 8
    assert rv.base_level(2**10, 2**-3) == 3
    assert rv.base_level(8, 0.5) == 1


def test_level_bounds(short_obs, abs_weight):
    with pytest.raises(LevelError):
        rv.c_hat(short_obs, abs_weight, -1)
    with pytest.raises(LevelError):
        rv.c_hat(short_obs, abs_weight, int(math.log2(short_obs.n)) + 1)


def test_non_dyadic_sample_size_warns(abs_weight):
    obs = obs_from(stair(100, 0.1), alpha=0.1)
    with pytest.warns(UserWarning):
        rv.c_hat(obs, abs_weight, 2)


def test_default_level_plan_spec_sizes():
    plan = rv.default_level_plan(2**16, 2**-16, rho=0.5)
    assert (plan.j0, plan.j1, plan.j2, plan.jtop) == (8, 6, 5, 12)
    assert plan.r_n == pytest.approx(2**-8)


def test_default_level_plan_monotone_in_n():
    j1s = [rv.default_level_plan(2**k, 2**-k, rho=0.5).j1 for k in range(8, 18)]
    assert all(b >= a for a, b in zip(j1s, j1s[1:]))


def test_validate_level_plan_flags_bad_plans():
    plan = rv.default_level_plan(2**14, 2**-7, rho=0.5)
    report = rv.validate_level_plan(plan, 2**14, 2**-7, threshold=2.0)
    conditions = {k: v for k, v in report.items() if k != "warnings"}
    assert len(conditions) == 7
    bad = rv.LevelPlan(
        j0=plan.j0, a=plan.a, rho=plan.rho, j1=13, j2=plan.j2,
        jtop=13, r_n=plan.r_n, n=plan.n, alpha=plan.alpha,
    )
    bad_report = rv.validate_level_plan(bad, 2**14, 2**-7)
    assert not all(ok for _, ok in
                   (v for k, v in bad_report.items() if k != "warnings"))


def test_theta_hat_components_add_up(constant_model, abs_weight):
    path = rv.simulate_path(constant_model, n=2**12, seed=13)
    obs = rv.observe_rounded(path, alpha=2**-6)
    plan = rv.default_level_plan(obs.n, obs.alpha, rho=0.5)
    res = rv.theta_hat(obs, abs_weight, plan)
    comp = res.components
    total = comp["c_part"] + comp["R_part"] + comp["bias_part"]
    assert res.theta_hat == pytest.approx(total, rel=1e-12)
    # g' = 0 for the absolute weight, so the first-order correction drops out
    assert comp["bias_part"] == 0.0


def test_theta_hat_bias_term_sign(bs_model, rel_weight):
    path = rv.simulate_path(bs_model, n=2**12, seed=17)
    obs = rv.observe_rounded(path, alpha=2**-7)
    plan = rv.default_level_plan(obs.n, obs.alpha, rho=0.5)
    res = rv.theta_hat(obs, rel_weight, plan)
    # the relative weight has nonpositive g', so the correction subtracts
    assert res.components["bias_part"] <= 0.0


def test_estimates_approach_oracle(constant_model, abs_weight):
    n = 2**14
    path = rv.simulate_path(constant_model, n=n, seed=23)
    obs = rv.observe_rounded(path, alpha=n**-0.75)
    tilde = rv.theta_tilde(obs, abs_weight)
    plan = rv.default_level_plan(obs.n, obs.alpha, rho=0.75)
    hat = rv.theta_hat(obs, abs_weight, plan)
    for res in (tilde, hat):
        assert abs(res.theta_hat - 1.0) < 0.1


def test_realized_volatility_modes(short_obs, bs_model):
    lv = rv.realized_volatility(short_obs, mode="levels")
    pos_path = rv.simulate_path(bs_model, n=2**10, seed=29)
    pos_obs = rv.observe_rounded(pos_path, alpha=2**-8)
    lg = rv.realized_volatility(pos_obs, mode="log_levels")
    assert lv.theta_hat > 0
    assert lg.theta_hat > 0
    with pytest.raises(ParameterError):
        rv.realized_volatility(short_obs, mode="squares")


def test_estimate_result_json(short_obs, abs_weight):
    import json

    res = rv.theta_tilde(short_obs, abs_weight)
    payload = json.loads(res.to_json())
    assert payload["theta_hat"] == res.theta_hat
    assert payload["estimator_kind"] == "theta_tilde"


@settings(max_examples=25, deadline=None)
@given(st.integers(min_value=0, max_value=2**31 - 1))
def test_c_hat_invariant_to_within_cell_shuffles(seed):
    # with a constant weight only the multiset of increment sizes per cell
    # matters at that level
    rng = np.random.default_rng(seed)
    n, alpha, j = 64, 0.25, 2
    steps = rng.integers(-2, 3, size=n) * alpha
    vals = np.concatenate([[0.0], np.cumsum(steps)])
    w = rv.make_weight("absolute")
    base = rv.c_hat(obs_from(vals, alpha), w, j)
    block = steps[:16].copy()
    rng.shuffle(block)
    steps2 = steps.copy()
    steps2[:16] = block
    obs2 = obs_from(np.concatenate([[0.0], np.cumsum(steps2)]), alpha)
    assert np.allclose(rv.c_hat(obs2, w, j), base)
