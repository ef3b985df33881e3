import math

import numpy as np
import pytest
from hypothesis import given, strategies as st

import roundvol as rv
from roundvol.exceptions import ParameterError


def test_constant_model_coefficients():
    m = rv.make_model("constant", [0.7], x0=0.0)
    sig, sig_p, a = rv.eval_coefficients(m, 1.3)
    assert sig == 0.7
    assert sig_p == 0.0
    assert a == 0.0


def test_black_scholes_coefficients_under_structured_drift():
    m = rv.make_model("black_scholes", [0.3], x0=1.0, drift_mode="assumption_D")
    sig, sig_p, a = rv.eval_coefficients(m, 2.0)
    assert sig == pytest.approx(0.6)
    assert sig_p == pytest.approx(0.3)
    # a = sigma sigma' / 2
    assert a == pytest.approx(0.5 * 0.6 * 0.3)


def test_black_scholes_zero_drift_has_no_drift_term():
    m = rv.make_model("black_scholes", [0.3], x0=1.0, drift_mode="zero")
    _, _, a = rv.eval_coefficients(m, 2.0)
    assert a == 0.0


def test_sigma_evaluates_on_domain():
    m = rv.make_model("black_scholes", [0.3], x0=1.0)
    assert m.domain == (0.0, np.inf)
    assert m.sigma(2.0) == pytest.approx(0.6)
    vals = m.sigma(np.array([0.5, 3.0]))
    assert vals[0] == pytest.approx(0.15)
    assert vals[1] == pytest.approx(0.9)


def test_scale_transform_black_scholes_round_trip():
    m = rv.make_model("black_scholes", [1.0], x0=1.0, drift_mode="assumption_D")
    # with sigma(x) = x and x0 = 1 the transform is log, its inverse exp
    assert rv.scale_transform(m, 0.3, "inverse") == pytest.approx(math.exp(0.3))
    y = rv.scale_transform(m, 2.5, "forward")
    assert y == pytest.approx(math.log(2.5))
    back = rv.scale_transform(m, y, "inverse")
    assert back == pytest.approx(2.5, rel=1e-9)


def test_scale_transform_requires_structured_drift():
    m = rv.make_model("black_scholes", [0.3], x0=1.0, drift_mode="zero")
    assert not m.exact_transform_available


def test_custom_model_with_numeric_scale():
    m = rv.make_model(
        "custom",
        [],
        x0=0.5,
        drift_mode="assumption_D",
        domain=(0.0, np.inf),
        sigma=lambda x: np.sqrt(x),
        sigma_prime=lambda x: 0.5 / np.sqrt(x),
        sigma_second=lambda x: -0.25 * x ** -1.5,
    )
    y = rv.scale_transform(m, 1.0, "forward")
    back = rv.scale_transform(m, y, "inverse")
    assert back == pytest.approx(1.0, rel=1e-8)


def test_make_model_validation():
    with pytest.raises(ParameterError):
        rv.make_model("constant", [-1.0])
    with pytest.raises(ParameterError):
        rv.make_model("no_such_family", [1.0])
    with pytest.raises(ParameterError):
        rv.make_model("black_scholes", [0.3], x0=-2.0)


def test_model_json_round_trip():
    m = rv.make_model("black_scholes", [0.3], x0=1.0, drift_mode="assumption_D")
    m2 = rv.VolatilityModel.from_json(m.to_json())
    assert m2.name == m.name
    assert m2.params == m.params
    assert m2.sigma(2.0) == m.sigma(2.0)


def test_weight_absolute():
    w = rv.make_weight("absolute")
    assert w.g(3.7) == 1.0
    assert w.g_prime(3.7) == 0.0
    assert w.sign_g_prime == "identically-zero"
    assert w.sqrt_abs_gg_prime(3.7) == 0.0


def test_weight_relative_spec_values():
    w = rv.make_weight("relative", domain=(0.1, np.inf))
    assert w.g(2.0) == pytest.approx(0.5)
    assert w.g_prime(2.0) == pytest.approx(-0.25)
    assert w.sign_g_prime == "nonpositive"
    assert w.sqrt_abs_gg_prime(2.0) == pytest.approx(math.sqrt(0.5 * 0.25))
    # outside the domain everything is zero
    assert w.g(0.05) == 0.0
    assert w.g_prime(0.05) == 0.0


def test_weight_relative_rejects_domain_touching_zero():
    with pytest.raises(ParameterError):
        rv.make_weight("relative", domain=(-0.5, np.inf))


@given(st.floats(min_value=0.05, max_value=50.0))
def test_relative_weight_times_level_is_one(x):
    w = rv.make_weight("relative", domain=(0.01, np.inf))
    assert w.g(x) * x == pytest.approx(1.0)
