import numpy as np
import pytest

import roundvol as rv


@pytest.fixture(scope="session")
def constant_model():
    return rv.make_model("constant", [1.0], x0=0.0, drift_mode="assumption_D")


@pytest.fixture(scope="session")
def bs_model():
    return rv.make_model("black_scholes", [0.3], x0=1.0, drift_mode="assumption_D")


@pytest.fixture(scope="session")
def abs_weight():
    return rv.make_weight("absolute")


@pytest.fixture(scope="session")
def rel_weight():
    return rv.make_weight("relative", domain=(0.1, np.inf))


@pytest.fixture(scope="session")
def short_path(constant_model):
    return rv.simulate_path(constant_model, n=2**12, seed=42)


@pytest.fixture(scope="session")
def short_obs(short_path):
    return rv.observe_rounded(short_path, alpha=2**-6)
