import pytest

from nsaclab.profile import build_profile
from nsaclab.thermo import ModelParams

THETA_LOW = -0.08
THETA_HIGH = 0.16


@pytest.fixture(scope="session")
def params():
    return ModelParams()


@pytest.fixture(scope="session")
def theta_low(params):
    return params.theta_star + THETA_LOW


@pytest.fixture(scope="session")
def theta_high(params):
    return params.theta_star + THETA_HIGH


@pytest.fixture(scope="session")
def fwd_profile(params, theta_low):
    return build_profile(theta_low, params)


@pytest.fixture(scope="session")
def wave(params, theta_low):
    """Cached traveling waves keyed by (m, family)."""
    from nsaclab.twave import connect

    cache = {}

    def get(m, family="Forward"):
        key = (m, family)
        if key not in cache:
            cache[key] = connect(m, theta_low, params, family=family)
        return cache[key]

    return get
