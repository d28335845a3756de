import math

import pytest
from hypothesis import HealthCheck, settings

settings.register_profile(
    "suite", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.filter_too_much])
settings.load_profile("suite")

from sonicbh import default_config, derive
from sonicbh.environment import EnvironmentSpec
from sonicbh.profiles import LineProfile, RingProfile


@pytest.fixture(scope="session")
def config():
    return default_config()


@pytest.fixture(scope="session")
def derived(config):
    return derive(config)


@pytest.fixture(scope="session")
def ring(config):
    return RingProfile.from_config(config)


@pytest.fixture(scope="session")
def line():
    # the long-run channel configuration: half-width 1, gradient 0.1, unit collapse time
    return LineProfile(a=1.0, kappa=0.1, tau=1.0)


@pytest.fixture(scope="session")
def env_lorentzian():
    return EnvironmentSpec(coupling_eff=0.02, cutoff=20.0, cutoff_shape="lorentzian")


@pytest.fixture(scope="session")
def env_exponential():
    return EnvironmentSpec(coupling_eff=1.3, cutoff=7.0, cutoff_shape="exponential")


LINE_T_HAWKING = 0.2 / (4.0 * math.pi)
