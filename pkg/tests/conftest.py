import numpy as np
import pytest
from hypothesis import settings

from orlicz_na import OrliczBall, YoungFunction

settings.register_profile("det", derandomize=True, deadline=None)
settings.load_profile("det")


@pytest.fixture(scope="session")
def l1_2d():
    return OrliczBall([YoungFunction.power(1.0)] * 2)


@pytest.fixture(scope="session")
def l2_2d():
    return OrliczBall([YoungFunction.power(2.0)] * 2)


@pytest.fixture(scope="session")
def l1_3d():
    return OrliczBall([YoungFunction.power(1.0)] * 3)


@pytest.fixture(scope="session")
def l2_3d():
    return OrliczBall([YoungFunction.power(2.0)] * 3)


@pytest.fixture(scope="session")
def cube_2d():
    return OrliczBall([YoungFunction.flat_then_inf(1.0)] * 2)


@pytest.fixture(scope="session")
def rng():
    return np.random.default_rng(20240)
