import numpy as np
import pytest

from boxsafe.scenarios import scenario_nonlinear2d, scenario_planar_robot


@pytest.fixture(scope="session")
def nonlinear2d():
    return scenario_nonlinear2d()


@pytest.fixture(scope="session")
def planar_robot():
    return scenario_planar_robot()


@pytest.fixture
def rng():
    return np.random.default_rng(20240817)
