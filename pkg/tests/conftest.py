import numpy as np
import pytest

from robust_wald.config import SCENARIOS, build_scenario
from robust_wald.disturbance import ArSpec, InnovationSpec

# The two reference clutter models as printed (read as polynomial roots).
REF_S1 = np.array([0.5, 0.3 * np.exp(-2j * np.pi * 0.1), 0.4 * np.exp(2j * np.pi * 0.01)])
REF_S2 = np.array([
    0.5 * np.exp(-2j * np.pi * 0.4),
    0.6 * np.exp(-2j * np.pi * 0.2),
    0.7,
    0.4 * np.exp(2j * np.pi * 0.1),
    0.5 * np.exp(2j * np.pi * 0.3),
    0.6 * np.exp(2j * np.pi * 0.35),
])


@pytest.fixture(scope="session")
def scenario1():
    return build_scenario(SCENARIOS["scenario1"], 1e-2)


@pytest.fixture(scope="session")
def scenario2():
    return build_scenario(SCENARIOS["scenario2"], 1e-2)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def white_gaussian():
    return ArSpec([], InnovationSpec("complex_gaussian", 1.0), True)
