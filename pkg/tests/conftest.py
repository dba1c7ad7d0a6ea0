import numpy as np
import pytest

from udd_lab.services.simulator_service import random_bath


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def generic_bath():
    return random_bath(4, 1.0, 1.0, seed=11)
