import numpy as np
import pytest

from nqst.linalg import bell_projector, random_density_matrix, werner_state


@pytest.fixture
def rng():
    return np.random.default_rng(7)


@pytest.fixture
def bell_rho():
    return bell_projector()


@pytest.fixture
def mixed_rho():
    return werner_state(0.93)


@pytest.fixture
def random_states(rng):
    return [random_density_matrix(4, rng) for _ in range(20)]
