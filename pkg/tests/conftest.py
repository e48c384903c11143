import numpy as np
import pytest

from grushin.transform import GridSpec


@pytest.fixture
def rng():
    return np.random.default_rng(20240)


@pytest.fixture
def small_grid():
    """Grid safe for degree-6 content at |m| <= 2."""
    return GridSpec(n=1, Nx=64, x_extent=8.0, Nt=64, t_extent=2 * np.pi)


@pytest.fixture
def unit_period_grid():
    """T = 1 grid, where a single joint eigenmode has coefficient exactly 1."""
    return GridSpec(n=1, Nx=64, x_extent=4.0, Nt=64, t_extent=1.0)
