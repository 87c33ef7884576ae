import pytest

from jacobi_jost.coeffs import powerlaw


@pytest.fixture(scope="session")
def super_model():
    """sigma = 2, alpha = 0, beta = 1, gamma = 1: tau = 4."""
    return powerlaw(2, alpha=0, beta=1)


@pytest.fixture(scope="session")
def osc_model():
    """sigma = 2, tau = -4."""
    return powerlaw(2, tau=-4)
