import numpy as np
import pytest

from unicorr.admm import solve_admm
from unicorr.core import LagSet
from unicorr.pdmm import solve_pdmm


@pytest.fixture(scope="session")
def converged_admm():
    """A small instance that genuinely reaches the residual criterion."""
    result = solve_admm(
        8, 2, LagSet.from_range(0, 1), seed=3, epsilon=1e-8, theory_checks="off"
    )
    assert result.stop_reason == "converged"
    return result


@pytest.fixture(scope="session")
def converged_pdmm():
    result = solve_pdmm(
        8, 2, LagSet.from_range(0, 1), seed=3, epsilon=1e-10, theory_checks="off"
    )
    assert result.stop_reason == "converged"
    return result


@pytest.fixture
def rng():
    return np.random.default_rng(0)
