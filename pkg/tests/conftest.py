import pytest

from ipd_learning import validate_payoff
from ipd_learning._kernels import warm_up


@pytest.fixture(scope="session", autouse=True)
def _warm_kernels():
    # Compile the integration kernels once so per-test timings are honest.
    warm_up()


@pytest.fixture(scope="session")
def standard():
    """The classic (T, R, P, S) = (5, 3, 1, 0) dilemma; submodular."""
    return validate_payoff(5.0, 3.0, 1.0, 0.0)


@pytest.fixture(scope="session")
def high_reward():
    """(5, 4.5, 1, 0): reward close to temptation, not submodular."""
    return validate_payoff(5.0, 4.5, 1.0, 0.0)
