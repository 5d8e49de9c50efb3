import numpy as np
import pytest

from lvpatch import estimate_ultimate_bounds, example51_params, integrate

MERGE_ICS = [(1.0, 1.0, 1.0, 1.0), (3.0, 2.0, 0.5, 1.5), (0.2, 0.4, 2.0, 3.0)]


@pytest.fixture(scope="session")
def ex51():
    return example51_params()


@pytest.fixture(scope="session")
def ex51_region(ex51):
    return estimate_ultimate_bounds(ex51, seed=42)


@pytest.fixture(scope="session")
def ex51_long(ex51):
    """Trajectory from (1,1,1,1) over [0, 350] at h = 1e-3."""
    return integrate(ex51, [1.0, 1.0, 1.0, 1.0], 0.0, 350.0)


def logistic(t, x0, r=1.0, K=1.0):
    return K * x0 * np.exp(r * t) / (K - x0 + x0 * np.exp(r * t))


_ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def acceptance_lines():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
