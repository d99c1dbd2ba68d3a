import math

import numpy as np
import pytest

from hiddencoherence.state import DensityMatrix, random_density
from hiddencoherence.unitaries import haar_unitary

SQRT2 = math.sqrt(2.0)


def mixed_states(n, seed=0):
    """``n`` reproducible random states of mixed rank (mostly full rank)."""
    ranks = (4, 4, 3, 2)
    return [random_density(seed * 100_000 + i, ranks[i % 4]) for i in range(n)]


def pure_states(n, seed=0):
    rng = np.random.Generator(np.random.PCG64(seed))
    out = []
    for _ in range(n):
        psi = haar_unitary(rng)[:, 0]
        out.append(DensityMatrix(np.outer(psi, psi.conj())))
    return out


@pytest.fixture(scope="session")
def states_1000():
    return mixed_states(1000, seed=1)


@pytest.fixture
def rng():
    return np.random.Generator(np.random.PCG64(12345))


#: one line per acceptance criterion, filled by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
