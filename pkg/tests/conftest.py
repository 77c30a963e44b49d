import sys
from pathlib import Path

import numpy as np
import pytest

from weakpointer import Chirped, Cubic, Gaussian, GridSpec, MomentumSkewed, SystemSpec, build_pointer

sys.path.insert(0, str(Path(__file__).parent))

R = 2 ** -0.5
SIGMA_Z = np.diag([1.0, -1.0])
KET0 = np.array([1.0, 0.0])
PLUS = np.array([R, R])
# sigma_z with |+> pre-selection: these post-selections give A_w = +i and -i
POST_PLUS_I = np.array([R, 1j * R])
POST_MINUS_I = np.array([R, -1j * R])

CANONICAL = {
    "gaussian": Gaussian(sigma=1.0),
    "chirped": Chirped(sigma=1.0, c=0.25),
    "cubic": Cubic(sigma=1.0, b=0.05),
    "momentum_skewed": MomentumSkewed(s=1.0, lam=0.5),
}


@pytest.fixture(scope="session")
def grid():
    return GridSpec()


@pytest.fixture(scope="session")
def pointers(grid):
    return {name: build_pointer(fam, grid) for name, fam in CANONICAL.items()}


@pytest.fixture(scope="session")
def sys_a():
    return SystemSpec(SIGMA_Z, PLUS, POST_PLUS_I)


@pytest.fixture(scope="session")
def sys_b():
    return SystemSpec(SIGMA_Z, PLUS, POST_MINUS_I)


@pytest.fixture(scope="session")
def sys_eigen():
    return SystemSpec(SIGMA_Z, KET0, KET0)


# one line per acceptance criterion, echoed at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
