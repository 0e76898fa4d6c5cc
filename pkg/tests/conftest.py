import sys

import numpy as np
import pytest

from openwigner import GaussianMoments, PhaseSpaceGrid, gaussian_wigner


@pytest.fixture
def grid64():
    return PhaseSpaceGrid.symmetric(8.0, 8.0, 64)


@pytest.fixture
def coherent64(grid64):
    return gaussian_wigner(GaussianMoments(1.0, -0.5, 0.5, 0.5, 0.0), grid64)


@pytest.fixture
def rng():
    return np.random.default_rng(1234)



def pytest_terminal_summary(terminalreporter):
    module = sys.modules.get("test_acceptance")
    lines = getattr(module, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for criterion in sorted(lines):
            terminalreporter.write_line(lines[criterion])
