import numpy as np
import pytest

from jcmpemba import ModelParams

# lines collected by the acceptance suite, echoed once at the end of the run
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for line in ACCEPTANCE_LINES:
        terminalreporter.write_line(line)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def speedup_model():
    return ModelParams(g=1.0, kappa=8.0, kappa1=0.0)
