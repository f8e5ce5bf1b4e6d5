import numpy as np
import pytest
from hypothesis import settings

from eerd.equilibrium import compute_equilibrium
from eerd.grid import Grid
from eerd.model import ConstantRate, LogEntropy, ModelFunctions, PowerEntropy, PowerWeight, SRH
from eerd.state import Bounds

settings.register_profile("eerd", max_examples=60, deadline=None)
settings.load_profile("eerd")


@pytest.fixture
def ref_model():
    return ModelFunctions(LogEntropy(1.0), PowerWeight(1.0, 0.25), ConstantRate(5.0))


@pytest.fixture
def srh_model():
    return ModelFunctions(PowerEntropy(2.0, 0.5), PowerWeight(1.0, 0.2), SRH(0.1, 0.02, 0.02))


@pytest.fixture
def ref_bounds():
    return Bounds(0.5, 2.0)


@pytest.fixture
def grid64():
    return Grid(1.0, 64)


@pytest.fixture
def ref_eq(ref_model, grid64):
    return compute_equilibrium(1.0, 0.0, grid64, ref_model)


def smooth_state_arrays(g, rng, n0=1.2, p0=1.2, u0=1.0, amp=0.2):
    """Positive low-mode perturbations of constants with zero net charge."""
    k = np.arange(1, 4)
    modes = np.cos(np.pi * np.outer(g.x, k) / g.L)
    n = n0 * (1 + amp * modes @ rng.uniform(-1, 1, 3) / 3)
    p = p0 * (1 + amp * modes @ rng.uniform(-1, 1, 3) / 3)
    p = p + (n - p).mean()
    u = u0 * (1 + amp * modes @ rng.uniform(-1, 1, 3) / 3)
    return n, p, u


# one line per acceptance criterion, printed after the test session
ACCEPTANCE_LINES = {}


def record_criterion(number: int, title: str, passed: bool, detail: str):
    line = f"criterion {number} [{'PASS' if passed else 'FAIL'}] {title}: {detail}"
    ACCEPTANCE_LINES[number] = line
    print(line)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[k])
