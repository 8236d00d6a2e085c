import numpy as np
import pytest

from csgs.grid import RadialGrid

# criterion number -> (passed, detail); printed after the run
ACCEPTANCE = {}


def record(criterion, title, passed, detail=""):
    ACCEPTANCE[criterion] = (title, bool(passed), detail)
    return passed


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for k in sorted(ACCEPTANCE):
        title, ok, detail = ACCEPTANCE[k]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] criterion {k:2d}: {title} -- {detail}")


@pytest.fixture(scope="session")
def grid():
    return RadialGrid(40.0, 4096)


@pytest.fixture(scope="session")
def small_grid():
    return RadialGrid(30.0, 1024)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
