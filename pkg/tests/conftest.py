import numpy as np
import pytest


@pytest.fixture
def rng():
    return np.random.default_rng(20241014)


def rel_err(a, b):
    return abs(a - b) / max(abs(b), 1e-300)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
