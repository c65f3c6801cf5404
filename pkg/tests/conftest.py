import itertools

import pytest

from cutapprox import Scenario

ALPHAS = (1.5, 4.7, 10.0)
RATIOS = (0.1, 1.0, 10.0, 100.0)
BETA = 0.3

# criterion lines collected by test_acceptance.py
ACCEPTANCE_LINES = []


def standard_scenarios():
    """The 12-scenario grid alpha x lambda/mu with beta=0.3, mu=1."""
    return [Scenario(a, BETA, r, 1.0) for a, r in itertools.product(ALPHAS, RATIOS)]


@pytest.fixture
def base():
    return Scenario(4.7, 0.3, 1.0, 1.0)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
