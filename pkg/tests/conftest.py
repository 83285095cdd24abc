import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", max_examples=40, deadline=None)
settings.load_profile("default")

ACCEPTANCE_LINES = []


@pytest.fixture
def acceptance_log():
    return ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)


def mc_se_cov(a, b):
    """Sample covariance and its standard error."""
    a = a - a.mean()
    b = b - b.mean()
    prod = a * b
    return prod.mean(), prod.std(ddof=1) / np.sqrt(a.size)


def mc_se_var(a):
    return mc_se_cov(a, a)
