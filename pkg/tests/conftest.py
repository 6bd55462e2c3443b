import os
import sys

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

sys.path.insert(0, os.path.dirname(__file__))

from itdist.registry import load_algebra  # noqa: E402

settings.register_profile(
    "itdist",
    deadline=None,
    derandomize=True,
    suppress_health_check=[HealthCheck.too_slow, HealthCheck.data_too_large],
)
settings.load_profile("itdist")


@pytest.fixture(scope="session")
def alg():
    """Loader for packaged fixture algebras, e.g. ``alg("a2")``."""
    return load_algebra


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


# one line per acceptance criterion, printed in the terminal summary
_CRITERIA = {}


@pytest.fixture
def criterion_log():
    def record(number, ok, summary):
        _CRITERIA[number] = (ok, summary)
        print(f"criterion {number}: {'PASS' if ok else 'FAIL'} - {summary}")
    return record


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        ok, summary = _CRITERIA[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'} - {summary}")
