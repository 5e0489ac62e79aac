import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from recoherence.scans import Physics  # noqa: E402


@pytest.fixture(scope="session")
def physics():
    return Physics()


@pytest.fixture(scope="session")
def spectrum(physics):
    return physics.spectrum()


_CRITERIA = []


@pytest.fixture
def criterion():
    """Record one acceptance line, print it, and fail the test if it did not pass."""

    def record(name, passed, detail):
        line = f"{'PASS' if passed else 'FAIL'}  {name}: {detail}"
        _CRITERIA.append(line)
        print(line)
        assert passed, line

    return record


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
