import numpy as np
import pytest

from interevent.intervals import IntervalSequence


def make_seq(values, user="u"):
    return IntervalSequence(user, np.asarray(values, dtype=float))


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
