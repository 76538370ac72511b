"""Shared fixtures: expensive root searches run once per session.

Also hosts the acceptance verdict channel: verdict lines are collected
here and replayed in a terminal section after the run, so they stay
visible under pytest's fd-level output capture.
"""

import importlib.resources

import pytest

from apointlab.apoints import find_apoints, ingest_zero_table

_ACCEPTANCE_VERDICTS: list[str] = []


@pytest.fixture
def verdict():
    def _verdict(num: int, ok: bool, detail: str) -> None:
        line = f"criterion {num:02d} {'PASS' if ok else 'FAIL'}: {detail}"
        _ACCEPTANCE_VERDICTS.append(line)
        assert ok, line
    return _verdict


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if _ACCEPTANCE_VERDICTS:
        terminalreporter.section("acceptance verdicts")
        for line in _ACCEPTANCE_VERDICTS:
            terminalreporter.line(line)


@pytest.fixture(scope="session")
def zero_table():
    ref = importlib.resources.files("apointlab") / "data" / "zeta_zeros_2000.txt"
    with importlib.resources.as_file(ref) as path:
        return ingest_zero_table(path)


@pytest.fixture(scope="session")
def zeros_100():
    return find_apoints(0j, 100.0)


@pytest.fixture(scope="session")
def apoints_a2_100():
    return find_apoints(2 + 0j, 100.0)


@pytest.fixture(scope="session")
def apoints_a2_2000():
    # the one genuinely long search (~2 min); used by the slow checks
    return find_apoints(2 + 0j, 2000.0)
