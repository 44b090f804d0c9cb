"""Shared fixtures plus the acceptance-criteria summary printed after a run."""

from __future__ import annotations

import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from litterscan.taxonomy import default_taxonomy

_acceptance_results: dict[str, str] = {}


def pytest_configure(config):
    config.addinivalue_line(
        "markers", "acceptance(name): marks a test as one named acceptance criterion"
    )


@pytest.fixture(scope="session")
def tax():
    return default_taxonomy()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("acceptance")
    if marker is None:
        return
    name = marker.args[0]
    if report.when == "call":
        _acceptance_results[name] = "PASS" if report.passed else "FAIL"
    elif report.when == "setup" and (report.failed or report.skipped):
        _acceptance_results[name] = "FAIL" if report.failed else "SKIP"


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not _acceptance_results:
        return
    terminalreporter.section("acceptance criteria")
    for name, status in _acceptance_results.items():
        terminalreporter.write_line(f"{status}  {name}")
