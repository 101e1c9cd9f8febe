"""Shared fixtures and the per-criterion PASS/FAIL summary for the acceptance suite."""

from __future__ import annotations

import time

import pytest

from fsq.protocol.schnorr import Schnorr, SchnorrParams

_criteria: dict[int, dict] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion evidence")


def pytest_runtest_logreport(report):
    if report.when != "call" and not (report.when == "setup" and report.failed):
        return
    number = getattr(report, "criterion", None)
    if number is None:
        return
    entry = _criteria.setdefault(number[0], {"title": number[1], "outcomes": [], "seconds": 0.0})
    entry["outcomes"].append(report.passed)
    entry["seconds"] += report.duration


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is not None:
        report.criterion = tuple(mark.args)


def pytest_terminal_summary(terminalreporter):
    if not _criteria:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_criteria):
        e = _criteria[number]
        verdict = "PASS" if e["outcomes"] and all(e["outcomes"]) else "FAIL"
        tr.write_line(f"criterion {number:2d} {verdict}  {e['title']}  ({len(e['outcomes'])} checks, {e['seconds']:.1f} s)")


@pytest.fixture(scope="session")
def toy() -> Schnorr:
    """p = 23, order 11, g = 2."""
    return Schnorr(SchnorrParams.toy())


@pytest.fixture(scope="session")
def schnorr64() -> Schnorr:
    return Schnorr(SchnorrParams.generate(64, b"test-group"))


@pytest.fixture
def stopwatch():
    t0 = time.perf_counter()
    return lambda: time.perf_counter() - t0
