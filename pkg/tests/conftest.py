"""Acceptance bookkeeping: one PASS/FAIL line per numbered criterion.

Tests in ``test_acceptance.py`` carry ``@pytest.mark.criterion(n, label)``;
a criterion passes only if every test tagged with it passes. The wall-clock
budget for the whole suite is checked at session end.
"""

import time

import pytest

SUITE_BUDGET_S = 30.0
SUITE_CRITERION = 10

_results: dict[int, dict] = {}
_start = time.perf_counter()


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, label): acceptance criterion")


def pytest_runtest_makereport(item, call):
    marker = item.get_closest_marker("criterion")
    if marker is None:
        return
    number, label = marker.args
    entry = _results.setdefault(number, {"labels": [], "ok": True, "tests": 0})
    if label not in entry["labels"]:
        entry["labels"].append(label)
    if call.when == "call" or call.excinfo is not None:
        entry["tests"] += call.when == "call"
        if call.excinfo is not None:
            entry["ok"] = False


def _elapsed():
    return time.perf_counter() - _start


def pytest_sessionfinish(session, exitstatus):
    if _results and _elapsed() > SUITE_BUDGET_S and session.exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    write = terminalreporter.write_line
    terminalreporter.section("acceptance criteria")
    elapsed = _elapsed()
    for number in sorted(_results):
        entry = _results[number]
        ok = entry["ok"] and entry["tests"] > 0
        labels = list(entry["labels"])
        if number == SUITE_CRITERION:
            ok = ok and elapsed <= SUITE_BUDGET_S
            labels.append(f"suite wall time {elapsed:.1f} s of {SUITE_BUDGET_S:.0f} s")
        verdict = "PASS" if ok else "FAIL"
        write(f"ACCEPTANCE {number:>2} {verdict}  {'; '.join(labels)} [tests: {entry['tests']}]")
