"""Collects acceptance-criterion outcomes and prints one line per criterion."""
from __future__ import annotations

import pytest

_results: dict[int, dict] = {}

def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")

@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    mark = item.get_closest_marker("criterion")
    if mark is None or report.when != "call" and not report.failed:
        return
    number, title = mark.args
    entry = _results.setdefault(number, {"title": title, "ok": True, "seconds": 0.0, "tests": 0})
    if report.when == "call":
        entry["tests"] += 1
        entry["seconds"] += report.duration
    if report.failed:
        entry["ok"] = False

def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        r = _results[number]
        verdict = "PASS" if r["ok"] else "FAIL"
        tr.write_line(f"[{verdict}] criterion {number:2d}: {r['title']} "
                      f"({r['tests']} checks, {r['seconds']:.2f} s)")
    passed = sum(r["ok"] for r in _results.values())
    tr.write_line(f"{passed}/{len(_results)} criteria passed")
