import time

import pytest

SUITE_BUDGET_S = 60.0

_results = {}
_session = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion")


def pytest_sessionstart(session):
    _session["start"] = time.perf_counter()


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    marker = item.get_closest_marker("criterion")
    if marker is None or report.when not in ("setup", "call"):
        return
    number, title = marker.args
    ok = report.passed or (report.when == "setup" and report.passed)
    prev = _results.get(number, (title, True))
    if report.when == "call" or not report.passed:
        _results[number] = (title, prev[1] and ok)


@pytest.hookimpl(tryfirst=True)
def pytest_sessionfinish(session, exitstatus):
    elapsed = time.perf_counter() - _session.get("start", time.perf_counter())
    _session["elapsed"] = elapsed
    if _results and elapsed >= SUITE_BUDGET_S and session.exitstatus == 0:
        session.exitstatus = pytest.ExitCode.TESTS_FAILED


def pytest_terminal_summary(terminalreporter):
    if not _results:
        return
    tr = terminalreporter
    tr.section("acceptance criteria")
    for number in sorted(_results):
        title, ok = _results[number]
        tr.write_line(f"AC{number:<3} {'PASS' if ok else 'FAIL'}  {title}")
    elapsed = _session.get("elapsed", 0.0)
    ok = elapsed < SUITE_BUDGET_S
    tr.write_line(f"AC11  {'PASS' if ok else 'FAIL'}  test session finished in {elapsed:.1f} s "
                  f"(budget {SUITE_BUDGET_S:.0f} s)")
