"""Collects acceptance results and prints one PASS/FAIL line per criterion."""

from __future__ import annotations

_TITLES: dict[int, str] = {}
_OUTCOMES: dict[int, list[bool]] = {}
_ITEMS: dict[str, int] = {}


def pytest_configure(config):
    config.addinivalue_line("markers", "criterion(number, title): acceptance criterion checked by a test")


def pytest_collection_modifyitems(items):
    for item in items:
        mark = item.get_closest_marker("criterion")
        if mark is not None:
            number, title = mark.args
            _TITLES[number] = title
            _ITEMS[item.nodeid] = number


def pytest_runtest_logreport(report):
    number = _ITEMS.get(report.nodeid)
    if number is None:
        return
    if report.when == "call" or report.failed:
        _OUTCOMES.setdefault(number, []).append(report.passed)


def pytest_terminal_summary(terminalreporter):
    if not _TITLES:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(_TITLES):
        results = _OUTCOMES.get(number)
        if not results:
            status = "NOT RUN"
        else:
            status = "PASS" if all(results) else "FAIL"
        terminalreporter.write_line(f"criterion {number}: {status}  {_TITLES[number]}")
