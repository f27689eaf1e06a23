"""Collects acceptance-criterion outcomes and prints one line per criterion."""

import pytest

_OUTCOMES: dict[str, str] = {}
_ORDER: list[str] = []
_NOTES: dict[str, str] = {}


def _label(item):
    mark = item.get_closest_marker("acceptance")
    return mark.args[0] if mark else None


def pytest_collection_modifyitems(config, items):
    for item in items:
        label = _label(item)
        if label and label not in _ORDER:
            _ORDER.append(label)


def pytest_deselected(items):
    for item in items:
        label = _label(item)
        if label:
            if label not in _ORDER:
                _ORDER.append(label)
            _OUTCOMES.setdefault(label, "SKIP")
            slow = item.get_closest_marker("slow") is not None
            _NOTES[label] = "long-running; select with -m slow" if slow else "deselected"


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    report = outcome.get_result()
    label = _label(item)
    if label is None:
        return
    if report.when == "call" or (report.when == "setup" and not report.passed):
        if report.passed:
            _OUTCOMES[label] = "PASS"
        elif report.skipped:
            _OUTCOMES[label] = "SKIP"
        else:
            _OUTCOMES[label] = "FAIL"


def pytest_terminal_summary(terminalreporter):
    if not _ORDER:
        return
    terminalreporter.section("acceptance criteria")
    for label in _ORDER:
        status = _OUTCOMES.get(label, "SKIP")
        suffix = f"  ({_NOTES[label]})" if status == "SKIP" and label in _NOTES else ""
        terminalreporter.write_line(f"{status:<5} {label}{suffix}")
