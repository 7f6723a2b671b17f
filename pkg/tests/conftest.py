"""Collects the outcome of every test marked ``acceptance(label)`` and prints
one line per criterion at the end of the run."""
from __future__ import annotations

import pytest

_outcomes: dict[str, list[str]] = {}


@pytest.hookimpl(hookwrapper=True)
def pytest_runtest_makereport(item, call):
    outcome = yield
    marker = item.get_closest_marker("acceptance")
    outcome.get_result().acceptance_label = marker.args[0] if marker and marker.args else None


def pytest_runtest_logreport(report):
    label = getattr(report, "acceptance_label", None)
    if label is None:
        return
    # the call phase decides, unless setup already failed or skipped
    if report.when == "call" or report.outcome != "passed":
        _outcomes.setdefault(label, []).append(report.outcome)


def _verdict(outcomes: list[str]) -> str:
    if "failed" in outcomes:
        return "FAIL"
    if all(o == "skipped" for o in outcomes):
        return "SKIP"
    return "PASS"


def _criterion_number(label: str) -> tuple:
    head = label.split(".", 1)[0]
    return (int(head), label) if head.isdigit() else (10**6, label)


def pytest_terminal_summary(terminalreporter):
    if not _outcomes:
        return
    terminalreporter.section("acceptance criteria")
    for label in sorted(_outcomes, key=_criterion_number):
        outcomes = _outcomes[label]
        terminalreporter.write_line(f"{_verdict(outcomes)}  {label}  ({len(outcomes)} checks)")
