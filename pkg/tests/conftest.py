"""Shared fixtures: acceptance-criterion reporting.

Criterion outcomes are printed where they run *and* replayed in a terminal
summary section, so the pass/fail lines stay visible in a plain
``pytest -v`` run where per-test stdout is captured.
"""

import pytest

ACCEPTANCE_LINES = []


@pytest.fixture
def record_criterion():
    def _record(number: int, description: str, passed: bool) -> str:
        line = f"[{'PASS' if passed else 'FAIL'}] criterion {number}: {description}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return line

    return _record


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
