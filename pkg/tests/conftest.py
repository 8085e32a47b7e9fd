"""Shared fixtures and the acceptance-criteria reporter.

Acceptance tests register one PASS/FAIL verdict per criterion; a terminal
summary hook prints one line per criterion at the end of the run so the
gate's outcome is visible regardless of pytest's capture settings.
"""

from __future__ import annotations

from contextlib import contextmanager

CRITERIA: dict[int, tuple[str, str]] = {}


@contextmanager
def criterion(number: int, label: str):
    try:
        yield
    except BaseException:
        CRITERIA[number] = (label, "FAIL")
        raise
    CRITERIA[number] = (label, "PASS")


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        label, verdict = CRITERIA[number]
        terminalreporter.write_line(
            f"criterion {number} ({label}): {verdict}")
