"""Shared test configuration.

Collects the verdicts recorded by the acceptance suite and prints one
line per criterion after the normal pytest summary, so a reader can see
at a glance which end-to-end guarantees hold without scrolling through
individual test ids.
"""

from __future__ import annotations

import functools
from typing import Callable

# number -> (label, passed); populated by tests/test_acceptance.py
ACCEPTANCE_RESULTS: dict[int, tuple[str, bool]] = {}


def criterion(number: int, label: str) -> Callable:
    """Mark a test as one acceptance criterion.

    Registers FAIL up front and flips it to PASS only when the test body
    returns, so an assertion anywhere inside leaves a FAIL line behind.
    """

    def wrap(fn: Callable) -> Callable:
        @functools.wraps(fn)
        def run(*args, **kwargs):
            ACCEPTANCE_RESULTS[number] = (label, False)
            out = fn(*args, **kwargs)
            ACCEPTANCE_RESULTS[number] = (label, True)
            return out

        return run

    return wrap


def pytest_terminal_summary(terminalreporter, exitstatus, config) -> None:
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE_RESULTS):
        label, passed = ACCEPTANCE_RESULTS[number]
        verdict = "PASS" if passed else "FAIL"
        terminalreporter.write_line(f"criterion {number} ({label}): {verdict}")
