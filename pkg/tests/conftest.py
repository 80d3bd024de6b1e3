"""Shared fixtures and the acceptance summary printed at the end of a run."""

from __future__ import annotations

import pytest
from gmpy2 import mpq

from quotseries.series import TruncSeries
from quotseries.rings import QQ

ACCEPTANCE_LINES: dict = {}


def q_series(values, order=None, var="q", start=0):
    """Rational series from a coefficient list (plain ints or ``(num, den)`` pairs)."""
    vals = [mpq(*v) if isinstance(v, tuple) else mpq(v) for v in values]
    return TruncSeries.from_list(QQ, vals, order=order, var=var, start=start)


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_LINES:
        return
    terminalreporter.section("acceptance criteria")
    for key in sorted(ACCEPTANCE_LINES):
        terminalreporter.write_line(ACCEPTANCE_LINES[key])


@pytest.fixture
def record_acceptance():
    def record(number: int, ok: bool, detail: str):
        line = f"criterion {number}: {'PASS' if ok else 'FAIL'} ({detail})"
        ACCEPTANCE_LINES[number] = line
        print(line)
    return record
