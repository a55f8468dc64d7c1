"""Acceptance gate: one test per criterion, each run at its stated tolerance.

A one-line PASS/FAIL summary per criterion is printed at the end of the
pytest run (see ``conftest.py``) and immediately with ``-s``.
"""
import pytest

from cascade_sim.verification import CHECKS

RESULTS = []


@pytest.mark.parametrize("check", CHECKS, ids=[c.__name__.removeprefix("check_") for c in CHECKS])
def test_acceptance(check):
    result = check()
    RESULTS.append(result)
    print(result.line())
    assert result.passed, result.line()
