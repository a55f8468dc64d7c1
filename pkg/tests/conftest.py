import math

import pytest

from cascade_sim import PhysicalParams


@pytest.fixture
def chiral():
    return PhysicalParams(S=4.0, phi=math.pi / 2)


@pytest.fixture
def asymmetric():
    return PhysicalParams(S=4.0, phi=math.pi / 3, epsilon=-0.4)


def pytest_terminal_summary(terminalreporter):
    import sys

    module = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    results = getattr(module, "RESULTS", [])
    if not results:
        return
    terminalreporter.section("acceptance criteria")
    for result in sorted(results, key=lambda r: r.criterion):
        terminalreporter.write_line(result.line())
