import sys

import pytest

from artifact.curve import EllipticCurve, one_point_curve
from artifact.chars import CharTable
from artifact.heckegraph import HeckePipeline


@pytest.fixture(scope="session")
def X2():
    return one_point_curve(2)


@pytest.fixture(scope="session")
def X3():
    return one_point_curve(3)


@pytest.fixture(scope="session")
def X4():
    return one_point_curve(4)


@pytest.fixture(scope="session")
def E3pts():
    # y^2 + y = x^3 over F_2: three rational points, all five rank-3 constants show up
    return EllipticCurve(2, (0, 0, 1, 0, 0))


@pytest.fixture(scope="session")
def E5pts():
    return EllipticCurve(2, (0, 0, 1, 1, 0))


@pytest.fixture(scope="session")
def table2(X2):
    return CharTable(X2)


_pipes = {}


@pytest.fixture(scope="session")
def pipeline():
    def get(curve):
        if curve not in _pipes:
            _pipes[curve] = HeckePipeline(curve)
        return _pipes[curve]
    return get


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance") or sys.modules.get("tests.test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in mod.report_lines():
        terminalreporter.write_line(line)
