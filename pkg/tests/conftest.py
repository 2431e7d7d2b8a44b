from fractions import Fraction

import pytest
from hypothesis import settings

from trioscillator.parameters import RahmanParams, derive_params

settings.register_profile("default", deadline=None, max_examples=40)
settings.load_profile("default")

NAMED_SETS = ("2,1,1,1", "3,1,2,5", "1,2,3,4")


@pytest.fixture(params=NAMED_SETS)
def named(request):
    return derive_params(RahmanParams.parse(request.param))


@pytest.fixture
def d2111():
    return derive_params(RahmanParams.parse("2,1,1,1"))


@pytest.fixture
def d3125():
    return derive_params(RahmanParams.parse("3,1,2,5"))


def frac(q):
    return Fraction(int(q.numerator), int(q.denominator))


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
