import pytest

from dulac.scalars import gaussian_rationals
from oracle import qi2


@pytest.fixture
def QI():
    return gaussian_rationals()


@pytest.fixture
def QI2():
    return qi2()


_ACCEPTANCE = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE.append


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
