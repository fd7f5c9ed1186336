import pytest

from rankcomm.field import FieldSpec

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def gf3():
    return FieldSpec.prime(3)


@pytest.fixture
def gf5():
    return FieldSpec.prime(5)


@pytest.fixture
def gf7():
    return FieldSpec.prime(7)


@pytest.fixture
def qq():
    return FieldSpec.rationals()


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
