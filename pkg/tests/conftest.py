import mpmath as mp
import pytest

from planarop.mpnum import PrecisionContext

ACCEPTANCE_LINES = []


@pytest.fixture(scope="session")
def sqrt2():
    with mp.workprec(2048):
        return +mp.sqrt(2)


@pytest.fixture(scope="session")
def inv_sqrt2():
    with mp.workprec(2048):
        return 1 / mp.sqrt(2)


@pytest.fixture(scope="session")
def ctx256():
    return PrecisionContext(256)


@pytest.fixture(scope="session")
def ctx512():
    return PrecisionContext(512)


@pytest.fixture
def report():
    """Record one acceptance line; printed again in the terminal summary."""

    def _report(number, ok, detail):
        line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
        ACCEPTANCE_LINES.append(line)
        print(line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
