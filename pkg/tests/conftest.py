import pytest

from dosched.config import NetworkConfig

_CRITERIA = []


@pytest.fixture
def cfg():
    return NetworkConfig()


@pytest.fixture(scope="session")
def criterion():
    """Record one pass/fail line per acceptance criterion.

    Lines are echoed immediately and repeated in the terminal summary.
    """

    def report(number, passed, detail):
        line = f"CRITERION {number}: {'PASS' if passed else 'FAIL'}  {detail}"
        _CRITERIA.append(line)
        print("\n" + line)
        return passed

    return report


def pytest_terminal_summary(terminalreporter):
    if _CRITERIA:
        terminalreporter.section("acceptance criteria")
        for line in _CRITERIA:
            terminalreporter.write_line(line)
