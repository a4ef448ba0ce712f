import pytest

from omin.conflict import MessageSet

from bruteforce import PAPER_ASA, PAPER_RSA


@pytest.fixture
def asa_example():
    return MessageSet.from_destinations(PAPER_ASA)


@pytest.fixture
def rsa_example():
    return MessageSet.from_destinations(PAPER_RSA)


_acceptance = []


def pytest_runtest_logreport(report):
    if report.when == "call" and "test_acceptance.py" in report.nodeid:
        _acceptance.append((report.nodeid.split("::")[-1], report.outcome))


def pytest_terminal_summary(terminalreporter):
    if not _acceptance:
        return
    terminalreporter.section("acceptance criteria")
    for name, outcome in _acceptance:
        terminalreporter.write_line(f"{'PASS' if outcome == 'passed' else 'FAIL'}  {name}")
