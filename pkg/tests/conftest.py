import pytest

from choiceprinciples.choice import ALL_TYPES
from choiceprinciples.metagame import build_metagame_exact

# Lines appended by test_acceptance.py; printed once at the end of the run.
ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def exact_full():
    return build_metagame_exact(ALL_TYPES, 10)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
