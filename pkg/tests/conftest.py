import os
import sys

import pytest

sys.path.insert(0, os.path.dirname(__file__))

from feynmat.fixtures import load_fixture, load_matrix  # noqa: E402

ACCEPTANCE_LINES: list[str] = []


@pytest.fixture(scope="session")
def dunce():
    return load_fixture("dunce_cap")


@pytest.fixture(scope="session")
def big():
    return load_fixture("big_example")


@pytest.fixture(scope="session")
def k33():
    return load_fixture("k33")


@pytest.fixture(scope="session")
def dunce_matrix():
    return load_matrix("dunce_cap")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[1].rstrip(":"))):
            terminalreporter.write_line(line)
