import csv
import os

import pytest

FIXTURES = os.path.join(os.path.dirname(__file__), "fixtures")


@pytest.fixture
def fixture_rows():
    """Loader for the frozen oracle CSVs (all fields as strings)."""

    def load(name):
        with open(os.path.join(FIXTURES, name), newline="") as fh:
            return list(csv.DictReader(fh))

    return load


@pytest.fixture
def fixtures_dir():
    return FIXTURES


# one line per acceptance criterion, re-emitted after the run so the verdicts
# survive pytest's output capture
CRITERION_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if CRITERION_LINES:
        terminalreporter.section("acceptance criteria")
        for line in CRITERION_LINES:
            terminalreporter.write_line(line)
