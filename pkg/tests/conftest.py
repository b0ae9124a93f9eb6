import os
import sys

import pytest

from mldd.syntax import parse

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))


@pytest.fixture
def P():
    return parse


def pytest_report_header(config):
    from mldd import _kernels
    return f"mldd kernel backend: {_kernels.BACKEND}"


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
