import os
import sys

import pytest

# the oracle helpers live next to the tests
sys.path.insert(0, os.path.dirname(__file__))

_acceptance = pytest.StashKey[list]()


@pytest.fixture
def acceptance_log(request):
    """Collects one summary line per acceptance criterion for the terminal report."""
    return request.config.stash.setdefault(_acceptance, [])


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_acceptance, [])
    if lines:
        terminalreporter.write_sep("=", "acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
