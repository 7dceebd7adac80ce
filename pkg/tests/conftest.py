import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from prmdistill import css


@pytest.fixture(scope="session")
def code15():
    return css.build_code(4, 1, 0)


@pytest.fixture(scope="session")
def code26():
    return css.build_code(5, 2, 1)


def pytest_terminal_summary(terminalreporter):
    try:
        from test_acceptance import REPORT
    except ImportError:
        return
    if not REPORT:
        return
    terminalreporter.section("acceptance criteria")
    for name in sorted(REPORT):
        terminalreporter.write_line(f"{REPORT[name]:<16} {name}")
