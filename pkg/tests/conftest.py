import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from nkcross.cross import CrossSpec  # noqa: E402
from nkcross.geometry import unit_interval_pair  # noqa: E402
from nkcross.scene import load_scene  # noqa: E402

# acceptance lines collected by test_acceptance.py, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


@pytest.fixture(scope="session")
def interval_pair():
    return unit_interval_pair()


@pytest.fixture(scope="session")
def x32(interval_pair):
    return CrossSpec((interval_pair,) * 3, 2, "X")


@pytest.fixture(scope="session")
def t_scene():
    return load_scene("builtin:three-intervals-T")


@pytest.fixture(scope="session")
def y_scene():
    return load_scene("builtin:three-intervals-Y")


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
