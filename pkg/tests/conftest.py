import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    from fixsum.simplex_core import make_rng

    return make_rng(12345)


@pytest.fixture
def golden_dir():
    return Path(__file__).parent / "golden"


def record_acceptance(line):
    ACCEPTANCE_LINES.append(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)


def random_simplex_point(rng, n):
    e = rng.exponential(size=n)
    return e / e.sum()


np.set_printoptions(precision=12)
