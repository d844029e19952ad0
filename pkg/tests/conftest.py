import math
import os
import sys

import numpy as np
import pytest

sys.path.insert(0, os.path.dirname(__file__))

from jamrx import SystemParams  # noqa: E402
from jamrx.model import derive_rng  # noqa: E402

FIVE_DB = 10 ** 0.5

# filled by test_acceptance; printed once at the end of the session
ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return derive_rng(12345, 0)


@pytest.fixture
def operating_params():
    """Operating point used for the antenna sweep: tau=3, T=200, unit fadings, 5 dB powers."""
    return SystemParams(M=100, tau=3, T=200, p_t=FIVE_DB, p_d=FIVE_DB, q_t=FIVE_DB,
                        q_d=FIVE_DB, beta_u=1.0, beta_j=1.0)


@pytest.fixture
def equal_corr():
    return math.sqrt(1 / 3)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
