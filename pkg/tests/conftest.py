import math

import numpy as np
import pytest
from hypothesis import HealthCheck, settings

from bfcalc.random_gen import random_normal_matrix, random_triple, rng

settings.register_profile(
    "bfcalc", deadline=None, max_examples=25, derandomize=True,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("bfcalc")


@pytest.fixture
def gen():
    return rng(12345)


def triple_from_seed(seed):
    return random_triple(rng(seed))


def normal_from_seed(seed, n=3, angle=math.pi / 3):
    return random_normal_matrix(rng(seed), n, angle)


def close(a, b, rtol=1e-12, atol=0.0):
    return np.allclose(a, b, rtol=rtol, atol=atol)


#: one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
