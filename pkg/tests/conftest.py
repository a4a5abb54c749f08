import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from betadyson.partitions import Partition, partitions_of
from betadyson.symmpoly import SymPoly

settings.register_profile("default", deadline=None, max_examples=40,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")

THETAS = (0.5, 1.0, 2.0, 1.85)


@st.composite
def partitions(draw, max_weight=6, max_length=None):
    n = draw(st.integers(0, max_weight))
    choices = partitions_of(n, max_length=max_length)
    return draw(st.sampled_from(choices))


@st.composite
def sympolys(draw, k=None, max_degree=6, max_terms=5):
    k = draw(st.integers(1, 4)) if k is None else k
    n_terms = draw(st.integers(1, max_terms))
    coeffs = {}
    for _ in range(n_terms):
        mu = draw(partitions(max_degree, k))
        coeffs[mu] = draw(st.floats(-2, 2, allow_nan=False).filter(lambda c: abs(c) > 1e-3))
    return SymPoly(k, coeffs)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def close(a, b, rtol=1e-10, atol=1e-12):
    return abs(a - b) <= atol + rtol * max(abs(a), abs(b))


def P(*parts):
    return Partition(parts)


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
