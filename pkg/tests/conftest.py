import numpy as np
import pytest
from hypothesis import settings
from hypothesis import strategies as st

settings.register_profile("default", max_examples=60, deadline=None)
settings.load_profile("default")


@st.composite
def nonneg_lambdas(draw, min_size=1, max_size=8):
    """Non-negative eigenvalue lists, not necessarily normalized."""
    return draw(
        st.lists(
            st.floats(min_value=0.0, max_value=1.0, allow_nan=False, allow_subnormal=False),
            min_size=min_size,
            max_size=max_size,
        )
    )


@st.composite
def normalized_lambdas(draw, min_size=1, max_size=8):
    raw = draw(
        st.lists(st.floats(min_value=1e-3, max_value=1.0), min_size=min_size, max_size=max_size)
    )
    lam = np.sort(np.array(raw))[::-1]
    return lam / lam.sum()


@pytest.fixture
def rng():
    return np.random.default_rng(20061014)


ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
