import warnings

import numpy as np
import pytest
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from gph.propagator import gaussian_ic, soliton_ic
from gph.spectral import make_grid, normalize

settings.register_profile("gph", deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("gph")


def unit_soliton(grid, eta=0.5, velocity=0.0, x0=0.0):
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        return normalize(soliton_ic(grid, eta, velocity, x0))


@pytest.fixture(scope="session")
def grid256():
    return make_grid(256, 20.0)


@pytest.fixture(scope="session")
def grid512():
    return make_grid(512, 20.0)


@pytest.fixture(scope="session")
def gauss256(grid256):
    return gaussian_ic(grid256)


@pytest.fixture(scope="session")
def sol256(grid256):
    return unit_soliton(grid256)


# smooth, decaying packets: centre, width, drift, amplitude
packets = st.tuples(
    st.floats(-3.0, 3.0),
    st.floats(0.7, 2.0),
    st.floats(-1.5, 1.5),
    st.floats(0.2, 2.0),
)


def packet_field(grid, params):
    c, w, v, a = params
    return gaussian_ic(grid, center=c, width=w, velocity=v, amplitude=a)


def rng_for(seed):
    return np.random.default_rng(seed)


# one line per acceptance criterion, echoed after the run even when output is captured
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split()[2].rstrip(":"))):
            terminalreporter.write_line(line)
