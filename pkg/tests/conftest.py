import numpy as np
import pytest

from bdirs.channel import ChannelParams, Geometry, make_channels, sample_geometry
from bdirs.objective import LinkObjective, noise_power

NOISE_W = noise_power(-174.0, 1e6)

_acceptance_lines = []


@pytest.fixture
def report():
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    def _report(name, ok, detail=""):
        _acceptance_lines.append(f"{'PASS' if ok else 'FAIL'}  {name}  {detail}".rstrip())
        print(_acceptance_lines[-1])
    return _report


def pytest_terminal_summary(terminalreporter):
    if _acceptance_lines:
        terminalreporter.section("acceptance criteria")
        for line in _acceptance_lines:
            terminalreporter.write_line(line)


def link(seed, n=16, m=16, **geom):
    prm = sample_geometry(seed, Geometry(**geom), ChannelParams(n_bs=n, m_irs=m))
    return LinkObjective(make_channels(prm), NOISE_W)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
