import math

import numpy as np
import pytest

from bilayer_gn import PeriodicGrid, RegimeParams, default_scenario


@pytest.fixture
def rng():
    return np.random.default_rng(20261019)


@pytest.fixture
def grid2pi():
    return PeriodicGrid(2 * np.pi, 256)


@pytest.fixture
def gaussian_scenario():
    """Interface bump (amp 1, width L/20) over a bottom bump (height 0.5), mu=0.04, eps=beta=0.2."""
    return default_scenario()


def random_ch_params(rng, n):
    """``n`` random parameter tuples inside the Camassa-Holm set with default bounds."""
    out = []
    while len(out) < n:
        mu = rng.uniform(0.005, 1.0)
        root = math.sqrt(mu)
        delta = math.exp(rng.uniform(math.log(0.11), math.log(9.9)))
        gamma = rng.uniform(0.0, 0.99)
        lam = (1 + gamma * delta) / (3 * delta * (gamma + delta))
        bo_inv = rng.choice([0.0, rng.uniform(0.0, max(lam - 2e-3, 0.0))])
        p = RegimeParams(
            mu=mu,
            eps=rng.uniform(0, min(1.0, root)),
            delta=delta,
            gamma=gamma,
            beta=rng.uniform(0, min(1.0, root)),
            bo_inv=bo_inv,
        )
        if p.nu >= p.nu0:
            out.append(p)
    return out


ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
