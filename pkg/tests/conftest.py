import math

import numpy as np
import pytest

from rissteer import ArrayGeometry, Direction, PlaneWave, golden_table
from rissteer.unitcell import GOLDEN_FREQUENCY_HZ

F0 = GOLDEN_FREQUENCY_HZ
PITCH = 1.125e-3


@pytest.fixture(scope="session")
def table():
    return golden_table()


@pytest.fixture(scope="session")
def golden_geometry():
    return ArrayGeometry(60, 60, PITCH)


@pytest.fixture(scope="session")
def golden_feed():
    return PlaneWave(Direction.from_degrees(30.0, 0.0))


@pytest.fixture(scope="session")
def broadside():
    return Direction(0.0, 0.0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


def wavelength(f=F0):
    return 299792458.0 / f


def rad(deg):
    return math.radians(deg)


# Acceptance criteria register their outcome here; printed after the run.
ACCEPTANCE = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, text = ACCEPTANCE[n]
        terminalreporter.write_line(f"[{'PASS' if ok else 'FAIL'}] {n}. {text}")
