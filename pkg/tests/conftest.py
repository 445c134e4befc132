"""Shared fixtures: moderately sampled curves reused across test modules."""

import numpy as np
import pytest

import curvepot as cp


@pytest.fixture(scope="session")
def circle512():
    return cp.circle_curve(-1.0, 1.0, 512)


@pytest.fixture(scope="session")
def circle1024():
    return cp.circle_curve(-1.0, 1.0, 1024)


@pytest.fixture(scope="session")
def square512():
    # unit square, vertices at samples since 512 is a multiple of 4
    return cp.polygon_curve([0.0, 1.0, 1.0 + 1.0j, 1.0j], 512)


@pytest.fixture(scope="session")
def ellipse512():
    return cp.ellipse_curve(1.5, 0.8, 512)


@pytest.fixture(scope="session")
def re_g():
    return cp.re_density()


@pytest.fixture(scope="session")
def holder_half():
    return cp.holder_density(0j, 0.5)


@pytest.fixture(scope="session")
def mu_id():
    return cp.make_majorant("power", alpha=1.0)


@pytest.fixture(scope="session")
def g3(mu_id):
    return cp.theorem3_density(mu_id)


def circle_points(n, radius=1.0, center=-1.0):
    angles = np.linspace(0.0, 2.0 * np.pi, n, endpoint=False)
    return center + radius * np.exp(1j * angles)
