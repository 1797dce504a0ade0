import math

import numpy as np
import pytest

from spheretail import Bessel, ChiSquare, FDist, LogNormal, PointConfiguration


def equicorrelated(n_points, rho):
    corr = np.full((n_points, n_points), rho)
    np.fill_diagonal(corr, 1.0)
    return corr


@pytest.fixture(scope="session")
def benchmark_config():
    """Three points at pairwise correlation 1/4 in three dimensions."""
    return PointConfiguration.from_correlation(equicorrelated(3, 0.25))


@pytest.fixture(scope="session")
def pair_config():
    """Two points at correlation 1/4 (ambient dimension 2)."""
    return PointConfiguration.from_correlation(equicorrelated(2, 0.25))


@pytest.fixture(scope="session")
def t_law():
    return FDist(3.0, 3.0)


@pytest.fixture(scope="session")
def gauss_law():
    return ChiSquare(3.0)


@pytest.fixture(scope="session")
def lognormal_law():
    return LogNormal(scale=3.0 * math.exp(-0.5))


@pytest.fixture(scope="session")
def bessel_law():
    return Bessel(3.0, 4.0, scale=0.25)
