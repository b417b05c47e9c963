# tests/conftest.py
import math

import numpy as np
import pytest

from stretch_metric.triangle import TriCoords
from stretch_metric.triangle_space import TrianglePoint, random_point

EQUILATERAL_UNIT = 3.0 ** -0.25


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


@pytest.fixture
def equilateral():
    return TrianglePoint(TriCoords(EQUILATERAL_UNIT, EQUILATERAL_UNIT, EQUILATERAL_UNIT))


@pytest.fixture
def isoceles():
    """normalize(1, 1, 2)."""
    return TrianglePoint.normalized((1.0, 1.0, 2.0))


@pytest.fixture
def asymmetry_pair():
    """The raw pair (1,1,1), (s,s,1-s) with s = sqrt(3)/2."""
    s = math.sqrt(3.0) / 2.0
    return TriCoords(1.0, 1.0, 1.0), TriCoords(s, s, 1.0 - s)


@pytest.fixture
def random_points(rng):
    def make(count, spread=1.0):
        return [random_point(rng, spread) for _ in range(count)]
    return make
