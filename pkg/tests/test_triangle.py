# tests/test_triangle.py
import logging
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stretch_metric.errors import DomainError, InvalidArgumentError
from stretch_metric.triangle import (
    BoxDims,
    EdgeLengths,
    TriCoords,
    box_lipschitz,
    coords_to_edges,
    edges_to_coords,
    heron_area,
    heron_area_gradient,
    normalize_unit_area,
)
from stretch_metric.triangle_space import eta

from .conftest import EQUILATERAL_UNIT


# ═══════════════════════════════════════════════════════════════════════════
# VALIDATION
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("edges", [(1.0, 2.0, 3.0), (1.0, 1.0, 5.0), (0.0, 1.0, 1.0), (-1.0, 2.0, 2.0)])
def test_invalid_edges(edges):
    with pytest.raises(DomainError):
        EdgeLengths(*edges)


@pytest.mark.parametrize("coords", [(0.0, 1.0, 1.0), (1.0, -2.0, 1.0), (math.nan, 1.0, 1.0), (math.inf, 1.0, 1.0)])
def test_invalid_coords(coords):
    with pytest.raises(DomainError):
        TriCoords(*coords)


def test_domain_error_is_value_error():
    with pytest.raises(ValueError):
        TriCoords(1.0, 1.0, 0.0)


# ═══════════════════════════════════════════════════════════════════════════
# AREA
# ═══════════════════════════════════════════════════════════════════════════

def test_heron_equilateral():
    assert heron_area(TriCoords(1.0, 1.0, 1.0)) == pytest.approx(math.sqrt(3.0), rel=1e-15)
    unit = TriCoords(EQUILATERAL_UNIT, EQUILATERAL_UNIT, EQUILATERAL_UNIT)
    assert heron_area(unit) == pytest.approx(1.0, abs=1e-12)


def test_heron_homogeneous_of_degree_two(rng):
    for _ in range(50):
        c = TriCoords.from_array(rng.uniform(0.1, 3.0, 3))
        assert heron_area(c.scaled(2.0)) == pytest.approx(4.0 * heron_area(c), rel=1e-14)


def test_heron_matches_edge_formula():
    # 3-4-5 right triangle
    c = edges_to_coords(EdgeLengths(3.0, 4.0, 5.0))
    assert heron_area(c) == pytest.approx(6.0, rel=1e-15)


def test_area_gradient_matches_finite_differences(rng):
    c = TriCoords.from_array(rng.uniform(0.5, 2.0, 3))
    squared = lambda a: (a[0] + a[1] + a[2]) * a[0] * a[1] * a[2]  # noqa: E731
    h = 1e-6
    numeric = [
        (squared(c.as_array() + h * e) - squared(c.as_array() - h * e)) / (2 * h) for e in np.eye(3)
    ]
    assert_allclose(heron_area_gradient(c), numeric, rtol=1e-8)


# ═══════════════════════════════════════════════════════════════════════════
# CONVERSIONS
# ═══════════════════════════════════════════════════════════════════════════

def test_edges_to_coords_345():
    assert edges_to_coords(EdgeLengths(3.0, 4.0, 5.0)).as_tuple() == (3.0, 2.0, 1.0)


def test_coords_to_edges_equilateral():
    assert coords_to_edges(TriCoords(1.0, 1.0, 1.0)).as_tuple() == (2.0, 2.0, 2.0)


def test_conversion_round_trip(rng):
    coords = rng.uniform(0.1, 1.0, (10_000, 3))
    for row in coords:
        c = TriCoords.from_array(row)
        back = edges_to_coords(coords_to_edges(c))
        assert_allclose(back.as_array(), row, rtol=1e-14)


# ═══════════════════════════════════════════════════════════════════════════
# NORMALIZATION
# ═══════════════════════════════════════════════════════════════════════════

def test_normalize_equilateral():
    unit, scale = normalize_unit_area(TriCoords(1.0, 1.0, 1.0))
    assert scale == pytest.approx(EQUILATERAL_UNIT, rel=1e-15)
    assert_allclose(unit.as_array(), [EQUILATERAL_UNIT] * 3, rtol=1e-15)


def test_normalize_fixed_point():
    unit = TriCoords(EQUILATERAL_UNIT, EQUILATERAL_UNIT, EQUILATERAL_UNIT)
    _, scale = normalize_unit_area(unit)
    assert scale == pytest.approx(1.0, abs=1e-12)


def test_normalize_scaling_law(rng):
    c = TriCoords.from_array(rng.uniform(0.2, 2.0, 3))
    unit, scale = normalize_unit_area(c)
    unit2, scale2 = normalize_unit_area(c.scaled(2.0))
    assert scale2 == pytest.approx(scale / 2.0, rel=1e-15)
    assert_allclose(unit2.as_array(), unit.as_array(), rtol=1e-14)


def test_normalize_warns_when_ill_conditioned(caplog):
    c = TriCoords(1e-13, 1.0, 1.0)
    assert c.ill_conditioned
    with caplog.at_level(logging.WARNING, logger="stretch-metric.triangle"):
        normalize_unit_area(c)
    assert "Near-degenerate" in caplog.text


# ═══════════════════════════════════════════════════════════════════════════
# BOXES
# ═══════════════════════════════════════════════════════════════════════════

def test_box_uniform_scaling():
    assert box_lipschitz(BoxDims.of([1, 1, 1]), BoxDims.of([2, 2, 2])) == pytest.approx(math.log(2.0))


def test_box_identity():
    box = BoxDims.of([0.5, 2.0, 7.0])
    assert box_lipschitz(box, box) == 0.0


def test_box_dimension_mismatch():
    with pytest.raises(InvalidArgumentError):
        box_lipschitz(BoxDims.of([1, 1]), BoxDims.of([1, 1, 1]))


def test_box_matches_eta(random_points):
    points = random_points(2000)
    for X, Y in zip(points[::2], points[1::2]):
        src, dst = BoxDims.of(X.as_array()), BoxDims.of(Y.as_array())
        assert box_lipschitz(src, dst) == eta(X, Y)
