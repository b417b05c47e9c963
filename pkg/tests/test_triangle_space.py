# tests/test_triangle_space.py
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stretch_metric.errors import DomainError, InvalidArgumentError
from stretch_metric.triangle import TriCoords
from stretch_metric.triangle_space import (
    TangentVector,
    TrianglePoint,
    d_max,
    eta,
    eta_family_arith,
    eta_family_max,
    finsler_family_arith,
    finsler_family_max,
    finsler_norm,
    geodesic,
    max_log_distance,
    triangle_metric,
    verify_geodesic,
    verify_log_dominance,
)
from stretch_metric.weak_metric import check_triangle_inequality, symmetrize_arith


def test_point_requires_unit_area():
    with pytest.raises(DomainError):
        TrianglePoint(TriCoords(1.0, 1.0, 1.0))


# ═══════════════════════════════════════════════════════════════════════════
# DISTANCE
# ═══════════════════════════════════════════════════════════════════════════

def test_asymmetry_witness(asymmetry_pair):
    X, Y = asymmetry_pair
    s = math.sqrt(3.0) / 2.0
    assert eta(X, Y) == pytest.approx(math.log(s), rel=1e-14)
    assert eta(X, Y) == pytest.approx(-0.14384, abs=5e-6)
    assert eta(Y, X) == pytest.approx(2.00998, abs=5e-6)


def test_eta_identity(equilateral):
    assert eta(equilateral, equilateral) == 0.0


def test_eta_equilateral_to_isoceles(equilateral, isoceles):
    expected = math.log(2.0 * (3.0 / 8.0) ** 0.25)
    assert eta(equilateral, isoceles) == pytest.approx(expected, rel=1e-12)
    assert eta(equilateral, isoceles) == pytest.approx(0.44794, abs=5e-6)


def test_weak_metric_axioms(random_points):
    points = random_points(40)
    for X, Y in zip(points[::2], points[1::2]):
        assert eta(X, Y) > 0.0
    assert check_triangle_inequality(triangle_metric(), points[:8]) is None


def test_family_endpoints(equilateral, isoceles):
    X, Y = equilateral, isoceles
    assert eta_family_arith(0.0, X, Y) == eta(X, Y)
    assert eta_family_arith(1.0, X, Y) == eta(Y, X)
    assert eta_family_max(0.0, X, Y) == eta(X, Y)
    assert eta_family_max(1.0, X, Y) == eta(Y, X)


def test_family_midpoints(random_points):
    points = random_points(20)
    arith = symmetrize_arith(triangle_metric())
    for X, Y in zip(points[::2], points[1::2]):
        assert eta_family_arith(0.5, X, Y) == pytest.approx(arith(X, Y), rel=1e-15)
        assert eta_family_max(0.5, X, Y) == pytest.approx(0.5 * d_max(X, Y), rel=1e-15)


@pytest.mark.parametrize("t", [-0.1, 1.5])
def test_family_rejects_t(equilateral, isoceles, t):
    with pytest.raises(InvalidArgumentError):
        eta_family_arith(t, equilateral, isoceles)
    with pytest.raises(InvalidArgumentError):
        eta_family_max(t, equilateral, isoceles)


def test_max_symmetrization_is_max_log_metric(random_points):
    points = random_points(400)
    for X, Y in zip(points[::2], points[1::2]):
        assert d_max(X, Y) == max_log_distance(X, Y)


# ═══════════════════════════════════════════════════════════════════════════
# GEODESICS
# ═══════════════════════════════════════════════════════════════════════════

def test_constant_geodesic(equilateral):
    samples = geodesic(equilateral, equilateral).samples(5)
    for _, p in samples:
        assert eta(equilateral, p) == pytest.approx(0.0, abs=1e-15)
    assert verify_geodesic(samples).is_geodesic


def test_geodesic_midpoint_additivity(equilateral, isoceles):
    path = geodesic(equilateral, isoceles)
    mid = path(0.5)
    total = eta(equilateral, isoceles)
    assert eta(equilateral, mid) + eta(mid, isoceles) == pytest.approx(total, abs=1e-10)


def test_reversed_geodesic_is_geodesic_backwards(equilateral, isoceles):
    path = geodesic(equilateral, isoceles).reversed()
    mid = path(0.5)
    total = eta(isoceles, equilateral)
    assert eta(isoceles, mid) + eta(mid, equilateral) == pytest.approx(total, abs=1e-10)


def test_geodesic_rejects_parameter(equilateral, isoceles):
    with pytest.raises(InvalidArgumentError):
        geodesic(equilateral, isoceles)(1.2)


def test_random_geodesics_are_additive(random_points):
    points = random_points(20)
    for X, Y in zip(points[::2], points[1::2]):
        samples = geodesic(X, Y).samples(12)
        verdict = verify_geodesic(samples)
        assert verdict.is_geodesic
        pts = [p for _, p in samples]
        for a in range(len(pts)):
            for b in range(a, len(pts)):
                for c in range(b, len(pts)):
                    lhs = eta(pts[a], pts[c])
                    assert lhs == pytest.approx(eta(pts[a], pts[b]) + eta(pts[b], pts[c]), abs=1e-9)


def test_dominance_index_for_isoceles(equilateral, isoceles):
    verdict = verify_geodesic(geodesic(equilateral, isoceles).samples(9))
    assert verdict.is_geodesic
    assert verdict.dominant_index == 2


def test_broken_path_is_rejected(equilateral):
    # grow A1 first, then A2: no single coordinate dominates throughout
    a = TrianglePoint.normalized((3.0, 1.0, 1.0))
    b = TrianglePoint.normalized((1.0, 3.0, 1.0))
    first = geodesic(equilateral, a).samples(6)
    second = geodesic(a, b).samples(6)[1:]
    samples = [(t / 2.0, p) for t, p in first] + [(0.5 + t / 2.0, p) for t, p in second]
    verdict = verify_geodesic(samples)
    assert not verdict.is_geodesic
    assert verdict.dominant_index is None
    assert set(verdict.witnesses) == {0, 1, 2}
    start, end = samples[0][1], samples[-1][1]
    mid = a
    assert eta(start, mid) + eta(mid, end) > eta(start, end) + 1e-6


def test_dominance_rejects_unsorted():
    with pytest.raises(InvalidArgumentError):
        verify_log_dominance([0.0, 1.0, 0.5], np.zeros((3, 3)))


def test_verify_accepts_raw_coordinates(equilateral, isoceles):
    path = geodesic(equilateral, isoceles)
    samples = [(t, path.raw(t)) for t in np.linspace(0.0, 1.0, 7)]
    assert verify_geodesic(samples).is_geodesic


# ═══════════════════════════════════════════════════════════════════════════
# FINSLER STRUCTURE
# ═══════════════════════════════════════════════════════════════════════════

def test_zero_vector_has_zero_norm(equilateral):
    assert finsler_norm(TangentVector(equilateral, (0.0, 0.0, 0.0))) == 0.0


def test_norm_of_completed_vector(equilateral):
    eps = 1e-3
    v = TangentVector.complete(equilateral, eps, eps)
    assert v.v[2] < 0.0
    assert finsler_norm(v) == pytest.approx(eps / equilateral.coords.A1, rel=1e-12)


def test_non_tangent_vector_is_rejected(equilateral):
    with pytest.raises(InvalidArgumentError):
        TangentVector(equilateral, (1.0, 1.0, 1.0))


def test_norm_is_positive_in_one_direction(rng, random_points):
    for X in random_points(50):
        v = TangentVector.project(X, rng.normal(size=3))
        assert finsler_norm(v) + finsler_norm(-v) > 0.0
        assert finsler_norm(v) >= 0.0


def test_norm_is_positive_on_nonzero_vectors(rng, random_points):
    for X in random_points(50):
        v = TangentVector.project(X, rng.normal(size=3))
        assert np.any(v.as_array() != 0.0)
        assert finsler_norm(v) > 0.0
        assert finsler_norm(-v) > 0.0
    assert finsler_norm(TangentVector.project(X, np.zeros(3))) == 0.0


def test_norm_is_positively_homogeneous(rng, equilateral):
    v = TangentVector.project(equilateral, rng.normal(size=3))
    assert finsler_norm(v.scaled(3.0)) == pytest.approx(3.0 * finsler_norm(v), rel=1e-14)


def test_finsler_families(rng, equilateral):
    v = TangentVector.project(equilateral, rng.normal(size=3))
    assert finsler_family_arith(0.0, v) == finsler_norm(v)
    assert finsler_family_arith(0.5, v) == pytest.approx(finsler_family_arith(0.5, -v), rel=1e-15)
    t = 0.3
    assert finsler_family_arith(t, v) == pytest.approx((1 - t) * finsler_norm(v) + t * finsler_norm(-v))
    assert finsler_family_max(t, v) == max((1 - t) * finsler_norm(v), t * finsler_norm(-v))
    with pytest.raises(InvalidArgumentError):
        finsler_family_arith(2.0, v)


def test_integrated_norm_along_geodesic_matches_distance(equilateral, isoceles):
    path = geodesic(equilateral, isoceles)
    steps, h = 1000, 1e-7
    total = 0.0
    for t in (np.arange(steps) + 0.5) / steps:
        velocity = (path(t + h).as_array() - path(t - h).as_array()) / (2 * h)
        v = TangentVector.project(path(t), velocity)
        assert_allclose(v.as_array(), velocity, atol=1e-7)
        total += finsler_norm(v) / steps
    assert total == pytest.approx(eta(equilateral, isoceles), abs=1e-6)
