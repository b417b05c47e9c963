# tests/test_finsler_paths.py
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from stretch_metric.errors import InvalidArgumentError, NumericalFailureError
from stretch_metric.finsler_paths import (
    DiscretePath,
    ParamPath,
    SurfacePathSpace,
    TrianglePathSpace,
    embed_path,
    minimize_length,
    path_length,
    refinement_schedule,
)
from stretch_metric.polygon import PolygonPathSpace, PolygonShape
from stretch_metric.surface import (
    SurfacePoint,
    eta_T,
    geodesic_T,
    normalize_unit_area,
    quadrangle_triangulation,
)
from stretch_metric.triangle_space import TrianglePoint, eta, geodesic


def _geodesic_path(X, Y):
    path = geodesic(X, Y)
    return ParamPath(lambda t: path(t).as_array())


def _quadrangle_point(lengths):
    unit, _ = normalize_unit_area(SurfacePoint.from_edge_lengths(quadrangle_triangulation(), lengths))
    return unit


# ═══════════════════════════════════════════════════════════════════════════
# PATH LENGTH
# ═══════════════════════════════════════════════════════════════════════════

def test_breakpoints_must_be_sorted_inside():
    with pytest.raises(InvalidArgumentError):
        ParamPath(lambda t: np.array([t]), (0.6, 0.4))
    with pytest.raises(InvalidArgumentError):
        ParamPath(lambda t: np.array([t]), (1.0,))


def test_pieces_follow_breakpoints():
    path = ParamPath(lambda t: np.array([t]), (0.25, 0.5))
    assert path.pieces() == [(0.0, 0.25), (0.25, 0.5), (0.5, 1.0)]
    assert path.smoothness == "piecewise"


def test_geodesic_length_equals_eta(equilateral, isoceles):
    F = TrianglePathSpace().finsler
    assert path_length(F, _geodesic_path(equilateral, isoceles)) == pytest.approx(
        eta(equilateral, isoceles), abs=1e-6
    )
    assert path_length(F, _geodesic_path(isoceles, equilateral)) == pytest.approx(
        eta(isoceles, equilateral), abs=1e-6
    )


def test_constant_path_has_zero_length(equilateral):
    F = TrianglePathSpace().finsler
    assert path_length(F, ParamPath(lambda t: equilateral.as_array())) == pytest.approx(0.0, abs=1e-9)


def test_length_is_invariant_under_reparametrization(equilateral, isoceles):
    F = TrianglePathSpace().finsler
    path = geodesic(equilateral, isoceles)
    tol = 1e-6
    straight = path_length(F, ParamPath(lambda t: path(t).as_array()), tol)
    squared = path_length(F, ParamPath(lambda t: path(t * t).as_array()), tol)
    assert squared == pytest.approx(straight, abs=2 * tol)


def test_detoured_paths_are_not_shorter(rng, random_points):
    F = TrianglePathSpace().finsler
    points = random_points(10)
    for X, Y in zip(points[::2], points[1::2]):
        w = rng.normal(size=3)
        x, y = X.as_array(), Y.as_array()

        def detour(t, w=w, x=x, y=y):
            raw = x ** (1.0 - t) * y ** t * np.exp(math.sin(math.pi * t) * w)
            return TrianglePoint.normalized(raw).as_array()

        assert path_length(F, ParamPath(detour)) >= eta(X, Y) - 1e-6


def test_surface_geodesic_length_equals_eta_T():
    p = _quadrangle_point([1.2, 1.0, 0.9, 1.1, 0.8])
    q = _quadrangle_point([0.9, 1.0, 1.1, 0.8, 1.0])
    path = geodesic_T(p, q)
    F = SurfacePathSpace(quadrangle_triangulation()).finsler
    length = path_length(F, ParamPath(lambda t: path(t).flat()))
    assert length == pytest.approx(eta_T(p, q), abs=1e-6)


def test_quadrature_failure_reports_partial_sum():
    F = lambda x, v: float(np.sin(40.0 * x[0]))  # noqa: E731
    with pytest.raises(NumericalFailureError) as raised:
        path_length(F, ParamPath(lambda t: np.array([t])), tol=1e-14, limit=1)
    assert raised.value.partial_estimate is not None
    assert raised.value.error_estimate > 0.0


def test_nonpositive_tolerance():
    with pytest.raises(InvalidArgumentError):
        path_length(lambda x, v: 0.0, ParamPath(lambda t: np.array([t])), tol=0.0)


# ═══════════════════════════════════════════════════════════════════════════
# MINIMIZATION
# ═══════════════════════════════════════════════════════════════════════════

def test_discrete_path_needs_two_waypoints(equilateral):
    with pytest.raises(InvalidArgumentError):
        DiscretePath(TrianglePathSpace(), (equilateral.as_array(),))


def test_minimized_triangle_length_is_eta(equilateral, isoceles):
    result = minimize_length(TrianglePathSpace(), equilateral.as_array(), isoceles.as_array(),
                             waypoints=5, restarts=1, seed=3)
    assert result.upper_bound == pytest.approx(eta(equilateral, isoceles), abs=1e-4)
    assert eta(equilateral, isoceles) - 1e-12 <= result.chord_length <= eta(equilateral, isoceles) + 1e-4
    assert result.restarts == 2
    assert not result.infeasible_initial


def test_minimized_constant_path(equilateral):
    x = equilateral.as_array()
    result = minimize_length(TrianglePathSpace(), x, x, waypoints=3, restarts=0)
    assert result.upper_bound == pytest.approx(0.0, abs=1e-6)


@pytest.mark.parametrize("k, schedule", [(2, [2]), (3, [3]), (5, [2, 5]), (6, [3, 6]), (10, [2, 5, 10])])
def test_refinement_schedule(k, schedule):
    assert refinement_schedule(k) == schedule


def test_embedded_path_keeps_the_curve(equilateral, isoceles):
    space = TrianglePathSpace()
    coarse = [equilateral.as_array(), space.interpolate(equilateral.as_array(), isoceles.as_array(), 0.3),
              isoceles.as_array()]
    fine = embed_path(space, coarse, 6)
    assert len(fine) == 6
    assert_allclose(fine[0], coarse[0])
    assert_allclose(fine[-1], coarse[-1])
    assert any(np.allclose(p, coarse[1]) for p in fine)
    with pytest.raises(InvalidArgumentError):
        embed_path(space, coarse, 2)


def _refinement_cases():
    rng = np.random.default_rng(8)
    X, Y = PolygonShape.random(5, rng), PolygonShape.random(5, rng)
    return [
        pytest.param(TrianglePathSpace, lambda: (TrianglePoint.normalized((1.0, 1.0, 1.0)).as_array(),
                                                 TrianglePoint.normalized((1.0, 1.0, 2.0)).as_array()),
                     id="triangle"),
        pytest.param(lambda: SurfacePathSpace(quadrangle_triangulation()),
                     lambda: (_quadrangle_point([1.2, 1.0, 0.9, 1.1, 0.8]).flat(),
                              _quadrangle_point([0.9, 1.0, 1.1, 0.8, 1.0]).flat()),
                     id="surface"),
        pytest.param(lambda: PolygonPathSpace(5), lambda: (X.vertices.ravel(), Y.vertices.ravel()),
                     id="polygon"),
    ]


@pytest.mark.parametrize("make_space, endpoints", _refinement_cases())
def test_doubling_waypoints_does_not_lengthen(make_space, endpoints):
    space = make_space()
    x, y = endpoints()
    coarse = minimize_length(space, x, y, waypoints=3, restarts=0, max_sweeps=4)
    fine = minimize_length(space, x, y, waypoints=6, restarts=0, max_sweeps=4)
    assert fine.levels == (3, 6)
    assert fine.upper_bound <= coarse.upper_bound + 1e-9
    assert len(fine.path.waypoints) in (3, 6)


def test_minimize_is_deterministic(equilateral, isoceles):
    space = TrianglePathSpace()
    x, y = equilateral.as_array(), isoceles.as_array()
    a = minimize_length(space, x, y, waypoints=4, restarts=2, seed=11)
    b = minimize_length(space, x, y, waypoints=4, restarts=2, seed=11, workers=3)
    assert a.upper_bound == b.upper_bound
    assert a.best_restart == b.best_restart


def test_minimized_surface_length():
    tri = quadrangle_triangulation()
    p = _quadrangle_point([1.2, 1.0, 0.9, 1.1, 0.8])
    q = _quadrangle_point([0.9, 1.0, 1.1, 0.8, 1.0])
    result = minimize_length(SurfacePathSpace(tri), p.flat(), q.flat(), waypoints=3, restarts=0)
    assert result.upper_bound == pytest.approx(eta_T(p, q), abs=1e-4)


@pytest.mark.parametrize("kwargs", [{"waypoints": 1}, {"restarts": -1}])
def test_minimize_rejects_arguments(equilateral, kwargs):
    x = equilateral.as_array()
    with pytest.raises(InvalidArgumentError):
        minimize_length(TrianglePathSpace(), x, x, **kwargs)
