# tests/test_polygon.py
import logging
import math

import networkx as nx
import numpy as np
import pytest
from numpy.testing import assert_allclose

from stretch_metric.errors import DomainError, InconsistentPointError, InvalidArgumentError, NotConvexError
from stretch_metric.polygon import (
    PolygonPathSpace,
    PolygonShape,
    PolygonTriangulation,
    area_gradient,
    chart_coords,
    enumerate_triangulations,
    eta_avg,
    eta_chart,
    eta_sup,
    finsler_avg,
    finsler_sup,
    path_metric_search,
    path_metric_upper,
    shape_from_chart,
)
from stretch_metric.surface import SurfacePoint, edge_lengths, surface_area
from stretch_metric.triangle import TriCoords
from stretch_metric.triangle_space import eta

SQUARE = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
RECTANGLE = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 0.5], [0.0, 0.5]])


def _tangent(shape, rng):
    """Random area-preserving variation fixing vertex 0 and the direction of side (0, 1)."""
    v = rng.normal(size=shape.vertices.shape)
    v[0] = 0.0
    v[1, 1] = 0.0
    gradient = area_gradient(shape.vertices)
    gradient[0] = 0.0
    gradient[1, 1] = 0.0
    return v - np.sum(gradient * v) / np.sum(gradient * gradient) * gradient


def _heron(shape):
    a, b, c = shape.vertices
    ab, bc, ca = np.linalg.norm(b - a), np.linalg.norm(c - b), np.linalg.norm(a - c)
    return TriCoords((ab + ca - bc) / 2.0, (ab + bc - ca) / 2.0, (bc + ca - ab) / 2.0)


# ═══════════════════════════════════════════════════════════════════════════
# SHAPES
# ═══════════════════════════════════════════════════════════════════════════

def test_square_is_canonical():
    shape = PolygonShape(SQUARE)
    assert shape.n == 4


def test_shape_validation():
    with pytest.raises(DomainError):
        PolygonShape(SQUARE + 1.0)
    with pytest.raises(InconsistentPointError):
        PolygonShape(2.0 * SQUARE)
    with pytest.raises(NotConvexError):
        PolygonShape(np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.25], [0.5, 2.0]]))
    with pytest.raises(InvalidArgumentError):
        PolygonShape(np.zeros((2, 2)))


def test_from_vertices_reports_adjustment(caplog):
    with caplog.at_level(logging.WARNING, logger="stretch-metric.polygon"):
        shape, moved = PolygonShape.from_vertices((SQUARE * 3.0 + 5.0).tolist())
    assert_allclose(shape.vertices, SQUARE, atol=1e-14)
    assert moved > 1.0
    assert "canonical" in caplog.text
    _, unmoved = PolygonShape.from_vertices(SQUARE.tolist())
    assert unmoved == 0.0


def test_random_shapes_are_valid(rng):
    for n in range(3, 9):
        shape = PolygonShape.random(n, rng)
        assert shape.n == n


# ═══════════════════════════════════════════════════════════════════════════
# TRIANGULATIONS
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("n, count", [(3, 1), (4, 2), (5, 5), (6, 14), (7, 42), (8, 132)])
def test_catalan_counts(n, count):
    triangulations = enumerate_triangulations(n)
    assert len(triangulations) == count
    assert len(set(t.diagonals for t in triangulations)) == count


@pytest.mark.parametrize("n", [2, 13])
def test_enumeration_bounds(n):
    with pytest.raises(InvalidArgumentError):
        enumerate_triangulations(n)


def test_triangulation_validation():
    with pytest.raises(InvalidArgumentError):
        PolygonTriangulation(5, ((0, 2), (1, 3)))
    with pytest.raises(InvalidArgumentError):
        PolygonTriangulation(4, ((0, 1),))
    with pytest.raises(InvalidArgumentError):
        PolygonTriangulation(5, ((0, 2),))


def test_triangulation_edges():
    tri = PolygonTriangulation(5, ((0, 2), (0, 3)))
    assert tri.vertex_faces == ((0, 1, 2), (0, 2, 3), (0, 3, 4))
    assert tri.triangulation.edge_count == 7
    assert tri.triangulation.boundary == (True,) * 5 + (False,) * 2
    assert tri.edge_index(4, 0) == 4
    assert tri.edge_index(3, 0) == 6


@pytest.mark.parametrize("n", [4, 5, 6, 7])
def test_dual_graph_is_a_tree(n):
    for tri in enumerate_triangulations(n):
        graph = tri.dual_graph
        assert graph.number_of_nodes() == n - 2
        assert graph.number_of_edges() == n - 3
        assert nx.is_tree(graph)


# ═══════════════════════════════════════════════════════════════════════════
# CHARTS
# ═══════════════════════════════════════════════════════════════════════════

@pytest.mark.parametrize("tri", enumerate_triangulations(4))
def test_square_charts(tri):
    p = chart_coords(PolygonShape(SQUARE), tri)
    assert_allclose(edge_lengths(p), [1.0, 1.0, 1.0, 1.0, math.sqrt(2.0)], rtol=1e-14)
    assert surface_area(p) == pytest.approx(1.0, abs=1e-12)


def test_two_face_square_develops_to_square():
    tri = PolygonTriangulation(4, ((0, 2),))
    p = SurfacePoint.from_edge_lengths(tri.triangulation, [1.0, 1.0, 1.0, 1.0, math.sqrt(2.0)])
    assert_allclose(shape_from_chart(p, tri).vertices, SQUARE, atol=1e-12)


def test_regular_pentagon_fan_diagonals():
    tri = PolygonTriangulation(5, ((1, 3), (1, 4)))
    lengths = edge_lengths(chart_coords(PolygonShape.regular(5), tri))
    assert lengths[5] == pytest.approx(lengths[6], rel=1e-14)
    assert_allclose(lengths[:5], np.full(5, lengths[0]), rtol=1e-14)


def test_chart_round_trip(rng):
    for _ in range(1000):
        n = int(rng.integers(3, 8))
        shape = PolygonShape.random(n, rng)
        triangulations = enumerate_triangulations(n)
        tri = triangulations[int(rng.integers(len(triangulations)))]
        back = shape_from_chart(chart_coords(shape, tri), tri)
        assert np.max(np.abs(back.vertices - shape.vertices)) <= 1e-10


def test_reflex_chart_is_not_in_polygon_space():
    vertices = np.array([[0.0, 0.0], [2.0, 0.0], [2.0, 2.0], [1.0, 0.5]]) / math.sqrt(1.5)
    tri = PolygonTriangulation(4, ((1, 3),))
    d = lambda a, b: float(np.linalg.norm(vertices[a] - vertices[b]))  # noqa: E731
    lengths = [d(0, 1), d(1, 2), d(2, 3), d(3, 0), d(1, 3)]
    p = SurfacePoint.from_edge_lengths(tri.triangulation, lengths)
    with pytest.raises(NotConvexError):
        shape_from_chart(p, tri)


def test_chart_rejects_other_n():
    with pytest.raises(InvalidArgumentError):
        chart_coords(PolygonShape(SQUARE), enumerate_triangulations(5)[0])


# ═══════════════════════════════════════════════════════════════════════════
# DISTANCES
# ═══════════════════════════════════════════════════════════════════════════

def test_polygon_identity():
    X = PolygonShape(SQUARE)
    assert eta_sup(X, X) == 0.0
    assert eta_avg(X, X) == 0.0


def test_square_against_rectangle():
    X, Y = PolygonShape(SQUARE), PolygonShape(RECTANGLE)
    charts = [eta_chart(X, Y, tri) for tri in enumerate_triangulations(4)]
    assert eta_sup(X, Y) == pytest.approx(max(charts), rel=1e-14)
    assert eta_avg(X, Y) == pytest.approx(sum(charts) / 2.0, rel=1e-14)
    assert eta_avg(X, Y) <= eta_sup(X, Y)
    assert eta_sup(PolygonShape(RECTANGLE), PolygonShape(SQUARE)) > 0.0


def test_avg_below_sup(rng):
    for _ in range(50):
        X, Y = PolygonShape.random(6, rng), PolygonShape.random(6, rng)
        assert eta_avg(X, Y) <= eta_sup(X, Y)


def test_triangles_reduce_to_eta(rng):
    for _ in range(20):
        X, Y = PolygonShape.random(3, rng), PolygonShape.random(3, rng)
        assert eta_sup(X, Y) == pytest.approx(eta(_heron(X), _heron(Y)), rel=1e-12, abs=1e-14)
        assert eta_avg(X, Y) == eta_sup(X, Y)


def test_mismatched_sides():
    with pytest.raises(InvalidArgumentError):
        eta_sup(PolygonShape(SQUARE), PolygonShape.regular(5))


def test_polygon_triangle_inequality(rng):
    shapes = [PolygonShape.random(5, rng) for _ in range(6)]
    for X in shapes:
        for Y in shapes:
            for Z in shapes:
                assert eta_sup(X, Z) <= eta_sup(X, Y) + eta_sup(Y, Z) + 1e-10
                assert eta_avg(X, Z) <= eta_avg(X, Y) + eta_avg(Y, Z) + 1e-10


# ═══════════════════════════════════════════════════════════════════════════
# FINSLER STRUCTURES & PATH METRICS
# ═══════════════════════════════════════════════════════════════════════════

def test_zero_variation():
    X = PolygonShape(SQUARE)
    assert finsler_sup(X, np.zeros((4, 2))) == 0.0
    assert finsler_avg(X, np.zeros((4, 2))) == 0.0


def test_avg_norm_below_sup_norm(rng):
    for _ in range(30):
        X = PolygonShape.random(5, rng)
        v = _tangent(X, rng)
        assert finsler_avg(X, v) <= finsler_sup(X, v) + 1e-12
        assert finsler_sup(X, v) + finsler_sup(X, -v) > 0.0


def test_triangle_norms_coincide(rng):
    X = PolygonShape.random(3, rng)
    v = _tangent(X, rng)
    assert finsler_avg(X, v) == finsler_sup(X, v)


def test_variation_must_fix_pose(rng):
    X = PolygonShape(SQUARE)
    v = _tangent(X, rng)
    v[0, 0] = 1.0
    with pytest.raises(InvalidArgumentError):
        finsler_sup(X, v)


def test_path_metric_identity():
    X = PolygonShape.regular(5)
    assert path_metric_upper(X, X, waypoints=3, restarts=0) == pytest.approx(0.0, abs=1e-6)


def test_path_metric_on_triangles_is_eta(rng):
    X, Y = PolygonShape.random(3, rng), PolygonShape.random(3, rng)
    upper = path_metric_upper(X, Y, "sup", waypoints=4, restarts=0)
    assert upper == pytest.approx(eta(_heron(X), _heron(Y)), abs=1e-4)


@pytest.mark.parametrize("which, lower", [("sup", eta_sup), ("avg", eta_avg)])
def test_path_metric_bounds_chart_distance(which, lower):
    X, Y = PolygonShape(SQUARE), PolygonShape(RECTANGLE)
    result = path_metric_search(X, Y, which, waypoints=4, restarts=1, seed=2)
    assert result.upper_bound >= lower(X, Y) - 1e-6
    assert_allclose(result.path.waypoints[0], X.vertices.ravel(), atol=1e-12)
    assert_allclose(result.path.waypoints[-1], Y.vertices.ravel(), atol=1e-12)


def test_default_run_never_undercuts_chart_distance():
    rng = np.random.default_rng(2024)
    for _ in range(20):
        X, Y = PolygonShape.random(5, rng), PolygonShape.random(5, rng)
        assert path_metric_upper(X, Y, "sup", waypoints=3, restarts=0) >= eta_sup(X, Y) - 1e-6


def test_path_space_rejects_unknown_functional():
    with pytest.raises(InvalidArgumentError):
        PolygonPathSpace(4, "median")
