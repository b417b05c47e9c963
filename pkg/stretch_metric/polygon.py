# stretch_metric/polygon.py
"""
Polygon Space
=============
Unit-area strictly convex n-gons with labelled vertices, seen through
every triangulation of the n-gon at once.

A shape is stored in canonical pose: vertex 0 at the origin, vertex 1
on the positive x-axis, vertices counterclockwise. Each triangulation
gives a chart into surface coordinates on the disc; the max and the
mean over charts define the distances eta_sup and eta_avg and their
infinitesimal versions finsler_sup and finsler_avg.

Edge indexing of a triangulation: boundary side (k, k+1) is edge k,
diagonals follow in sorted order. A face (a, b, c), a < b < c, has
edge triple (bc, ca, ab) so that slot p sits at vertex p of the face.
"""

import itertools
import logging
import math
from dataclasses import dataclass, field
from functools import cached_property, lru_cache
from typing import Dict, List, Literal, Optional, Sequence, Tuple

import networkx as nx
import numpy as np

from .errors import DomainError, InconsistentPointError, InvalidArgumentError, NotConvexError
from .finsler_paths import MinimizationResult, PathSpace, minimize_length
from .settings import get_default, get_tolerance
from .surface import SurfacePoint, Triangulation, edge_lengths, eta_T, geodesic_T

logger = logging.getLogger("stretch-metric.polygon")

Which = Literal["sup", "avg"]


# ═══════════════════════════════════════════════════════════════════════════
# SHAPES
# ═══════════════════════════════════════════════════════════════════════════

def shoelace_area(vertices: np.ndarray) -> float:
    x, y = vertices[:, 0], vertices[:, 1]
    return float(0.5 * np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def turn_crosses(vertices: np.ndarray) -> np.ndarray:
    """Cross product of consecutive edge vectors at every vertex."""
    edges = np.roll(vertices, -1, axis=0) - vertices
    following = np.roll(edges, -1, axis=0)
    return edges[:, 0] * following[:, 1] - edges[:, 1] * following[:, 0]


def canonical_pose(vertices: np.ndarray) -> np.ndarray:
    """Translate vertex 0 to the origin, rotate vertex 1 onto +x, scale to unit area."""
    v = np.array(vertices, dtype=float)
    if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
        raise InvalidArgumentError(f"Expected an (n, 2) vertex array with n >= 3, got shape {v.shape}")
    if not np.all(np.isfinite(v)):
        raise DomainError("Vertices must be finite")
    v = v - v[0]
    angle = math.atan2(v[1, 1], v[1, 0])
    c, s = math.cos(angle), math.sin(angle)
    v = v @ np.array([[c, -s], [s, c]])
    v[0] = 0.0
    v[1, 1] = 0.0
    area = shoelace_area(v)
    if area <= 0.0:
        raise DomainError(f"Vertices must be counterclockwise with positive area, got area {area!r}")
    return v * area ** -0.5


@dataclass(frozen=True)
class PolygonShape:
    vertices: np.ndarray
    tolerance: float = field(default=0.0, compare=False)

    def __post_init__(self):
        v = np.array(self.vertices, dtype=float)
        if v.ndim != 2 or v.shape[1] != 2 or v.shape[0] < 3:
            raise InvalidArgumentError(f"Expected an (n, 2) vertex array with n >= 3, got shape {v.shape}")
        tolerance = self.tolerance or get_tolerance("area")
        if np.any(np.abs(v[0]) > 1e-12) or abs(v[1, 1]) > 1e-12 or v[1, 0] <= 0.0:
            raise DomainError("Shape is not in canonical pose")
        if np.any(turn_crosses(v) <= get_tolerance("convexity")):
            raise NotConvexError("Polygon is not strictly convex and counterclockwise")
        area = shoelace_area(v)
        if abs(area - 1.0) > tolerance:
            raise InconsistentPointError(f"Polygon area {area!r} differs from 1")
        v.setflags(write=False)
        object.__setattr__(self, "vertices", v)
        object.__setattr__(self, "tolerance", tolerance)

    def __eq__(self, other) -> bool:
        if not isinstance(other, PolygonShape):
            return NotImplemented
        return np.array_equal(self.vertices, other.vertices)

    @property
    def n(self) -> int:
        return self.vertices.shape[0]

    @classmethod
    def from_vertices(cls, vertices: Sequence[Sequence[float]]) -> Tuple["PolygonShape", float]:
        """Canonicalize arbitrary counterclockwise vertices; also return the largest vertex move."""
        raw = np.array(vertices, dtype=float)
        canonical = canonical_pose(raw)
        adjustment = float(np.max(np.abs(canonical - raw)))
        if adjustment > get_tolerance("polygon_adjust_warning"):
            logger.warning(f"Polygon input moved by {adjustment:.3e} into canonical unit-area pose")
        return cls(canonical), adjustment

    @classmethod
    def regular(cls, n: int) -> "PolygonShape":
        angles = 2.0 * np.pi * np.arange(n) / n
        return cls(canonical_pose(np.column_stack([np.cos(angles), np.sin(angles)])))

    @classmethod
    def random(cls, n: int, rng: np.random.Generator, max_tries: int = 10_000) -> "PolygonShape":
        """
        Sorted random angles on a random-aspect ellipse, rejecting shapes with
        an interior angle within 1e-3 of pi or a very short side.
        """
        for _ in range(max_tries):
            aspect = rng.uniform(0.5, 2.0)
            angles = np.sort(rng.uniform(0.0, 2.0 * np.pi, n))
            v = np.column_stack([np.cos(angles), aspect * np.sin(angles)])
            edges = np.roll(v, -1, axis=0) - v
            lengths = np.linalg.norm(edges, axis=1)
            following = np.roll(edges, -1, axis=0)
            turning = np.arctan2(turn_crosses(v), np.sum(edges * following, axis=1))
            if np.min(turning) < 1e-3 or np.min(lengths) < 0.05 * np.mean(lengths):
                continue
            return cls(canonical_pose(v))
        raise InvalidArgumentError(f"No admissible random {n}-gon after {max_tries} draws")


def _distances(vertices: np.ndarray) -> np.ndarray:
    diff = vertices[:, None, :] - vertices[None, :, :]
    return np.sqrt(np.sum(diff * diff, axis=-1))


# ═══════════════════════════════════════════════════════════════════════════
# TRIANGULATIONS
# ═══════════════════════════════════════════════════════════════════════════

def _crosses(d: Tuple[int, int], e: Tuple[int, int]) -> bool:
    (a, b), (c, f) = d, e
    return a < c < b < f or c < a < f < b


@dataclass(frozen=True)
class PolygonTriangulation:
    n: int
    diagonals: Tuple[Tuple[int, int], ...]

    def __post_init__(self):
        diagonals = tuple(sorted(tuple(sorted(d)) for d in self.diagonals))
        if len(diagonals) != self.n - 3:
            raise InvalidArgumentError(f"An {self.n}-gon triangulation has {self.n - 3} diagonals, got {len(diagonals)}")
        for a, b in diagonals:
            if not 0 <= a < b < self.n or b - a in (1, self.n - 1):
                raise InvalidArgumentError(f"({a}, {b}) is not a diagonal of the {self.n}-gon")
        for d, e in itertools.combinations(diagonals, 2):
            if d == e or _crosses(d, e):
                raise InvalidArgumentError(f"Diagonals {d} and {e} cross or repeat")
        object.__setattr__(self, "diagonals", diagonals)

    def edge_index(self, a: int, b: int) -> int:
        a, b = min(a, b), max(a, b)
        if b == a + 1:
            return a
        if (a, b) == (0, self.n - 1):
            return self.n - 1
        return self.n + self.diagonals.index((a, b))

    @cached_property
    def vertex_faces(self) -> Tuple[Tuple[int, int, int], ...]:
        sides = {(k, k + 1) for k in range(self.n - 1)} | {(0, self.n - 1)} | set(self.diagonals)
        return tuple(
            (a, b, c) for a, b, c in itertools.combinations(range(self.n), 3)
            if (a, b) in sides and (b, c) in sides and (a, c) in sides
        )

    @cached_property
    def triangulation(self) -> Triangulation:
        faces = [
            (self.edge_index(b, c), self.edge_index(c, a), self.edge_index(a, b))
            for a, b, c in self.vertex_faces
        ]
        boundary = [True] * self.n + [False] * len(self.diagonals)
        return Triangulation.build(2 * self.n - 3, faces, boundary)

    @cached_property
    def dual_graph(self) -> nx.Graph:
        """Faces as nodes, joined when they share a diagonal."""
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self.vertex_faces)))
        for f, g in itertools.combinations(range(len(self.vertex_faces)), 2):
            if len(set(self.vertex_faces[f]) & set(self.vertex_faces[g])) == 2:
                graph.add_edge(f, g)
        return graph


@lru_cache(maxsize=None)
def _fans(n: int, i: int, j: int) -> Tuple[Tuple[Tuple[int, int, int], ...], ...]:
    """Every triangulation of the sub-polygon i..j with base edge (i, j), as face tuples."""
    if j - i < 2:
        return ((),)
    result = []
    for k in range(i + 1, j):
        for left in _fans(n, i, k):
            for right in _fans(n, k, j):
                result.append(left + ((i, k, j),) + right)
    return tuple(result)


@lru_cache(maxsize=None)
def _enumerate(n: int) -> Tuple[PolygonTriangulation, ...]:
    found = []
    for faces in _fans(n, 0, n - 1):
        diagonals = set()
        for a, b, c in faces:
            for d in ((a, b), (b, c), (a, c)):
                if d[1] - d[0] not in (1, n - 1):
                    diagonals.add(d)
        found.append(PolygonTriangulation(n, tuple(sorted(diagonals))))
    return tuple(sorted(found, key=lambda t: t.diagonals))


def enumerate_triangulations(n: int) -> List[PolygonTriangulation]:
    """All Catalan(n - 2) triangulations of the convex n-gon, sorted by diagonal set."""
    if not 3 <= n <= get_default("max_polygon_sides"):
        raise InvalidArgumentError(f"n must lie in [3, {get_default('max_polygon_sides')}], got {n}")
    return list(_enumerate(n))


# ═══════════════════════════════════════════════════════════════════════════
# CHARTS
# ═══════════════════════════════════════════════════════════════════════════

def _check_same_n(shape: PolygonShape, tri: PolygonTriangulation) -> None:
    if shape.n != tri.n:
        raise InvalidArgumentError(f"{shape.n}-gon given with a triangulation of the {tri.n}-gon")


def chart_coords(shape: PolygonShape, tri: PolygonTriangulation) -> SurfacePoint:
    _check_same_n(shape, tri)
    distances = _distances(shape.vertices)
    lengths = np.empty(2 * tri.n - 3)
    for k in range(tri.n):
        lengths[k] = distances[k, (k + 1) % tri.n]
    for offset, (a, b) in enumerate(tri.diagonals):
        lengths[tri.n + offset] = distances[a, b]
    return SurfacePoint.from_edge_lengths(tri.triangulation, lengths)


def _third_point(u: np.ndarray, w: np.ndarray, to_u: float, to_w: float) -> np.ndarray:
    """The point at distances (to_u, to_w) from (u, w), to the left of u -> w."""
    base = np.linalg.norm(w - u)
    e = (w - u) / base
    along = (to_u * to_u - to_w * to_w + base * base) / (2.0 * base)
    height = math.sqrt(max(to_u * to_u - along * along, 0.0))
    return u + along * e + height * np.array([-e[1], e[0]])


def shape_from_chart(p: SurfacePoint, tri: PolygonTriangulation) -> PolygonShape:
    """
    Lay the faces out in the plane breadth-first over the dual tree,
    starting from the face on side (0, 1), and check the result is a
    strictly convex unit-area polygon.
    """
    if p.triangulation != tri.triangulation:
        raise InvalidArgumentError("Surface point does not belong to this polygon triangulation")
    lengths = edge_lengths(p)

    def length(a: int, b: int) -> float:
        return lengths[tri.edge_index(a, b)]

    faces = tri.vertex_faces
    placed: Dict[int, np.ndarray] = {0: np.zeros(2), 1: np.array([length(0, 1), 0.0])}
    start = next(f for f, face in enumerate(faces) if 0 in face and 1 in face)
    for f in [start] + [g for _, g in nx.bfs_edges(tri.dual_graph, start)]:
        a, b, c = faces[f]
        for u, w, x in ((a, b, c), (b, c, a), (c, a, b)):
            if u in placed and w in placed and x not in placed:
                placed[x] = _third_point(placed[u], placed[w], length(u, x), length(w, x))

    vertices = np.array([placed[k] for k in range(tri.n)])
    if np.any(turn_crosses(vertices) <= get_tolerance("convexity")):
        raise NotConvexError("Development is not a strictly convex polygon")
    area = shoelace_area(vertices)
    if abs(area - 1.0) > get_tolerance("development_area"):
        raise InconsistentPointError(f"Developed polygon has area {area!r}, expected 1")
    return PolygonShape(vertices, get_tolerance("development_area"))


# ═══════════════════════════════════════════════════════════════════════════
# ALL-CHART SLOT TABLES
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class _SlotTable:
    """Every face of every triangulation of the n-gon, and each chart's slot indices."""
    corners: np.ndarray      # (slots, 3): vertex, then the two other face vertices
    chart_slots: np.ndarray  # (charts, 3 (n - 2)) indices into the slot list


@lru_cache(maxsize=None)
def _slot_table(n: int) -> _SlotTable:
    triangulations = enumerate_triangulations(n)
    faces = sorted({face for tri in triangulations for face in tri.vertex_faces})
    position = {face: k for k, face in enumerate(faces)}
    corners = []
    for a, b, c in faces:
        corners.extend([(a, b, c), (b, c, a), (c, a, b)])
    chart_slots = [
        [3 * position[face] + p for face in tri.vertex_faces for p in range(3)]
        for tri in triangulations
    ]
    return _SlotTable(np.array(corners), np.array(chart_slots))


def log_slots(vertices: np.ndarray) -> np.ndarray:
    """Log Heron coordinates at every corner of every possible face."""
    table = _slot_table(vertices.shape[0])
    d = _distances(vertices)
    v, b, c = table.corners[:, 0], table.corners[:, 1], table.corners[:, 2]
    return np.log((d[v, b] + d[v, c] - d[b, c]) / 2.0)


def _check_pair(X: PolygonShape, Y: PolygonShape) -> None:
    if X.n != Y.n:
        raise InvalidArgumentError(f"Cannot compare a {X.n}-gon with a {Y.n}-gon")


def eta_chart(X: PolygonShape, Y: PolygonShape, tri: PolygonTriangulation) -> float:
    _check_pair(X, Y)
    return eta_T(chart_coords(X, tri), chart_coords(Y, tri))


def _chart_maxima(increments: np.ndarray, n: int) -> np.ndarray:
    return np.max(increments[_slot_table(n).chart_slots], axis=1)


def eta_sup(X: PolygonShape, Y: PolygonShape) -> float:
    """Max over triangulations of the chart distances."""
    _check_pair(X, Y)
    return float(np.max(log_slots(Y.vertices) - log_slots(X.vertices)))


def eta_avg(X: PolygonShape, Y: PolygonShape) -> float:
    """Mean over triangulations of the chart distances."""
    _check_pair(X, Y)
    return float(np.mean(_chart_maxima(log_slots(Y.vertices) - log_slots(X.vertices), X.n)))


# ═══════════════════════════════════════════════════════════════════════════
# FINSLER STRUCTURES
# ═══════════════════════════════════════════════════════════════════════════

def area_gradient(vertices: np.ndarray) -> np.ndarray:
    x, y = vertices[:, 0], vertices[:, 1]
    return 0.5 * np.column_stack([np.roll(y, -1) - np.roll(y, 1), np.roll(x, 1) - np.roll(x, -1)])


def _log_rates(X: PolygonShape, v: np.ndarray) -> Optional[np.ndarray]:
    """Rate of change of every log slot along v, by central differences."""
    v = np.asarray(v, dtype=float)
    if v.shape != X.vertices.shape:
        raise InvalidArgumentError(f"Variation shape {v.shape} does not match {X.vertices.shape}")
    size = float(np.max(np.abs(v)))
    if size == 0.0:
        return None
    if np.any(np.abs(v[0]) > 1e-12 * size) or abs(v[1, 1]) > 1e-12 * size:
        raise InvalidArgumentError("Variation must fix vertex 0 and keep vertex 1 on the x-axis")
    gradient = area_gradient(X.vertices).ravel()
    residual = abs(gradient @ v.ravel()) / (np.linalg.norm(gradient) * np.linalg.norm(v))
    if residual > get_tolerance("tangency"):
        raise InvalidArgumentError(f"Variation changes area to first order (residual {residual:.3e})")
    h = get_tolerance("chart_step") / size
    return (log_slots(X.vertices + h * v) - log_slots(X.vertices - h * v)) / (2.0 * h)


def finsler_sup(X: PolygonShape, v: np.ndarray) -> float:
    rates = _log_rates(X, v)
    return 0.0 if rates is None else float(np.max(rates))


def finsler_avg(X: PolygonShape, v: np.ndarray) -> float:
    rates = _log_rates(X, v)
    return 0.0 if rates is None else float(np.mean(_chart_maxima(rates, X.n)))


# ═══════════════════════════════════════════════════════════════════════════
# PATH METRICS
# ═══════════════════════════════════════════════════════════════════════════

class PolygonPathSpace(PathSpace):
    """
    Canonical vertex arrays, flattened. Segments are straight lines in
    vertex coordinates rescaled to unit area; the free coordinates are
    everything except vertex 0 and the y-coordinate of vertex 1.
    """

    step = 0.05

    def __init__(self, n: int, which: Which = "sup"):
        if which not in ("sup", "avg"):
            raise InvalidArgumentError(f"which must be 'sup' or 'avg', got {which}")
        self.n = n
        self.which = which
        self.name = f"polygon-{which}"

    def _vertices(self, x: np.ndarray) -> np.ndarray:
        return np.reshape(x, (self.n, 2))

    def normalize(self, x: np.ndarray) -> np.ndarray:
        v = self._vertices(x)
        return (v * shoelace_area(v) ** -0.5).ravel()

    def is_feasible(self, x: np.ndarray) -> bool:
        v = self._vertices(x)
        return bool(np.all(np.isfinite(v)) and np.all(turn_crosses(v) > get_tolerance("convexity")))

    def interpolate(self, a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
        return self.normalize((1.0 - s) * a + s * b)

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        increments = log_slots(self._vertices(b)) - log_slots(self._vertices(a))
        if self.which == "sup":
            return float(np.max(increments))
        return float(np.mean(_chart_maxima(increments, self.n)))

    def finsler(self, x: np.ndarray, v: np.ndarray) -> float:
        shape = PolygonShape(self._vertices(x))
        gradient = area_gradient(shape.vertices).ravel()
        gradient[[0, 1, 3]] = 0.0
        v = np.asarray(v, dtype=float)
        velocity = self._vertices(v - (gradient @ v) / (gradient @ gradient) * gradient)
        return finsler_sup(shape, velocity) if self.which == "sup" else finsler_avg(shape, velocity)

    def free_coordinates(self, x: np.ndarray) -> Sequence[int]:
        return [2] + list(range(4, 2 * self.n))

    def perturb(self, x: np.ndarray, index: int, delta: float) -> Optional[np.ndarray]:
        moved = np.array(x, dtype=float)
        moved[index] += delta
        if shoelace_area(self._vertices(moved)) <= 0.0:
            return None
        moved = self.normalize(moved)
        return moved if self.is_feasible(moved) else None

    def initial_paths(self, a: np.ndarray, b: np.ndarray, k: int) -> List[List[np.ndarray]]:
        """The straight path, plus the developed chart geodesic of every triangulation that stays convex."""
        paths = super().initial_paths(a, b, k)
        X, Y = PolygonShape(self._vertices(a)), PolygonShape(self._vertices(b))
        for tri in enumerate_triangulations(self.n):
            path = geodesic_T(chart_coords(X, tri), chart_coords(Y, tri))
            try:
                developed = [shape_from_chart(path(float(t)), tri).vertices.ravel() for t in np.linspace(0.0, 1.0, k)]
            except DomainError:
                continue
            developed[0], developed[-1] = a, b
            paths.append(developed)
        return paths


def path_metric_search(X: PolygonShape, Y: PolygonShape, which: Which = "sup",
                       waypoints: Optional[int] = None, restarts: Optional[int] = None,
                       seed: Optional[int] = None, tol: Optional[float] = None,
                       workers: Optional[int] = None) -> MinimizationResult:
    _check_pair(X, Y)
    space = PolygonPathSpace(X.n, which)
    return minimize_length(space, X.vertices.ravel(), Y.vertices.ravel(),
                           waypoints=waypoints, restarts=restarts, seed=seed, tol=tol, workers=workers)


def path_metric_upper(X: PolygonShape, Y: PolygonShape, which: Which = "sup",
                      waypoints: Optional[int] = None, restarts: Optional[int] = None,
                      seed: Optional[int] = None, tol: Optional[float] = None) -> float:
    """Upper bound on the path metric induced by finsler_sup (or finsler_avg)."""
    return path_metric_search(X, Y, which, waypoints, restarts, seed, tol).upper_bound
