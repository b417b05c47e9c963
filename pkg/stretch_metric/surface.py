# stretch_metric/surface.py
"""
Surface Space
=============
Flat structures with conical singularities on a surface carrying a
fixed triangulation, coordinatized by Heron slots.

A slot is a (face, position) pair. Faces are ordered edge triples
(i, j, k); the value at position 0 is the Heron coordinate of the
corner opposite edge i, i.e. (l_j + l_k - l_i) / 2. An interior edge
appears in two slots and the lengths read off both adjacent faces
must agree.
"""

import logging
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import List, Literal, Sequence, Tuple

import numpy as np

from .errors import DomainError, InconsistentPointError, InvalidArgumentError
from .settings import get_tolerance
from .triangle import log_ratio_max
from .triangle_space import GeodesicVerdict, verify_log_dominance
from .weak_metric import WeakMetric

logger = logging.getLogger("stretch-metric.surface")

Construction = Literal["auto", "log-linear", "linear"]


# ═══════════════════════════════════════════════════════════════════════════
# TRIANGULATION
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class Triangulation:
    """
    Combinatorial triangulation: faces as edge-index triples and a
    boundary flag per edge. An edge may occur twice on the same face.
    """
    edge_count: int
    faces: Tuple[Tuple[int, int, int], ...]
    boundary: Tuple[bool, ...]

    def __post_init__(self):
        if self.edge_count < 3 or not self.faces:
            raise InvalidArgumentError("A triangulation needs at least three edges and one face")
        if len(self.boundary) != self.edge_count:
            raise InvalidArgumentError(
                f"{len(self.boundary)} boundary flags for {self.edge_count} edges"
            )
        usage = [0] * self.edge_count
        for face in self.faces:
            if len(face) != 3:
                raise InvalidArgumentError(f"Face {face} is not a triple")
            for edge in face:
                if not 0 <= edge < self.edge_count:
                    raise InvalidArgumentError(f"Face {face} names unknown edge {edge}")
                usage[edge] += 1
        for edge, count in enumerate(usage):
            expected = 1 if self.boundary[edge] else 2
            if count != expected:
                kind = "boundary" if self.boundary[edge] else "interior"
                raise InvalidArgumentError(
                    f"{kind.capitalize()} edge {edge} lies in {count} face slots, expected {expected}"
                )

    @classmethod
    def build(cls, edge_count: int, faces: Sequence[Sequence[int]], boundary: Sequence[bool]) -> "Triangulation":
        return cls(
            edge_count,
            tuple(tuple(int(e) for e in face) for face in faces),
            tuple(bool(b) for b in boundary),
        )

    @property
    def face_count(self) -> int:
        return len(self.faces)

    @property
    def slot_count(self) -> int:
        return 3 * len(self.faces)

    @cached_property
    def edge_slots(self) -> Tuple[Tuple[Tuple[int, int], ...], ...]:
        """For each edge, the (face, position) slots lying opposite it."""
        slots: List[List[Tuple[int, int]]] = [[] for _ in range(self.edge_count)]
        for f, face in enumerate(self.faces):
            for position, edge in enumerate(face):
                slots[edge].append((f, position))
        return tuple(tuple(s) for s in slots)

    @property
    def interior_edges(self) -> Tuple[int, ...]:
        return tuple(e for e in range(self.edge_count) if not self.boundary[e])

    def index_set(self) -> Tuple[Tuple[int, int, int], ...]:
        """The even permutations of every face triple."""
        return tuple(self.slot_label(f, p) for f in range(self.face_count) for p in range(3))

    def slot_label(self, face: int, position: int) -> Tuple[int, int, int]:
        i, j, k = self.faces[face]
        rotations = ((i, j, k), (j, k, i), (k, i, j))
        return rotations[position]

    @cached_property
    def constraint_matrix(self) -> np.ndarray:
        """
        Rows encode l_e(first slot) - l_e(second slot) = 0 for each
        interior edge, over the flattened slot vector.
        """
        rows = []
        for edge in self.interior_edges:
            (f, p), (g, q) = self.edge_slots[edge]
            row = np.zeros(self.slot_count)
            row[3 * f + (p + 1) % 3] += 1.0
            row[3 * f + (p + 2) % 3] += 1.0
            row[3 * g + (q + 1) % 3] -= 1.0
            row[3 * g + (q + 2) % 3] -= 1.0
            rows.append(row)
        if not rows:
            return np.zeros((0, self.slot_count))
        return np.array(rows)


def single_face_triangulation() -> Triangulation:
    return Triangulation.build(3, [(0, 1, 2)], [True, True, True])


def quadrangle_triangulation() -> Triangulation:
    """Disc made of two faces glued along the interior diagonal edge 0."""
    return Triangulation.build(5, [(0, 1, 2), (0, 3, 4)], [False, True, True, True, True])


def tetrahedron_triangulation() -> Triangulation:
    """Sphere made of four faces, every edge interior."""
    faces = [(3, 1, 0), (4, 2, 0), (5, 2, 1), (5, 4, 3)]
    return Triangulation.build(6, faces, [False] * 6)


# ═══════════════════════════════════════════════════════════════════════════
# POINTS
# ═══════════════════════════════════════════════════════════════════════════

def _face_areas(values: np.ndarray) -> np.ndarray:
    return np.sqrt(values.sum(axis=1) * values.prod(axis=1))


def constraint_residual(tri: Triangulation, values: np.ndarray) -> float:
    """Largest interior-edge length mismatch, relative to the largest slot value."""
    if not tri.interior_edges:
        return 0.0
    mismatch = tri.constraint_matrix @ np.asarray(values, dtype=float).ravel()
    return float(np.max(np.abs(mismatch)) / np.max(values))


@dataclass(frozen=True)
class SurfacePoint:
    """Heron slot values of a flat structure; shape (faces, 3)."""
    triangulation: Triangulation
    values: np.ndarray
    tolerance: float = field(default=0.0, compare=False)

    def __post_init__(self):
        values = np.array(self.values, dtype=float)
        if values.shape != (self.triangulation.face_count, 3):
            raise InvalidArgumentError(
                f"Expected slot array of shape {(self.triangulation.face_count, 3)}, got {values.shape}"
            )
        if not np.all(np.isfinite(values)) or np.any(values <= 0.0):
            raise DomainError("Slot values must be finite and positive")
        tolerance = self.tolerance or get_tolerance("constraint_construction")
        residual = constraint_residual(self.triangulation, values)
        if residual > tolerance:
            raise InconsistentPointError(
                f"Interior-edge lengths disagree by {residual:.3e} (tolerance {tolerance:.1e})"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "tolerance", tolerance)

    def __eq__(self, other) -> bool:
        if not isinstance(other, SurfacePoint):
            return NotImplemented
        return self.triangulation == other.triangulation and np.array_equal(self.values, other.values)

    @classmethod
    def from_edge_lengths(cls, tri: Triangulation, lengths: Sequence[float], tolerance: float = 0.0) -> "SurfacePoint":
        """Slots (l_j + l_k - l_i) / 2 from one length per edge."""
        lengths = np.asarray(lengths, dtype=float)
        if lengths.shape != (tri.edge_count,):
            raise InvalidArgumentError(f"Need {tri.edge_count} edge lengths, got {lengths.shape}")
        faces = np.array(tri.faces)
        l = lengths[faces]
        values = (np.roll(l, -1, axis=1) + np.roll(l, -2, axis=1) - l) / 2.0
        return cls(tri, values, tolerance)

    def with_values(self, values: np.ndarray, tolerance: float = 0.0) -> "SurfacePoint":
        return SurfacePoint(self.triangulation, values, tolerance or self.tolerance)

    def flat(self) -> np.ndarray:
        return self.values.ravel()

    @cached_property
    def area(self) -> float:
        return float(_face_areas(self.values).sum())

    def slot(self, label: Tuple[int, int, int]) -> float:
        """Value at an index-set triple (i, j, k), i.e. opposite edge i."""
        for f in range(self.triangulation.face_count):
            for p in range(3):
                if self.triangulation.slot_label(f, p) == tuple(label):
                    return float(self.values[f, p])
        raise InvalidArgumentError(f"{label} is not in the index set")


# ═══════════════════════════════════════════════════════════════════════════
# LENGTHS & AREA
# ═══════════════════════════════════════════════════════════════════════════

def edge_lengths(p: SurfacePoint) -> np.ndarray:
    """One length per edge, read off its first slot (both slots agree)."""
    tri = p.triangulation
    lengths = np.empty(tri.edge_count)
    for edge, slots in enumerate(tri.edge_slots):
        f, q = slots[0]
        lengths[edge] = p.values[f, (q + 1) % 3] + p.values[f, (q + 2) % 3]
        if len(slots) == 2:
            g, r = slots[1]
            other = p.values[g, (r + 1) % 3] + p.values[g, (r + 2) % 3]
            if abs(other - lengths[edge]) > p.tolerance * np.max(p.values):
                raise InconsistentPointError(
                    f"Edge {edge} has lengths {lengths[edge]!r} and {other!r} from its two faces"
                )
    return lengths


def surface_area(p: SurfacePoint) -> float:
    return p.area


def normalize_unit_area(p: SurfacePoint) -> Tuple[SurfacePoint, float]:
    scale = p.area ** -0.5
    return p.with_values(p.values * scale), scale


def area_gradient(p: SurfacePoint) -> np.ndarray:
    """d(total area)/d(slot), shape (faces, 3)."""
    values = p.values
    total = values.sum(axis=1, keepdims=True)
    others = np.stack(
        [values[:, 1] * values[:, 2], values[:, 2] * values[:, 0], values[:, 0] * values[:, 1]], axis=1
    )
    areas = _face_areas(values)[:, None]
    # d/dA_i sqrt(S * P) = (P + S * P / A_i) / (2 sqrt(S P))
    return (values.prod(axis=1, keepdims=True) + total * others) / (2.0 * areas)


# ═══════════════════════════════════════════════════════════════════════════
# METRIC
# ═══════════════════════════════════════════════════════════════════════════

def _same_triangulation(p: SurfacePoint, q: SurfacePoint) -> None:
    if p.triangulation != q.triangulation:
        raise InvalidArgumentError("Points belong to different triangulations")


def eta_T(p: SurfacePoint, q: SurfacePoint) -> float:
    """log max over slots of q / p."""
    _same_triangulation(p, q)
    return log_ratio_max(p.flat(), q.flat())


def eta_T_family_arith(t: float, p: SurfacePoint, q: SurfacePoint) -> float:
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"Family parameter t must lie in [0, 1], got {t}")
    return (1.0 - t) * eta_T(p, q) + t * eta_T(q, p)


def eta_T_family_max(t: float, p: SurfacePoint, q: SurfacePoint) -> float:
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"Family parameter t must lie in [0, 1], got {t}")
    return max((1.0 - t) * eta_T(p, q), t * eta_T(q, p))


def max_log_distance_T(p: SurfacePoint, q: SurfacePoint) -> float:
    _same_triangulation(p, q)
    return float(np.max(np.abs(np.log(q.flat()) - np.log(p.flat()))))


def surface_metric(tri: Triangulation) -> WeakMetric:
    return WeakMetric(eta_T, f"E(S,T)1[{tri.face_count} faces]")


# ═══════════════════════════════════════════════════════════════════════════
# GEODESICS
# ═══════════════════════════════════════════════════════════════════════════

_SAMPLE_TIMES = np.linspace(0.0, 1.0, 33)


def log_linear_defect(p: SurfacePoint, q: SurfacePoint) -> float:
    """Worst constraint residual of unnormalized slot-wise log-linear interpolation."""
    tri = p.triangulation
    if not tri.interior_edges:
        return 0.0
    a, b = p.values, q.values
    return max(constraint_residual(tri, a ** (1.0 - t) * b ** t) for t in _SAMPLE_TIMES)


@dataclass(frozen=True)
class SurfaceGeodesic:
    """
    Unit-area path between two surface points.

    "log-linear" interpolates A^(1-t) B^t slot by slot; "linear"
    interpolates (1-t) A + t B, which keeps the edge gluing identities
    exactly. Both are renormalized to unit area.
    """
    start: SurfacePoint
    end: SurfacePoint
    construction: Literal["log-linear", "linear"]
    log_linear_defect: float

    def raw(self, t: float) -> np.ndarray:
        a, b = self.start.values, self.end.values
        if self.construction == "log-linear":
            return a ** (1.0 - t) * b ** t
        return (1.0 - t) * a + t * b

    def __call__(self, t: float) -> SurfacePoint:
        if not 0.0 <= t <= 1.0:
            raise InvalidArgumentError(f"Path parameter must lie in [0, 1], got {t}")
        point = SurfacePoint(self.start.triangulation, self.raw(t), get_tolerance("constraint_path"))
        unit, _ = normalize_unit_area(point)
        return unit

    def reversed(self) -> "SurfaceGeodesic":
        return SurfaceGeodesic(self.end, self.start, self.construction, self.log_linear_defect)

    def samples(self, grid: int) -> List[Tuple[float, SurfacePoint]]:
        return [(float(t), self(float(t))) for t in np.linspace(0.0, 1.0, grid)]


def geodesic_T(p: SurfacePoint, q: SurfacePoint, construction: Construction = "auto") -> SurfaceGeodesic:
    _same_triangulation(p, q)
    defect = log_linear_defect(p, q)
    if construction == "auto":
        construction = "log-linear" if defect <= get_tolerance("constraint_path") else "linear"
        if construction == "linear":
            logger.warning(f"Log-linear interpolation leaves the constraints by {defect:.3e}; using linear slots")
    elif construction == "log-linear" and defect > get_tolerance("constraint_path"):
        logger.warning(f"Log-linear surface path violates edge gluing by {defect:.3e}")
    elif construction not in ("log-linear", "linear"):
        raise InvalidArgumentError(f"Unknown geodesic construction: {construction}")
    return SurfaceGeodesic(p, q, construction, defect)


def verify_geodesic_T(samples: Sequence[Tuple[float, SurfacePoint]]) -> GeodesicVerdict:
    """
    Dominance criterion over all slots. The dominant index is the
    flattened slot number 3 * face + position.
    """
    if not samples:
        raise InvalidArgumentError("No samples to verify")
    tri = samples[0][1].triangulation
    for _, point in samples:
        if point.triangulation != tri:
            raise InvalidArgumentError("Samples belong to different triangulations")
    ts = [t for t, _ in samples]
    logs = np.log(np.array([point.flat() for _, point in samples]))
    return verify_log_dominance(ts, logs)


# ═══════════════════════════════════════════════════════════════════════════
# FINSLER STRUCTURE
# ═══════════════════════════════════════════════════════════════════════════

def tangent_residuals(base: SurfacePoint, v: np.ndarray) -> Tuple[float, float]:
    """Relative residuals of the linearized gluing and area constraints."""
    v = np.asarray(v, dtype=float)
    scale = np.linalg.norm(v)
    if scale == 0.0:
        return 0.0, 0.0
    tri = base.triangulation
    gluing = 0.0
    if tri.interior_edges:
        gluing = float(np.max(np.abs(tri.constraint_matrix @ v.ravel())) / scale)
    gradient = area_gradient(base).ravel()
    area = float(abs(gradient @ v.ravel()) / (np.linalg.norm(gradient) * scale))
    return gluing, area


@dataclass(frozen=True)
class SurfaceTangent:
    base: SurfacePoint
    v: np.ndarray

    def __post_init__(self):
        v = np.array(self.v, dtype=float)
        if v.shape != self.base.values.shape:
            raise InvalidArgumentError(f"Tangent shape {v.shape} does not match {self.base.values.shape}")
        gluing, area = tangent_residuals(self.base, v)
        if max(gluing, area) > get_tolerance("tangency"):
            raise InvalidArgumentError(
                f"Vector is not tangent (gluing residual {gluing:.3e}, area residual {area:.3e})"
            )
        v.setflags(write=False)
        object.__setattr__(self, "v", v)

    @classmethod
    def project(cls, base: SurfacePoint, raw: np.ndarray) -> "SurfaceTangent":
        """Orthogonal projection onto the kernel of the linearized constraints."""
        constraints = np.vstack([base.triangulation.constraint_matrix, area_gradient(base).ravel()])
        raw = np.asarray(raw, dtype=float).ravel()
        correction = np.linalg.pinv(constraints) @ (constraints @ raw)
        return cls(base, (raw - correction).reshape(base.values.shape))

    def __neg__(self) -> "SurfaceTangent":
        return SurfaceTangent(self.base, -self.v)


def finsler_T(v: SurfaceTangent) -> float:
    """max over slots of v / A."""
    return float(np.max(v.v / v.base.values))


def finsler_T_family(t: float, v: SurfaceTangent) -> float:
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"Family parameter t must lie in [0, 1], got {t}")
    return (1.0 - t) * finsler_T(v) + t * finsler_T(-v)


# ═══════════════════════════════════════════════════════════════════════════
# DEGENERATING QUADRANGLES
# ═══════════════════════════════════════════════════════════════════════════

def _quadrangle(base: float, gap: float) -> np.ndarray:
    """
    Thin face with sides (a/c, a/c, 2/c) where a = sqrt(1 + gap), glued
    along the 2/c diagonal to an equilateral face of side 2/c,
    c = sqrt(sqrt(3) + base).
    """
    c = math.sqrt(math.sqrt(3.0) + base)
    a = math.sqrt(1.0 + gap)
    thin = gap / (a + 1.0) / c   # (a - 1) / c without cancellation
    return np.array([[thin, 1.0 / c, 1.0 / c], [1.0 / c, 1.0 / c, 1.0 / c]])


def example_incomplete_sequence(n: int) -> Tuple[SurfacePoint, SurfacePoint]:
    """
    The pair (Q_n, Q'_n) on the two-face disc.

    Q_n: c = sqrt(sqrt(3) + 1/n), a = sqrt(1 + 1/n^2).
    Q'_n: d = sqrt(sqrt(3) + 2/n), b = sqrt(1 + 4/n^2).
    Both have unit area; the thin face collapses as n grows.
    """
    if n < 1:
        raise InvalidArgumentError(f"n must be at least 1, got {n}")
    tri = quadrangle_triangulation()
    q = SurfacePoint(tri, _quadrangle(1.0 / n, 1.0 / n ** 2))
    q_prime = SurfacePoint(tri, _quadrangle(2.0 / n, 4.0 / n ** 2))
    return q, q_prime
