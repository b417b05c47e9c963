# stretch_metric/triangle_space.py
"""
Triangle Space
==============
The space of marked unit-area Euclidean triangles with the asymmetric
distance eta(X, Y) = log max_i Y_i / X_i, its log-linear bigeodesics,
the geodesic dominance criterion and the Finsler norm max_i v_i / A_i.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .settings import get_tolerance, resolve
from .triangle import TriCoords, heron_area, heron_area_gradient, log_ratio_max, normalize_unit_area
from .weak_metric import EVIDENCE_LABEL, WeakMetric

logger = logging.getLogger("stretch-metric.triangle_space")


@dataclass(frozen=True)
class TrianglePoint:
    """A triangle of area 1 in Heron coordinates."""
    coords: TriCoords

    def __post_init__(self):
        area = heron_area(self.coords)
        if abs(area - 1.0) > get_tolerance("area"):
            raise DomainError(f"Triangle {self.coords.as_tuple()} has area {area!r}, expected 1")

    @classmethod
    def normalized(cls, coords: Union[TriCoords, Sequence[float]]) -> "TrianglePoint":
        """Rescale any valid triangle to unit area."""
        if not isinstance(coords, TriCoords):
            coords = TriCoords.from_array(coords)
        unit, _ = normalize_unit_area(coords)
        return cls(unit)

    def as_array(self) -> np.ndarray:
        return self.coords.as_array()


TriangleLike = Union[TrianglePoint, TriCoords]


def _array(x: TriangleLike) -> np.ndarray:
    if isinstance(x, TrianglePoint):
        return x.as_array()
    if isinstance(x, TriCoords):
        return x.as_array()
    return TriCoords.from_array(x).as_array()


def _check_t(t: float) -> None:
    if not 0.0 <= t <= 1.0:
        raise InvalidArgumentError(f"Family parameter t must lie in [0, 1], got {t}")


# ═══════════════════════════════════════════════════════════════════════════
# DISTANCES
# ═══════════════════════════════════════════════════════════════════════════

def eta(X: TriangleLike, Y: TriangleLike) -> float:
    """
    log max{Y1/X1, Y2/X2, Y3/X3}.

    Defined on all positive triples; nonnegative with equality iff X = Y
    when both triangles have unit area.
    """
    return log_ratio_max(_array(X), _array(Y))


def eta_family_arith(t: float, X: TriangleLike, Y: TriangleLike) -> float:
    _check_t(t)
    return (1.0 - t) * eta(X, Y) + t * eta(Y, X)


def eta_family_max(t: float, X: TriangleLike, Y: TriangleLike) -> float:
    _check_t(t)
    return max((1.0 - t) * eta(X, Y), t * eta(Y, X))


def d_max(X: TriangleLike, Y: TriangleLike) -> float:
    return max(eta(X, Y), eta(Y, X))


def max_log_distance(X: TriangleLike, Y: TriangleLike) -> float:
    """The complete symmetric metric max_i |log Y_i - log X_i|."""
    return float(np.max(np.abs(np.log(_array(Y)) - np.log(_array(X)))))


def triangle_metric() -> WeakMetric:
    return WeakMetric(eta, "T1")


# ═══════════════════════════════════════════════════════════════════════════
# GEODESICS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class GeodesicPath:
    """t -> unit-area rescaling of (X_i^(1-t) Y_i^t)."""
    start: TrianglePoint
    end: TrianglePoint

    def raw(self, t: float) -> TriCoords:
        x, y = self.start.as_array(), self.end.as_array()
        return TriCoords.from_array(x ** (1.0 - t) * y ** t)

    def __call__(self, t: float) -> TrianglePoint:
        if not 0.0 <= t <= 1.0:
            raise InvalidArgumentError(f"Path parameter must lie in [0, 1], got {t}")
        return TrianglePoint.normalized(self.raw(t))

    def reversed(self) -> "GeodesicPath":
        return GeodesicPath(self.end, self.start)

    def samples(self, grid: int) -> List[Tuple[float, TrianglePoint]]:
        return [(float(t), self(float(t))) for t in np.linspace(0.0, 1.0, grid)]


def geodesic(X: TrianglePoint, Y: TrianglePoint) -> GeodesicPath:
    return GeodesicPath(X, Y)


@dataclass(frozen=True)
class GeodesicVerdict:
    """
    Outcome of the dominance criterion on a sample grid.

    witnesses maps each rejected candidate index j to (i, t, t') with
    log-increment of slot i exceeding that of slot j between t and t'.
    """
    is_geodesic: bool
    dominant_index: Optional[int]
    witnesses: Dict[int, Tuple[int, float, float]] = field(default_factory=dict)
    grid_size: int = 0
    label: str = EVIDENCE_LABEL


def verify_log_dominance(
    ts: Sequence[float],
    logs: np.ndarray,
    slack: Optional[float] = None,
) -> GeodesicVerdict:
    """
    Search for a coordinate j whose log-increment dominates every other
    coordinate's increment over all sampled pairs t <= t'.

    logs has one row per sample and one column per coordinate. The
    smallest dominating index is reported.
    """
    slack = resolve(slack, "geodesic_slack")
    ts = np.asarray(ts, dtype=float)
    logs = np.asarray(logs, dtype=float)
    if ts.ndim != 1 or logs.ndim != 2 or logs.shape[0] != ts.size:
        raise InvalidArgumentError("Need one row of log-coordinates per sample time")
    if np.any(np.diff(ts) < 0.0):
        raise InvalidArgumentError("Samples must be ordered in t")

    m = ts.size
    increments = logs[None, :, :] - logs[:, None, :]
    later = np.triu(np.ones((m, m), dtype=bool), k=1)[:, :, None]
    witnesses = {}
    for j in range(logs.shape[1]):
        excess = (increments - increments[:, :, j:j + 1] > slack) & later
        if not excess.any():
            return GeodesicVerdict(True, j, witnesses, m)
        a, b, i = np.argwhere(excess)[0]
        witnesses[j] = (int(i), float(ts[a]), float(ts[b]))
    return GeodesicVerdict(False, None, witnesses, m)


def verify_geodesic(samples: Sequence[Tuple[float, TriangleLike]]) -> GeodesicVerdict:
    """Dominance criterion for a sampled path in triangle coordinates (any scaling)."""
    if not samples:
        raise InvalidArgumentError("No samples to verify")
    ts = [t for t, _ in samples]
    logs = np.log(np.array([_array(x) for _, x in samples]))
    return verify_log_dominance(ts, logs)


# ═══════════════════════════════════════════════════════════════════════════
# FINSLER STRUCTURE
# ═══════════════════════════════════════════════════════════════════════════

def tangency_residual(base: TriCoords, v: np.ndarray) -> float:
    """Relative size of the area differential applied to v."""
    gradient = heron_area_gradient(base)
    norm = np.linalg.norm(gradient) * np.linalg.norm(v)
    if norm == 0.0:
        return 0.0
    return float(abs(gradient @ v) / norm)


@dataclass(frozen=True)
class TangentVector:
    """A velocity at a unit-area triangle that preserves area to first order."""
    base: TrianglePoint
    v: Tuple[float, float, float]

    def __post_init__(self):
        residual = tangency_residual(self.base.coords, self.as_array())
        if residual > get_tolerance("tangency"):
            raise InvalidArgumentError(f"Vector {self.v} is not tangent (residual {residual:.3e})")

    @classmethod
    def complete(cls, base: TrianglePoint, v1: float, v2: float) -> "TangentVector":
        """Solve the third component from the linearized area constraint."""
        g = heron_area_gradient(base.coords)
        v3 = -(g[0] * v1 + g[1] * v2) / g[2]
        return cls(base, (float(v1), float(v2), float(v3)))

    @classmethod
    def project(cls, base: TrianglePoint, raw: Sequence[float]) -> "TangentVector":
        g = heron_area_gradient(base.coords)
        v = np.asarray(raw, dtype=float)
        v = v - (g @ v) / (g @ g) * g
        return cls(base, tuple(float(x) for x in v))

    def as_array(self) -> np.ndarray:
        return np.array(self.v, dtype=float)

    def __neg__(self) -> "TangentVector":
        return TangentVector(self.base, tuple(-x for x in self.v))

    def scaled(self, factor: float) -> "TangentVector":
        return TangentVector(self.base, tuple(factor * x for x in self.v))


def finsler_norm(v: TangentVector) -> float:
    """max_i v_i / A_i."""
    return float(np.max(v.as_array() / v.base.as_array()))


def finsler_family_arith(t: float, v: TangentVector) -> float:
    _check_t(t)
    return (1.0 - t) * finsler_norm(v) + t * finsler_norm(-v)


def finsler_family_max(t: float, v: TangentVector) -> float:
    _check_t(t)
    return max((1.0 - t) * finsler_norm(v), t * finsler_norm(-v))


def random_point(rng: np.random.Generator, spread: float = 1.0) -> TrianglePoint:
    """Unit-area triangle with log-coordinates drawn uniformly from [-spread, spread]."""
    return TrianglePoint.normalized(np.exp(rng.uniform(-spread, spread, 3)))
