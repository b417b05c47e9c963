# stretch_metric/quadrant.py
"""
Quadrant Model
==============
Chart of the unit-area triangle space by its first two Heron
coordinates. The third coordinate is recovered as G(A1, A2), the
positive root of (A1 + A2 + A3) A1 A2 A3 = 1.
"""

import logging
import math
from dataclasses import dataclass
from typing import Sequence, Tuple

import numpy as np

from .errors import DomainError
from .triangle import TriCoords
from .triangle_space import GeodesicVerdict, TangentVector, TrianglePoint, eta, finsler_norm, verify_geodesic

logger = logging.getLogger("stretch-metric.quadrant")


@dataclass(frozen=True)
class QuadrantPoint:
    A1: float
    A2: float

    def __post_init__(self):
        for value in (self.A1, self.A2):
            if not math.isfinite(value) or value <= 0.0:
                raise DomainError(f"Quadrant coordinates must be positive, got {(self.A1, self.A2)}")

    def as_tuple(self) -> Tuple[float, float]:
        return (self.A1, self.A2)


@dataclass(frozen=True)
class UnitBallTriangle:
    """Vertices of the unit ball of F* in the tangent plane at base."""
    base: QuadrantPoint
    U: Tuple[float, float]
    V: Tuple[float, float]
    W: Tuple[float, float]

    def vertices(self) -> Tuple[Tuple[float, float], ...]:
        return (self.U, self.V, self.W)


# ═══════════════════════════════════════════════════════════════════════════
# THE FUNCTION G
# ═══════════════════════════════════════════════════════════════════════════

def g_third_coordinate(p: QuadrantPoint) -> float:
    """
    G(A1, A2) = (sqrt((A1 + A2)^2 + 4 / (A1 A2)) - A1 - A2) / 2.

    Evaluated in the rationalized form 2 / (P (sqrt(S^2 + 4/P) + S)),
    S = A1 + A2, P = A1 A2, which has no cancellation for large inputs.
    """
    s = p.A1 + p.A2
    product = p.A1 * p.A2
    return 2.0 / (product * (math.sqrt(s * s + 4.0 / product) + s))


def g_partials(p: QuadrantPoint) -> Tuple[float, float]:
    """Both partials of G, summed from terms of one sign."""
    a1, a2 = p.A1, p.A2
    s = a1 + a2
    product = a1 * a2
    root = math.sqrt(s * s + 4.0 / product)
    # root - s, rationalized
    gap = (4.0 / product) / (s + root)
    d1 = -(gap + 2.0 / (a1 * product)) / (2.0 * root)
    d2 = -(gap + 2.0 / (a2 * product)) / (2.0 * root)
    return d1, d2


def phi(p: QuadrantPoint) -> TrianglePoint:
    return TrianglePoint(TriCoords(p.A1, p.A2, g_third_coordinate(p)))


def phi_inverse(X: TrianglePoint) -> QuadrantPoint:
    return QuadrantPoint(X.coords.A1, X.coords.A2)


# ═══════════════════════════════════════════════════════════════════════════
# TRANSPORTED METRIC & NORM
# ═══════════════════════════════════════════════════════════════════════════

def eta_star(p: QuadrantPoint, q: QuadrantPoint) -> float:
    """log max{q1/p1, q2/p2, G(q)/G(p)}, computed as eta(phi(p), phi(q))."""
    return eta(phi(p), phi(q))


def pushforward(p: QuadrantPoint, x: float, y: float) -> Tuple[float, float, float]:
    d1, d2 = g_partials(p)
    return (x, y, x * d1 + y * d2)


def finsler_star(p: QuadrantPoint, x: float, y: float) -> float:
    d1, d2 = g_partials(p)
    g = g_third_coordinate(p)
    return max(x / p.A1, y / p.A2, (x * d1 + y * d2) / g)


def finsler_star_pushed(p: QuadrantPoint, x: float, y: float) -> float:
    """F* through the triangle-space norm of the pushed-forward vector."""
    return finsler_norm(TangentVector(phi(p), pushforward(p, x, y)))


def unit_ball(p: QuadrantPoint) -> UnitBallTriangle:
    d1, d2 = g_partials(p)
    g = g_third_coordinate(p)
    return UnitBallTriangle(
        base=p,
        U=(p.A1, p.A2),
        V=((g - p.A2 * d2) / d1, p.A2),
        W=(p.A1, (g - p.A1 * d1) / d2),
    )


@dataclass(frozen=True)
class UnitBallSampleReport:
    count: int
    max_value: float
    inside: bool
    margin: float


def sample_unit_ball(p: QuadrantPoint, count: int, rng: np.random.Generator,
                     margin: float = 1e-12, min_weight: float = 1e-3) -> UnitBallSampleReport:
    """Evaluate F* at random interior convex combinations of the ball's vertices."""
    ball = unit_ball(p)
    vertices = np.array(ball.vertices())
    weights = rng.dirichlet(np.ones(3), size=count)
    weights = min_weight + (1.0 - 3.0 * min_weight) * weights
    points = weights @ vertices
    values = [finsler_star(p, float(x), float(y)) for x, y in points]
    largest = max(values)
    return UnitBallSampleReport(count, largest, largest < 1.0 - margin, margin)


def verify_quadrant_geodesic(samples: Sequence[Tuple[float, QuadrantPoint]]) -> GeodesicVerdict:
    """Push a sampled quadrant path into triangle space and apply the dominance criterion."""
    return verify_geodesic([(t, phi(q)) for t, q in samples])
