# stretch_metric/triangle.py
"""
Triangle Core
=============
Heron coordinates of Euclidean triangles, Heron's area formula,
edge-length conversions and the best Lipschitz constant between boxes.

Heron coordinates of a triangle with edges (a1, a2, a3) are
A_i = (a_j + a_k - a_i) / 2, and conversely a_i = A_j + A_k.
"""

import logging
import math
from dataclasses import dataclass
from typing import Iterable, Sequence, Tuple

import numpy as np

from .errors import DomainError, InvalidArgumentError
from .settings import get_tolerance

logger = logging.getLogger("stretch-metric.triangle")


def _check_positive(values: Sequence[float], what: str) -> None:
    for value in values:
        if not math.isfinite(value) or value <= 0.0:
            raise DomainError(f"{what} must be finite and positive, got {tuple(values)}")


@dataclass(frozen=True)
class EdgeLengths:
    a1: float
    a2: float
    a3: float

    def __post_init__(self):
        a = self.as_tuple()
        _check_positive(a, "Edge lengths")
        for i in range(3):
            if not a[i] < a[(i + 1) % 3] + a[(i + 2) % 3]:
                raise DomainError(f"Triangle inequality violated by edges {a}")

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.a1, self.a2, self.a3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)


@dataclass(frozen=True)
class TriCoords:
    """Heron coordinates (A1, A2, A3) of a triangle; all strictly positive."""
    A1: float
    A2: float
    A3: float

    def __post_init__(self):
        _check_positive(self.as_tuple(), "Triangle coordinates")

    @classmethod
    def from_array(cls, values: Iterable[float]) -> "TriCoords":
        a1, a2, a3 = (float(v) for v in values)
        return cls(a1, a2, a3)

    def as_tuple(self) -> Tuple[float, float, float]:
        return (self.A1, self.A2, self.A3)

    def as_array(self) -> np.ndarray:
        return np.array(self.as_tuple(), dtype=float)

    def scaled(self, factor: float) -> "TriCoords":
        return TriCoords(self.A1 * factor, self.A2 * factor, self.A3 * factor)

    @property
    def conditioning(self) -> float:
        """Ratio of smallest to largest coordinate."""
        values = self.as_tuple()
        return min(values) / max(values)

    @property
    def ill_conditioned(self) -> bool:
        return self.conditioning < get_tolerance("conditioning")


@dataclass(frozen=True)
class BoxDims:
    """Side lengths of an n-dimensional box."""
    lengths: Tuple[float, ...]

    def __post_init__(self):
        if len(self.lengths) < 1:
            raise InvalidArgumentError("A box needs at least one side")
        _check_positive(self.lengths, "Box sides")

    @classmethod
    def of(cls, values: Iterable[float]) -> "BoxDims":
        return cls(tuple(float(v) for v in values))


# ═══════════════════════════════════════════════════════════════════════════
# CONVERSIONS
# ═══════════════════════════════════════════════════════════════════════════

def edges_to_coords(e: EdgeLengths) -> TriCoords:
    a1, a2, a3 = e.as_tuple()
    return TriCoords((a2 + a3 - a1) / 2.0, (a3 + a1 - a2) / 2.0, (a1 + a2 - a3) / 2.0)


def coords_to_edges(c: TriCoords) -> EdgeLengths:
    return EdgeLengths(c.A2 + c.A3, c.A3 + c.A1, c.A1 + c.A2)


# ═══════════════════════════════════════════════════════════════════════════
# AREA
# ═══════════════════════════════════════════════════════════════════════════

def heron_area(c: TriCoords) -> float:
    """Area sqrt((A1 + A2 + A3) A1 A2 A3); homogeneous of degree 2."""
    a1, a2, a3 = c.as_tuple()
    return math.sqrt((a1 + a2 + a3) * (a1 * a2 * a3))


def heron_area_gradient(c: TriCoords) -> np.ndarray:
    """
    Gradient of the squared area (A1 + A2 + A3) A1 A2 A3.

    Component i is 2 A1 A2 A3 + A_j A_k (A_j + A_k); a tangent vector
    to the unit-area level set is orthogonal to it.
    """
    a = c.as_array()
    product = a[0] * a[1] * a[2]
    gradient = np.empty(3)
    for i in range(3):
        j, k = (i + 1) % 3, (i + 2) % 3
        gradient[i] = 2.0 * product + a[j] * a[k] * (a[j] + a[k])
    return gradient


def normalize_unit_area(c: TriCoords) -> Tuple[TriCoords, float]:
    scale = heron_area(c) ** -0.5
    if c.ill_conditioned:
        logger.warning(f"Near-degenerate triangle {c.as_tuple()} (conditioning {c.conditioning:.3e})")
    return c.scaled(scale), scale


# ═══════════════════════════════════════════════════════════════════════════
# LOG RATIOS
# ═══════════════════════════════════════════════════════════════════════════

def log_ratio_max(src: np.ndarray, dst: np.ndarray) -> float:
    """
    max_i (log dst_i - log src_i), the log of the largest ratio dst_i / src_i.

    Every asymmetric distance in the package goes through this one
    expression so that equal inputs give bit-identical results.
    """
    return float(np.max(np.log(dst) - np.log(src)))


def box_lipschitz(src: BoxDims, dst: BoxDims) -> float:
    """Log of the best Lipschitz constant of a label-preserving map between boxes."""
    if len(src.lengths) != len(dst.lengths):
        raise InvalidArgumentError(
            f"Box dimensions differ: {len(src.lengths)} vs {len(dst.lengths)}"
        )
    return log_ratio_max(np.asarray(src.lengths, dtype=float), np.asarray(dst.lengths, dtype=float))
