# stretch_metric/weak_metric.py
"""
Weak Metric Core
================
Asymmetric distance evaluators, their two symmetrizations and
finite-window diagnostics for Cauchy sequences and the
convergence-symmetry property.

Every verdict produced here is numerical evidence over a finite
window; none of it is a proof about infinite tails.
"""

import itertools
import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Generic, List, Optional, Sequence, Tuple, TypeVar

import numpy as np

from .errors import InvalidArgumentError
from .settings import resolve

logger = logging.getLogger("stretch-metric.weak_metric")

P = TypeVar("P")

EVIDENCE_LABEL = "numerical evidence"


@dataclass(frozen=True)
class WeakMetric(Generic[P]):
    """A possibly asymmetric distance together with the space it lives on."""
    evaluate: Callable[[P, P], float]
    domain_tag: str

    def __call__(self, x: P, y: P) -> float:
        return float(self.evaluate(x, y))

    def reverse(self) -> "WeakMetric[P]":
        return WeakMetric(lambda x, y: self.evaluate(y, x), f"{self.domain_tag}/reverse")


def symmetrize_arith(d: WeakMetric) -> WeakMetric:
    return WeakMetric(lambda x, y: (d(x, y) + d(y, x)) / 2.0, f"{d.domain_tag}/arith")


def symmetrize_max(d: WeakMetric) -> WeakMetric:
    return WeakMetric(lambda x, y: max(d(x, y), d(y, x)), f"{d.domain_tag}/max")


def check_triangle_inequality(
    d: WeakMetric,
    points: Sequence[Any],
    slack: Optional[float] = None,
) -> Optional[Tuple[int, int, int, float]]:
    """
    Test d(x,z) <= d(x,y) + d(y,z) over every ordered triple of a small sample.

    Returns (i, j, k, excess) for the first violating triple, or None.
    """
    slack = resolve(slack, "metric_slack")
    for i, j, k in itertools.permutations(range(len(points)), 3):
        excess = d(points[i], points[k]) - d(points[i], points[j]) - d(points[j], points[k])
        if excess > slack:
            return i, j, k, excess
    return None


# ═══════════════════════════════════════════════════════════════════════════
# CAUCHY DIAGNOSTICS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class SequenceDiagnostics:
    """Tail defects of a sampled sequence at a set of checkpoints."""
    checkpoints: Tuple[Any, ...]
    forward_defects: Tuple[float, ...]
    backward_defects: Tuple[float, ...]
    symmetry_gaps: Tuple[float, ...]
    tolerance: float
    forward_cauchy: bool
    backward_cauchy: bool
    label: str = EVIDENCE_LABEL

    def _position(self, n: Any) -> int:
        for position, checkpoint in enumerate(self.checkpoints):
            if checkpoint >= n:
                return position
        raise InvalidArgumentError(f"No checkpoint at or beyond {n}")

    def forward_cauchy_defect(self, n: Any) -> float:
        return self.forward_defects[self._position(n)]

    def backward_cauchy_defect(self, n: Any) -> float:
        return self.backward_defects[self._position(n)]

    @property
    def max_symmetry_gap(self) -> float:
        return max(self.symmetry_gaps) if self.symmetry_gaps else 0.0


def _distance_matrix(d: WeakMetric, seq: Sequence[Any]) -> np.ndarray:
    m = len(seq)
    matrix = np.zeros((m, m))
    for i in range(m):
        for j in range(i + 1, m):
            matrix[i, j] = d(seq[i], seq[j])
            matrix[j, i] = d(seq[j], seq[i])
    return matrix


def cauchy_diagnose(
    d: WeakMetric,
    seq: Sequence[Any],
    window: int,
    labels: Optional[Sequence[Any]] = None,
    tolerance: Optional[float] = None,
) -> SequenceDiagnostics:
    """
    Forward and backward Cauchy defects of a finite sample of a sequence.

    The forward defect at checkpoint N is the largest d(x_i, x_j) over
    sampled N <= i <= j; the backward defect swaps the arguments.
    Checkpoints are `window` evenly spaced sample positions, reported
    through `labels` (sequence indices) when given.
    """
    if window < 2:
        raise InvalidArgumentError(f"window must be at least 2, got {window}")
    if len(seq) < window:
        raise InvalidArgumentError(f"sequence has {len(seq)} terms, window needs {window}")
    if labels is not None and len(labels) != len(seq):
        raise InvalidArgumentError("labels and sequence differ in length")
    tolerance = resolve(tolerance, "forward_probe")

    m = len(seq)
    matrix = _distance_matrix(d, seq)
    upper = np.triu(matrix)
    lower = np.triu(matrix.T)
    # suffix maxima over i >= N of the row maxima over j >= i
    forward_tail = np.maximum.accumulate(upper.max(axis=1)[::-1])[::-1]
    backward_tail = np.maximum.accumulate(lower.max(axis=1)[::-1])[::-1]

    positions = np.unique(np.rint(np.linspace(0, m - 2, window)).astype(int))
    names = list(labels) if labels is not None else list(range(m))
    gaps = tuple(float(abs(matrix[i, i + 1] - matrix[i + 1, i])) for i in range(m - 1))

    forward = tuple(float(forward_tail[p]) for p in positions)
    backward = tuple(float(backward_tail[p]) for p in positions)
    report = SequenceDiagnostics(
        checkpoints=tuple(names[p] for p in positions),
        forward_defects=forward,
        backward_defects=backward,
        symmetry_gaps=gaps,
        tolerance=tolerance,
        forward_cauchy=forward[-1] < tolerance,
        backward_cauchy=backward[-1] < tolerance,
    )
    logger.debug(
        f"{d.domain_tag}: forward defect {forward[-1]:.3e}, backward defect {backward[-1]:.3e}"
    )
    return report


# ═══════════════════════════════════════════════════════════════════════════
# CONVERGENCE-SYMMETRY PROBE
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ConvergenceSymmetryReport:
    forward_trace: Tuple[float, ...]
    reverse_trace: Tuple[float, ...]
    forward_tolerance: float
    reverse_threshold: float
    violation: bool
    label: str = EVIDENCE_LABEL
    notes: List[str] = field(default_factory=list)


def convergence_symmetry_probe(
    d: WeakMetric,
    pairs: Sequence[Tuple[Any, Any]],
    forward_tolerance: Optional[float] = None,
    reverse_threshold: Optional[float] = None,
) -> ConvergenceSymmetryReport:
    """
    Evaluate d(p_n, q_n) and d(q_n, p_n) along caller-built pairs.

    A violation is flagged when the last forward value is below
    `forward_tolerance` while the last reverse value stays above
    `reverse_threshold`.
    """
    if not pairs:
        raise InvalidArgumentError("probe needs at least one pair")
    forward_tolerance = resolve(forward_tolerance, "forward_probe")
    reverse_threshold = resolve(reverse_threshold, "reverse_probe")

    forward = tuple(d(p, q) for p, q in pairs)
    reverse = tuple(d(q, p) for p, q in pairs)
    notes = []
    if any(b > a for a, b in zip(forward, forward[1:])):
        notes.append("forward trace is not monotonically decreasing")
    violation = forward[-1] < forward_tolerance and reverse[-1] > reverse_threshold
    if violation:
        logger.info(
            f"{d.domain_tag}: convergence-symmetry violated "
            f"(forward {forward[-1]:.3e}, reverse {reverse[-1]:.3e})"
        )
    return ConvergenceSymmetryReport(
        forward_trace=forward,
        reverse_trace=reverse,
        forward_tolerance=forward_tolerance,
        reverse_threshold=reverse_threshold,
        violation=violation,
        notes=notes,
    )
