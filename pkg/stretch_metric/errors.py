# stretch_metric/errors.py
"""
Error Hierarchy
===============
Exceptions raised by the geometry modules and the exit codes
the command-line driver maps them to.
"""

from typing import Optional

EXIT_OK = 0
EXIT_MALFORMED = 2
EXIT_DOMAIN = 3


class StretchMetricError(Exception):
    """Root of every library error."""


class DomainError(StretchMetricError, ValueError):
    """Coordinates outside the space (non-positive, degenerate, non-finite)."""


class InconsistentPointError(DomainError):
    """Gluing constraints or area normalization violated beyond tolerance."""


class NotConvexError(DomainError):
    """A planar development is not a strictly convex polygon."""


class InvalidArgumentError(StretchMetricError, ValueError):
    """Parameters that make the request itself meaningless."""


class NumericalFailureError(StretchMetricError, ArithmeticError):
    """An iterative method did not reach its tolerance within budget."""

    def __init__(self, message: str, partial_estimate: Optional[float] = None,
                 error_estimate: Optional[float] = None):
        super().__init__(message)
        self.partial_estimate = partial_estimate
        self.error_estimate = error_estimate


def exit_code_for(exc: BaseException) -> int:
    if isinstance(exc, (DomainError, NumericalFailureError)):
        return EXIT_DOMAIN
    return EXIT_MALFORMED
