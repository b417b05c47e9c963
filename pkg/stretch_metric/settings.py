# stretch_metric/settings.py
"""
Tolerance & Default Registry
============================
Every numerical threshold used by the library lives here.
Modules look values up by name instead of hard-coding them.
"""

from typing import Any, Dict, List, Optional

from pydantic import BaseModel, Field

from .errors import InvalidArgumentError

TOLERANCES: Dict[str, float] = {
    # ═══════════════════════════════════════════════════════════════
    # METRIC AXIOMS
    # ═══════════════════════════════════════════════════════════════
    "metric_slack": 1e-12,
    "polygon_metric_slack": 1e-10,
    "geodesic_slack": 1e-10,
    "conditioning": 1e-12,

    # ═══════════════════════════════════════════════════════════════
    # CONSTRAINT SETS
    # ═══════════════════════════════════════════════════════════════
    "area": 1e-12,
    "tangency": 1e-8,
    "constraint_construction": 1e-12,
    "constraint_path": 1e-9,
    "convexity": 1e-12,
    "development_area": 1e-10,
    "polygon_adjust_warning": 1e-9,

    # ═══════════════════════════════════════════════════════════════
    # NUMERICAL METHODS
    # ═══════════════════════════════════════════════════════════════
    "quadrature": 1e-6,
    "optimizer": 1e-9,
    "velocity_step": 1e-5,
    "chart_step": 1e-6,

    # ═══════════════════════════════════════════════════════════════
    # SEQUENCE DIAGNOSTICS
    # ═══════════════════════════════════════════════════════════════
    "forward_probe": 1e-6,
    "reverse_probe": 1e-2,
}

DEFAULTS: Dict[str, Any] = {
    "seed": 0,
    "grid": 20,
    "window": 10,
    "waypoints": 6,
    "restarts": 2,
    "workers": 1,
    "max_sweeps": 25,
    "segment_nodes": 5,
    "quadrature_limit": 200,
    "max_polygon_sides": 12,
}


class RunSettings(BaseModel):
    """Explicit run configuration assembled from CLI flags only."""
    seed: int = Field(default=DEFAULTS["seed"], description="Seed for every random draw")
    tol: float = Field(default=TOLERANCES["quadrature"], gt=0, description="Quadrature tolerance")
    grid: int = Field(default=DEFAULTS["grid"], ge=2, description="Sample grid size")
    workers: int = Field(default=DEFAULTS["workers"], ge=1)
    log_level: str = "WARNING"


# ═══════════════════════════════════════════════════════════════════════════
# UTILITY FUNCTIONS
# ═══════════════════════════════════════════════════════════════════════════

def get_tolerance(name: str) -> float:
    if name not in TOLERANCES:
        raise InvalidArgumentError(f"Unknown tolerance: {name}")
    return TOLERANCES[name]


def get_default(name: str) -> Any:
    if name not in DEFAULTS:
        raise InvalidArgumentError(f"Unknown default: {name}")
    return DEFAULTS[name]


def resolve(value: Optional[float], name: str) -> float:
    """Return value, or the registered tolerance when value is None."""
    return get_tolerance(name) if value is None else value


def list_tolerances() -> List[str]:
    return sorted(TOLERANCES)
