# stretch_metric/experiments.py
"""
Experiments
===========
Seeded numerical experiments: the degenerating quadrangles, the
convergence-symmetry probes, the quadrant unit ball, polygon path
metric bounds and completeness of the triangle space.

Each runner returns an ExperimentReport whose records depend only on
the parameters and the seed, so the CSV rendering is reproducible
byte for byte.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Callable, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, Field

from .errors import InvalidArgumentError
from .polygon import PolygonShape, eta_avg, eta_sup, path_metric_search
from .quadrant import QuadrantPoint, finsler_star, sample_unit_ball, unit_ball
from .serialization import records_csv, unit_ball_svg
from .settings import RunSettings, TOLERANCES
from .surface import eta_T, example_incomplete_sequence, surface_area, surface_metric
from .triangle_space import (
    TrianglePoint,
    d_max,
    eta,
    max_log_distance,
    random_point,
    triangle_metric,
)
from .weak_metric import EVIDENCE_LABEL, cauchy_diagnose, convergence_symmetry_probe

logger = logging.getLogger("stretch-metric.experiments")


class ExperimentReport(BaseModel):
    """Self-describing outcome of one experiment run."""
    experiment: str
    parameters: Dict[str, Any] = Field(default_factory=dict)
    records: List[Dict[str, Any]] = Field(default_factory=list)
    summary: Dict[str, Any] = Field(default_factory=dict)
    verdicts: Dict[str, bool] = Field(default_factory=dict)
    metadata: Dict[str, Any] = Field(default_factory=dict)
    artifacts: Dict[str, str] = Field(default_factory=dict, description="Named text artifacts, e.g. SVG")

    @property
    def passed(self) -> bool:
        return all(self.verdicts.values())

    def to_csv(self) -> str:
        return records_csv(self.records)


def _pool_map(function: Callable[[int], Any], count: int, workers: int) -> List[Any]:
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(function, range(count)))
    return [function(i) for i in range(count)]


def _int_grid(values: Any) -> List[int]:
    if isinstance(values, str):
        values = [v for v in values.split(",") if v.strip()]
    return [int(float(v)) for v in values]


# ═══════════════════════════════════════════════════════════════════════════
# RUNNERS
# ═══════════════════════════════════════════════════════════════════════════

def run_incomplete_example(params: Dict[str, Any], settings: RunSettings) -> ExperimentReport:
    """Unit-area quadrangles with a collapsing face: a forward Cauchy sequence with no limit."""
    grid = _int_grid(params["n_grid"])
    records = []
    for n in grid:
        q, q_prime = example_incomplete_sequence(n)
        records.append({
            "n": n,
            "area_q": surface_area(q),
            "area_q_prime": surface_area(q_prime),
            "eta_q_to_q_prime": eta_T(q, q_prime),
            "eta_q_prime_to_q": eta_T(q_prime, q),
            "min_slot_q": float(np.min(q.values)),
        })

    lo, hi = _int_grid(params["cauchy_range"])
    labels = sorted({int(round(n)) for n in np.geomspace(lo, hi, int(params["cauchy_terms"]))})
    sequence = [example_incomplete_sequence(n)[0] for n in labels]
    metric = surface_metric(sequence[0].triangulation)
    diagnostics = cauchy_diagnose(metric, sequence, int(params["window"]), labels, float(params["cauchy_tol"]))
    for label, forward, backward in zip(diagnostics.checkpoints, diagnostics.forward_defects,
                                        diagnostics.backward_defects):
        records.append({"n": label, "forward_defect": forward, "backward_defect": backward})

    last = records[len(grid) - 1]
    log4 = math.log(4.0)
    forward = diagnostics.forward_defects
    return ExperimentReport(
        experiment="incomplete-example",
        records=records,
        summary={
            "log4": log4,
            "forward_defect_first": forward[0],
            "forward_defect_last": forward[-1],
            "backward_defect_last": diagnostics.backward_defects[-1],
            "min_slot_at_range_end": float(np.min(sequence[-1].values)),
            "label": EVIDENCE_LABEL,
        },
        verdicts={
            "unit_area": all(abs(r[k] - 1.0) <= TOLERANCES["area"]
                             for r in records[:len(grid)] for k in ("area_q", "area_q_prime")),
            "forward_distance_near_log4": abs(last["eta_q_to_q_prime"] - log4) <= 5e-4,
            "reverse_distance_near_zero": last["eta_q_prime_to_q"] <= 5e-4,
            "forward_defects_non_increasing": all(b <= a for a, b in zip(forward, forward[1:])),
            "numerically_forward_cauchy": diagnostics.forward_cauchy,
            "not_backward_cauchy": not diagnostics.backward_cauchy,
            "face_degenerates": float(np.min(sequence[-1].values)) < 1e-7,
        },
    )


def run_convergence_symmetry(params: Dict[str, Any], settings: RunSettings) -> ExperimentReport:
    """Quadrangle pairs break convergence-symmetry; triangle pairs keep it."""
    records = []

    surface_grid = _int_grid(params["surface_grid"])
    surface_pairs = [tuple(reversed(example_incomplete_sequence(n))) for n in surface_grid]
    surface_report = convergence_symmetry_probe(surface_metric(surface_pairs[0][0].triangulation), surface_pairs)
    for n, forward, reverse in zip(surface_grid, surface_report.forward_trace, surface_report.reverse_trace):
        records.append({"family": "quadrangle", "n": n, "forward": forward, "reverse": reverse})

    rng = np.random.default_rng(settings.seed)
    base = random_point(rng)
    direction = rng.uniform(-1.0, 1.0, 3)
    triangle_grid = _int_grid(params["triangle_grid"])
    triangle_pairs = [
        (base, TrianglePoint.normalized(base.as_array() * (1.0 + direction / n))) for n in triangle_grid
    ]
    triangle_report = convergence_symmetry_probe(triangle_metric(), triangle_pairs)
    for n, forward, reverse in zip(triangle_grid, triangle_report.forward_trace, triangle_report.reverse_trace):
        records.append({"family": "triangle", "n": n, "forward": forward, "reverse": reverse})

    return ExperimentReport(
        experiment="convergence-symmetry",
        records=records,
        summary={
            "quadrangle_reverse_last": surface_report.reverse_trace[-1],
            "triangle_reverse_last": triangle_report.reverse_trace[-1],
            "forward_tolerance": surface_report.forward_tolerance,
            "reverse_threshold": surface_report.reverse_threshold,
            "label": EVIDENCE_LABEL,
        },
        verdicts={
            "quadrangle_violation_flagged": surface_report.violation,
            "triangle_no_violation": not triangle_report.violation,
            "triangle_reverse_vanishes": triangle_report.reverse_trace[-1] < surface_report.forward_tolerance * 10,
        },
    )


def run_unit_ball(params: Dict[str, Any], settings: RunSettings) -> ExperimentReport:
    """Vertices of the quadrant unit ball and sampled interior points."""
    p = QuadrantPoint(float(params["a1"]), float(params["a2"]))
    ball = unit_ball(p)
    records = [
        {"vertex": name, "x": x, "y": y, "finsler_star": finsler_star(p, x, y)}
        for name, (x, y) in zip("UVW", ball.vertices())
    ]
    samples = int(params["samples"])
    sampled = sample_unit_ball(p, samples, np.random.default_rng(settings.seed))
    return ExperimentReport(
        experiment="unit-ball",
        records=records,
        summary={"interior_samples": sampled.count, "interior_max": sampled.max_value},
        verdicts={
            "vertices_on_sphere": all(abs(r["finsler_star"] - 1.0) <= 1e-10 for r in records),
            "interior_below_one": sampled.inside,
            "right_angle_at_U": ball.V[1] == ball.U[1] and ball.W[0] == ball.U[0],
        },
        artifacts={"svg": unit_ball_svg(ball)},
    )


def run_polygon_bounds(params: Dict[str, Any], settings: RunSettings) -> ExperimentReport:
    """Chart distances against minimized path lengths for random polygon pairs."""
    n = int(params["n"])
    pairs = int(params["pairs"])
    which = str(params["which"])
    kinds = ["sup", "avg"] if which == "both" else [which]
    rng = np.random.default_rng(settings.seed)
    shapes = [(PolygonShape.random(n, rng), PolygonShape.random(n, rng)) for _ in range(pairs)]

    def one(index: int) -> Dict[str, Any]:
        X, Y = shapes[index]
        record: Dict[str, Any] = {"pair": index}
        for kind in kinds:
            lower = eta_sup(X, Y) if kind == "sup" else eta_avg(X, Y)
            found = path_metric_search(X, Y, kind, waypoints=int(params["waypoints"]),
                                       restarts=int(params["restarts"]), seed=settings.seed + index,
                                       tol=settings.tol)
            record[f"eta_{kind}"] = lower
            record[f"path_upper_{kind}"] = found.upper_bound
            record[f"ratio_{kind}"] = found.upper_bound / lower if lower > 0.0 else float("nan")
        return record

    records = _pool_map(one, pairs, settings.workers)
    slack = TOLERANCES["quadrature"]
    verdicts = {
        f"upper_above_chart_distance_{kind}": all(
            r[f"path_upper_{kind}"] >= r[f"eta_{kind}"] - slack for r in records
        )
        for kind in kinds
    }
    summary = {
        f"max_ratio_{kind}": max(r[f"ratio_{kind}"] for r in records) for kind in kinds
    }
    summary["label"] = EVIDENCE_LABEL
    return ExperimentReport(experiment="polygon-bounds", records=records, summary=summary, verdicts=verdicts)


def run_completeness_t1(params: Dict[str, Any], settings: RunSettings) -> ExperimentReport:
    """Isometry with the max-log metric, and limits of forward Cauchy sequences."""
    rng = np.random.default_rng(settings.seed)
    pairs = int(params["pairs"])
    exact = 0
    for _ in range(pairs):
        X, Y = random_point(rng), random_point(rng)
        exact += d_max(X, Y) == max_log_distance(X, Y)

    records = []
    terms = int(params["terms"])
    for index in range(int(params["sequences"])):
        limit = random_point(rng)
        direction = rng.uniform(-1.0, 1.0, 3)
        sequence = [
            TrianglePoint.normalized(limit.as_array() * np.exp(direction * 2.0 ** -k)) for k in range(1, terms + 1)
        ]
        diagnostics = cauchy_diagnose(triangle_metric(), sequence, min(10, terms))
        error = float(np.max(np.abs(sequence[-1].as_array() - limit.as_array())))
        records.append({
            "sequence": index,
            "limit_error": error,
            "forward_defect": diagnostics.forward_defects[-1],
            "backward_defect": diagnostics.backward_defects[-1],
            "eta_to_limit": eta(sequence[-1], limit),
        })

    return ExperimentReport(
        experiment="completeness-T1",
        records=records,
        summary={"isometry_pairs": pairs, "isometry_exact": exact, "label": EVIDENCE_LABEL},
        verdicts={
            "isometry_identity_exact": exact == pairs,
            "sequences_converge": all(r["limit_error"] <= 1e-8 for r in records),
        },
    )


# ═══════════════════════════════════════════════════════════════════════════
# REGISTRY
# ═══════════════════════════════════════════════════════════════════════════

EXPERIMENTS: Dict[str, Dict[str, Any]] = {
    "incomplete-example": {
        "description": "Collapsing quadrangles: eta limits log 4 and 0, forward Cauchy without limit",
        "defaults": {
            "n_grid": "100,1000,10000",
            "cauchy_range": "1000,10000",
            "cauchy_terms": 40,
            "window": 10,
            "cauchy_tol": 1e-3,
        },
        "runner": run_incomplete_example,
    },
    "convergence-symmetry": {
        "description": "Reverse traces for quadrangle pairs (violation) and triangle pairs (none)",
        "defaults": {
            "surface_grid": "100,1000,10000,100000,1000000",
            "triangle_grid": "10,100,1000,10000,100000,1000000,10000000",
        },
        "runner": run_convergence_symmetry,
    },
    "unit-ball": {
        "description": "Unit ball triangle of the quadrant Finsler norm, with SVG",
        "defaults": {"a1": 1.0, "a2": 1.0, "samples": 1000},
        "runner": run_unit_ball,
    },
    "polygon-bounds": {
        "description": "Chart distance vs minimized path length on random polygon pairs",
        "defaults": {"n": 5, "pairs": 20, "which": "sup", "waypoints": 5, "restarts": 1},
        "runner": run_polygon_bounds,
    },
    "completeness-T1": {
        "description": "Max-log isometry and convergence of forward Cauchy triangle sequences",
        "defaults": {"pairs": 10000, "sequences": 20, "terms": 40},
        "runner": run_completeness_t1,
    },
}


def list_experiments() -> List[str]:
    return list(EXPERIMENTS)


def get_experiment(name: str) -> Dict[str, Any]:
    if name not in EXPERIMENTS:
        raise InvalidArgumentError(f"Unknown experiment '{name}'; choose from {', '.join(EXPERIMENTS)}")
    return EXPERIMENTS[name]


def run_experiment(name: str, params: Optional[Dict[str, Any]] = None,
                   settings: Optional[RunSettings] = None) -> ExperimentReport:
    entry = get_experiment(name)
    settings = settings or RunSettings()
    unknown = set(params or {}) - set(entry["defaults"])
    if unknown:
        raise InvalidArgumentError(f"Unknown parameters for {name}: {', '.join(sorted(unknown))}")
    merged = {**entry["defaults"], **(params or {})}
    logger.info(f"Running {name} with seed {settings.seed}")
    report = entry["runner"](merged, settings)
    report.parameters = merged
    report.metadata = {
        "seed": settings.seed,
        "settings": settings.model_dump(),
        "tolerances": dict(TOLERANCES),
    }
    if not report.passed:
        failed = [k for k, ok in report.verdicts.items() if not ok]
        logger.warning(f"{name}: verdicts failed: {', '.join(failed)}")
    return report
