# stretch_metric/finsler_paths.py
"""
Finsler Paths
=============
Length of parametrized paths under a Finsler evaluator, and a
discretized search for short paths between two points.

Points travel through this module as flat numpy arrays. A PathSpace
says how to normalize, interpolate, measure and perturb them; the
minimizer itself knows nothing about triangles or polygons.

Lengths returned by minimize_length are upper bounds on the path
metric, never certified minima.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from functools import lru_cache
from typing import Callable, List, Literal, Optional, Sequence, Tuple

import numpy as np
from scipy.integrate import quad
from scipy.optimize import minimize_scalar

from .errors import DomainError, InvalidArgumentError, NumericalFailureError
from .settings import get_default, get_tolerance, resolve
from .surface import SurfacePoint, SurfaceTangent, Triangulation, edge_lengths, finsler_T, geodesic_T
from .triangle import TriCoords, log_ratio_max
from .triangle_space import TangentVector, TrianglePoint, finsler_norm

logger = logging.getLogger("stretch-metric.finsler_paths")

# objective value for steps that leave the space
_REJECTED = 1e6

FinslerEvaluator = Callable[[np.ndarray, np.ndarray], float]


# ═══════════════════════════════════════════════════════════════════════════
# PATHS
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class ParamPath:
    """A path on [0, 1], smooth between its breakpoints."""
    evaluator: Callable[[float], np.ndarray]
    breakpoints: Tuple[float, ...] = ()
    smoothness: Literal["smooth", "piecewise"] = "smooth"

    def __post_init__(self):
        points = self.breakpoints
        if any(not 0.0 < b < 1.0 for b in points) or any(b >= c for b, c in zip(points, points[1:])):
            raise InvalidArgumentError(f"Breakpoints must be sorted inside (0, 1), got {points}")
        if points and self.smoothness == "smooth":
            object.__setattr__(self, "smoothness", "piecewise")

    def __call__(self, t: float) -> np.ndarray:
        return np.asarray(self.evaluator(t), dtype=float)

    def pieces(self) -> List[Tuple[float, float]]:
        edges = (0.0,) + self.breakpoints + (1.0,)
        return list(zip(edges, edges[1:]))


def velocity(c: ParamPath, t: float, lo: float, hi: float, h: float) -> np.ndarray:
    """Second-order finite difference of c at t, never stepping outside [lo, hi]."""
    h = min(h, (hi - lo) / 4.0)
    if t - h >= lo and t + h <= hi:
        return (c(t + h) - c(t - h)) / (2.0 * h)
    if t - h < lo:
        return (-3.0 * c(t) + 4.0 * c(t + h) - c(t + 2.0 * h)) / (2.0 * h)
    return (3.0 * c(t) - 4.0 * c(t - h) + c(t - 2.0 * h)) / (2.0 * h)


def path_length(F: FinslerEvaluator, c: ParamPath, tol: Optional[float] = None,
                limit: Optional[int] = None) -> float:
    """
    Integral of F(c(t), c'(t)) over [0, 1], one adaptive quadrature per
    smooth piece. The summed error estimate stays below tol or a
    NumericalFailureError carrying the partial sum is raised.
    """
    tol = resolve(tol, "quadrature")
    if tol <= 0.0:
        raise InvalidArgumentError(f"Tolerance must be positive, got {tol}")
    limit = limit or get_default("quadrature_limit")
    h = get_tolerance("velocity_step")
    pieces = c.pieces()
    budget = tol / len(pieces)

    total, error = 0.0, 0.0
    for lo, hi in pieces:
        def integrand(t: float, lo: float = lo, hi: float = hi) -> float:
            return F(c(t), velocity(c, t, lo, hi, h))

        result = quad(integrand, lo, hi, epsabs=budget, epsrel=0.0, limit=limit, full_output=1)
        value, abserr = result[0], result[1]
        total += value
        error += abserr
        if abserr > budget or not math.isfinite(value):
            raise NumericalFailureError(
                f"Quadrature on [{lo:.6g}, {hi:.6g}] stalled at error {abserr:.3e} (budget {budget:.1e})",
                partial_estimate=total,
                error_estimate=error,
            )
        if len(result) > 3:
            logger.debug(f"Quadrature note on [{lo:.6g}, {hi:.6g}]: {result[3]}")
    return total


# ═══════════════════════════════════════════════════════════════════════════
# PATH SPACES
# ═══════════════════════════════════════════════════════════════════════════

class PathSpace:
    """How a space normalizes, joins, measures and perturbs flat point arrays."""

    name = "abstract"
    step = 0.1

    def normalize(self, x: np.ndarray) -> np.ndarray:
        raise NotImplementedError

    def is_feasible(self, x: np.ndarray) -> bool:
        raise NotImplementedError

    def interpolate(self, a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
        raise NotImplementedError

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        raise NotImplementedError

    def finsler(self, x: np.ndarray, v: np.ndarray) -> float:
        raise NotImplementedError

    def free_coordinates(self, x: np.ndarray) -> Sequence[int]:
        raise NotImplementedError

    def perturb(self, x: np.ndarray, index: int, delta: float) -> Optional[np.ndarray]:
        """Move one free coordinate; None when the result leaves the space."""
        raise NotImplementedError

    def initial_paths(self, a: np.ndarray, b: np.ndarray, k: int) -> List[List[np.ndarray]]:
        return [[self.interpolate(a, b, s) for s in np.linspace(0.0, 1.0, k)]]

    def segment_feasible(self, a: np.ndarray, b: np.ndarray) -> bool:
        return all(self.is_feasible(self.interpolate(a, b, s)) for s in (0.25, 0.5, 0.75))


class TrianglePathSpace(PathSpace):
    """Unit-area triangles as length-3 arrays, joined by log-linear segments."""

    name = "triangle"

    def normalize(self, x: np.ndarray) -> np.ndarray:
        return TrianglePoint.normalized(x).as_array()

    def is_feasible(self, x: np.ndarray) -> bool:
        return bool(np.all(np.isfinite(x)) and np.all(x > 0.0))

    def interpolate(self, a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
        return self.normalize(a ** (1.0 - s) * b ** s)

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        return log_ratio_max(a, b)

    def finsler(self, x: np.ndarray, v: np.ndarray) -> float:
        # finite-difference velocities are only tangent up to truncation error
        return finsler_norm(TangentVector.project(TrianglePoint(TriCoords.from_array(x)), v))

    def free_coordinates(self, x: np.ndarray) -> Sequence[int]:
        return range(3)

    def perturb(self, x: np.ndarray, index: int, delta: float) -> Optional[np.ndarray]:
        moved = np.array(x, dtype=float)
        moved[index] *= math.exp(delta)
        return self.normalize(moved)


class SurfacePathSpace(PathSpace):
    """Unit-area surface points as flattened slot arrays; free coordinates are edge lengths."""

    name = "surface"

    def __init__(self, triangulation: Triangulation):
        self.triangulation = triangulation

    def point(self, x: np.ndarray, tolerance: float = 0.0) -> SurfacePoint:
        return SurfacePoint(self.triangulation, np.reshape(x, (-1, 3)), tolerance or get_tolerance("constraint_path"))

    def normalize(self, x: np.ndarray) -> np.ndarray:
        point = self.point(x)
        return (point.values * point.area ** -0.5).ravel()

    def is_feasible(self, x: np.ndarray) -> bool:
        try:
            self.point(x)
        except DomainError:
            return False
        return True

    def interpolate(self, a: np.ndarray, b: np.ndarray, s: float) -> np.ndarray:
        return geodesic_T(self.point(a), self.point(b))(float(s)).flat()

    def distance(self, a: np.ndarray, b: np.ndarray) -> float:
        return log_ratio_max(a, b)

    def finsler(self, x: np.ndarray, v: np.ndarray) -> float:
        return finsler_T(SurfaceTangent.project(self.point(x), v))

    def free_coordinates(self, x: np.ndarray) -> Sequence[int]:
        return range(self.triangulation.edge_count)

    def perturb(self, x: np.ndarray, index: int, delta: float) -> Optional[np.ndarray]:
        lengths = edge_lengths(self.point(x))
        lengths[index] *= math.exp(delta)
        try:
            moved = SurfacePoint.from_edge_lengths(self.triangulation, lengths)
        except DomainError:
            return None
        return self.normalize(moved.flat())


# ═══════════════════════════════════════════════════════════════════════════
# DISCRETE PATHS & MINIMIZATION
# ═══════════════════════════════════════════════════════════════════════════

@dataclass(frozen=True)
class DiscretePath:
    """Waypoints joined by the space's segment rule."""
    space: PathSpace
    waypoints: Tuple[np.ndarray, ...]

    def __post_init__(self):
        if len(self.waypoints) < 2:
            raise InvalidArgumentError("A discrete path needs at least two waypoints")

    def chord_length(self) -> float:
        return sum(self.space.distance(a, b) for a, b in zip(self.waypoints, self.waypoints[1:]))

    def as_param_path(self) -> ParamPath:
        segments = len(self.waypoints) - 1

        def evaluate(t: float) -> np.ndarray:
            k = min(int(t * segments), segments - 1)
            return self.space.interpolate(self.waypoints[k], self.waypoints[k + 1], t * segments - k)

        return ParamPath(evaluate, tuple(k / segments for k in range(1, segments)))

    def segment_lengths(self) -> List[float]:
        """Gauss-Legendre estimate of each segment's Finsler length."""
        return [segment_length(self.space, a, b) for a, b in zip(self.waypoints, self.waypoints[1:])]

    def discrete_length(self) -> float:
        return sum(self.segment_lengths())


def segment_length(space: PathSpace, a: np.ndarray, b: np.ndarray, nodes: Optional[int] = None) -> float:
    """
    Finsler length of the segment a -> b by Gauss-Legendre quadrature
    on its own parameter, velocities by central differences.
    """
    s, weights = _gauss_nodes(nodes or get_default("segment_nodes"))
    h = get_tolerance("velocity_step")
    total = 0.0
    for node, weight in zip(s, weights):
        point = space.interpolate(a, b, node)
        v = (space.interpolate(a, b, node + h) - space.interpolate(a, b, node - h)) / (2.0 * h)
        total += weight * space.finsler(point, v)
    return float(total)


@lru_cache(maxsize=None)
def _gauss_nodes(count: int) -> Tuple[Tuple[float, ...], Tuple[float, ...]]:
    x, w = np.polynomial.legendre.leggauss(count)
    return tuple((x + 1.0) / 2.0), tuple(w / 2.0)


def refinement_schedule(k: int) -> List[int]:
    """Waypoint counts visited on the way to k; the schedule for 2k extends the one for k."""
    return refinement_schedule(k // 2) + [k] if k >= 4 else [k]


def embed_path(space: PathSpace, waypoints: Sequence[np.ndarray], k: int) -> List[np.ndarray]:
    """Insert points along the existing segments until there are k waypoints; the curve is unchanged."""
    segments = len(waypoints) - 1
    extra = k - len(waypoints)
    if extra < 0:
        raise InvalidArgumentError(f"Cannot embed {len(waypoints)} waypoints into {k}")
    result = [waypoints[0]]
    for index, (a, b) in enumerate(zip(waypoints, waypoints[1:])):
        inserted = extra // segments + (1 if index < extra % segments else 0)
        result.extend(space.interpolate(a, b, j / (inserted + 1)) for j in range(1, inserted + 1))
        result.append(b)
    return result


@dataclass(frozen=True)
class MinimizationResult:
    path: DiscretePath
    upper_bound: float
    chord_length: float
    best_restart: int
    restarts: int
    sweeps: int
    infeasible_initial: bool = False
    levels: Tuple[int, ...] = ()


def _piece(space: PathSpace, a: np.ndarray, b: np.ndarray) -> float:
    try:
        return segment_length(space, a, b)
    except DomainError:
        return math.inf


def _descend(space: PathSpace, waypoints: List[np.ndarray], max_sweeps: int,
             opt_tol: float) -> Tuple[List[np.ndarray], float, int]:
    """
    Cyclic coordinate descent on the discretized Finsler length, one
    bounded scalar line search per free coordinate of each interior waypoint.
    """
    w = [np.array(p, dtype=float) for p in waypoints]
    pieces = [_piece(space, a, b) for a, b in zip(w, w[1:])]
    step = space.step
    sweeps = 0
    for sweeps in range(1, max_sweeps + 1):
        gained = 0.0
        for k in range(1, len(w) - 1):
            for index in space.free_coordinates(w[k]):
                before = pieces[k - 1] + pieces[k]

                def objective(delta: float, k: int = k, index: int = index) -> float:
                    moved = space.perturb(w[k], index, delta)
                    if moved is None or not space.is_feasible(moved):
                        return _REJECTED + abs(delta)
                    return min(_piece(space, w[k - 1], moved) + _piece(space, moved, w[k + 1]), _REJECTED)

                found = minimize_scalar(objective, bounds=(-step, step), method="bounded",
                                        options={"xatol": opt_tol})
                if found.fun < before - opt_tol:
                    moved = space.perturb(w[k], index, float(found.x))
                    if (moved is not None and space.segment_feasible(w[k - 1], moved)
                            and space.segment_feasible(moved, w[k + 1])):
                        w[k] = moved
                        pieces[k - 1] = _piece(space, w[k - 1], moved)
                        pieces[k] = _piece(space, moved, w[k + 1])
                        gained += before - pieces[k - 1] - pieces[k]
        if gained < opt_tol:
            step /= 2.0
            if step < 1e-4:
                break
    return w, sum(pieces), sweeps


def _jitter(space: PathSpace, waypoints: List[np.ndarray], rng: np.random.Generator) -> List[np.ndarray]:
    jittered = [waypoints[0]]
    for point in waypoints[1:-1]:
        moved = point
        for index in space.free_coordinates(point):
            candidate = space.perturb(moved, index, float(rng.normal(0.0, space.step / 4.0)))
            if candidate is not None and space.is_feasible(candidate):
                moved = candidate
        jittered.append(moved)
    jittered.append(waypoints[-1])
    ok = all(space.segment_feasible(a, b) for a, b in zip(jittered, jittered[1:]))
    return jittered if ok else list(waypoints)


def _feasible(space: PathSpace, path: List[np.ndarray]) -> bool:
    return (all(space.is_feasible(p) for p in path)
            and all(space.segment_feasible(a, b) for a, b in zip(path, path[1:])))


def _minimize_level(space: PathSpace, x: np.ndarray, y: np.ndarray, k: int,
                    coarser: Optional[MinimizationResult], restarts: int, seed: int, workers: int,
                    max_sweeps: int, opt_tol: float, tol: Optional[float]) -> Optional[MinimizationResult]:
    candidates = [path for path in space.initial_paths(x, y, k) if _feasible(space, path)]
    if coarser is not None:
        embedded = embed_path(space, list(coarser.path.waypoints), k)
        if _feasible(space, embedded):
            candidates.append(embedded)
    if not candidates:
        return coarser

    best_initial = min(candidates, key=lambda path: sum(_piece(space, a, b) for a, b in zip(path, path[1:])))

    def run(restart: int) -> Tuple[List[np.ndarray], float, int]:
        start = best_initial
        if restart > 0:
            start = _jitter(space, best_initial, np.random.default_rng([seed, k, restart]))
        return _descend(space, start, max_sweeps, opt_tol)

    indices = range(restarts + 1)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(run, indices))
    else:
        outcomes = [run(r) for r in indices]

    best = min(range(len(outcomes)), key=lambda r: (outcomes[r][1], r))
    final, discrete, sweeps = outcomes[best]
    path = DiscretePath(space, tuple(final))
    upper = path_length(space.finsler, path.as_param_path(), tol)
    logger.debug(f"{space.name}: {k} waypoints, discrete {discrete:.9f}, length {upper:.9f}")
    if coarser is not None and coarser.upper_bound <= upper:
        return coarser
    return MinimizationResult(path, upper, path.chord_length(), best, restarts + 1, sweeps)


def minimize_length(
    space: PathSpace,
    X: np.ndarray,
    Y: np.ndarray,
    waypoints: Optional[int] = None,
    restarts: Optional[int] = None,
    seed: Optional[int] = None,
    tol: Optional[float] = None,
    workers: Optional[int] = None,
    max_sweeps: Optional[int] = None,
) -> MinimizationResult:
    """
    Shorten a discrete path from X to Y by coordinate descent on its
    discretized Finsler length, then integrate the length of the result.

    The search runs over refinement_schedule(waypoints). Each level starts
    from the space's initial paths and from the previous level's best path
    with points inserted along it, and a level only replaces the previous
    result when its integrated length is strictly smaller. The returned
    path may therefore have fewer waypoints than requested; the upper
    bound never grows when waypoints is doubled.

    Restart 0 descends from the best initial path; restart r > 0
    descends from a jittered copy drawn from default_rng([seed, level, r]).
    The shortest discretized length wins, ties going to the lowest restart.
    chord_length is the sum of the space's distances between waypoints,
    reported as a lower-bound diagnostic.
    """
    k = waypoints if waypoints is not None else get_default("waypoints")
    restarts = restarts if restarts is not None else get_default("restarts")
    seed = seed if seed is not None else get_default("seed")
    workers = workers or get_default("workers")
    max_sweeps = max_sweeps or get_default("max_sweeps")
    opt_tol = get_tolerance("optimizer")
    if k < 2:
        raise InvalidArgumentError(f"Need at least two waypoints, got {k}")
    if restarts < 0:
        raise InvalidArgumentError(f"restarts must be non-negative, got {restarts}")

    x, y = space.normalize(np.asarray(X, dtype=float)), space.normalize(np.asarray(Y, dtype=float))
    schedule = refinement_schedule(k)
    result: Optional[MinimizationResult] = None
    for level in schedule:
        result = _minimize_level(space, x, y, level, result, restarts, seed, workers, max_sweeps, opt_tol, tol)

    if result is None:
        logger.warning(f"No feasible initial path in {space.name} space; returning the interpolated path")
        path = DiscretePath(space, tuple(space.initial_paths(x, y, k)[0]))
        return MinimizationResult(path, path_length(space.finsler, path.as_param_path(), tol),
                                  path.chord_length(), 0, 0, 0, infeasible_initial=True, levels=tuple(schedule))

    logger.info(
        f"{space.name}: length {result.upper_bound:.9f} with {len(result.path.waypoints)} waypoints "
        f"(restart {result.best_restart} of {restarts + 1})"
    )
    return replace(result, levels=tuple(schedule))
