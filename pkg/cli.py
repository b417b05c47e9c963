"""
Stretch Metric - Command Line
=============================
Distances, geodesics, Finsler norms, unit balls and seeded experiments
from the terminal. Points are read as JSON (a file path, or '-' for
stdin); tables are written as CSV and figures as SVG.

Usage:
    python cli.py distance --space triangle x.json y.json --raw
    python cli.py --grid 11 geodesic --space surface p.json q.json -o path.csv
    python cli.py norm --space quadrant v.json --t 0.5
    python cli.py unit-ball --point 1 1 -o ball.svg
    python cli.py --seed 7 experiment incomplete-example --param n_grid=100,1000
"""

import argparse
import json
import logging
import sys
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import ValidationError

from stretch_metric import (
    EXIT_OK,
    QuadrantPoint,
    RunSettings,
    StretchMetricError,
    SurfaceTangent,
    TangentVector,
    TrianglePoint,
    eta,
    eta_T,
    eta_T_family_arith,
    eta_T_family_max,
    eta_avg,
    eta_family_arith,
    eta_family_max,
    eta_star,
    eta_sup,
    exit_code_for,
    finsler_avg,
    finsler_family_arith,
    finsler_family_max,
    finsler_norm,
    finsler_star,
    finsler_star_pushed,
    finsler_sup,
    finsler_T,
    finsler_T_family,
    geodesic,
    geodesic_T,
    list_experiments,
    normalize_unit_area,
    normalize_surface_area,
    phi,
    phi_inverse,
    run_experiment,
    unit_ball,
    verify_geodesic,
    verify_geodesic_T,
)
from stretch_metric.errors import InvalidArgumentError
from stretch_metric.serialization import (
    PolygonInput,
    QuadrantInput,
    SurfaceInput,
    TriangleInput,
    csv_text,
    load_json,
    unit_ball_svg,
    write_text_atomic,
)

# ANSI colors for stderr messages
GREEN = "\033[92m"
YELLOW = "\033[93m"
RED = "\033[91m"
RESET = "\033[0m"

SPACES = ("triangle", "quadrant", "surface", "polygon")

logger = logging.getLogger("stretch-metric.cli")


def _fail(message: str) -> None:
    print(f"{RED}Error:{RESET} {message}", file=sys.stderr)


def _check_t(values: List[float]) -> List[float]:
    for t in values:
        if not 0.0 <= t <= 1.0:
            raise InvalidArgumentError(f"Family parameter t must lie in [0, 1], got {t}")
    return values


# ═══════════════════════════════════════════════════════════════════════════
# INPUT
# ═══════════════════════════════════════════════════════════════════════════

def _load_point(space: str, source: str, raw: bool = False) -> Tuple[Any, Any, float]:
    """Return (point, input model, scale applied to reach unit area)."""
    data = load_json(source)
    if space == "triangle":
        model = TriangleInput.model_validate(data)
        coords = model.to_coords()
        if raw:
            return coords, model, 1.0
        unit, scale = normalize_unit_area(coords)
        if scale != 1.0:
            logger.info(f"{source}: rescaled by {scale:.6g} to unit area")
        return TrianglePoint(unit), model, scale
    if space == "quadrant":
        model = QuadrantInput.model_validate(data)
        return model.to_point(), model, 1.0
    if space == "surface":
        model = SurfaceInput.model_validate(data)
        point = model.to_point()
        if raw:
            return point, model, 1.0
        unit, scale = normalize_surface_area(point)
        if scale != 1.0:
            logger.info(f"{source}: rescaled by {scale:.6g} to unit area")
        return unit, model, scale
    model = PolygonInput.model_validate(data)
    return model.to_shape(), model, 1.0


def _emit(text: str, output: Optional[str]) -> None:
    write_text_atomic(output, text)


# ═══════════════════════════════════════════════════════════════════════════
# COMMANDS
# ═══════════════════════════════════════════════════════════════════════════

def _family_rows(ts: List[float], arith, maxed) -> List[Tuple[str, float]]:
    rows = []
    for t in ts:
        rows.append((f"arith_t={t:g}", arith(t)))
        rows.append((f"max_t={t:g}", maxed(t)))
    return rows


def cmd_distance(args: argparse.Namespace, settings: RunSettings) -> int:
    X, _, _ = _load_point(args.space, args.x, args.raw)
    Y, _, _ = _load_point(args.space, args.y, args.raw)
    ts = _check_t(args.t or [])

    rows: List[Tuple[str, float]] = []
    if args.space == "polygon":
        for kind, d in (("sup", eta_sup), ("avg", eta_avg)):
            forward, reverse = d(X, Y), d(Y, X)
            rows += [(f"eta_{kind}", forward), (f"eta_{kind}_reverse", reverse),
                     (f"eta_{kind}_arith", (forward + reverse) / 2.0),
                     (f"eta_{kind}_max", max(forward, reverse))]
        _emit(csv_text(["quantity", "value"], rows), args.output)
        return EXIT_OK

    if args.space == "triangle":
        d, arith, maxed = eta, eta_family_arith, eta_family_max
    elif args.space == "surface":
        d, arith, maxed = eta_T, eta_T_family_arith, eta_T_family_max
    else:
        d = eta_star
        arith = lambda t, p, q: (1.0 - t) * eta_star(p, q) + t * eta_star(q, p)  # noqa: E731
        maxed = lambda t, p, q: max((1.0 - t) * eta_star(p, q), t * eta_star(q, p))  # noqa: E731

    forward, reverse = d(X, Y), d(Y, X)
    rows += [("eta", forward), ("eta_reverse", reverse),
             ("eta_arith", (forward + reverse) / 2.0), ("eta_max", max(forward, reverse))]
    rows += _family_rows(ts, lambda t: arith(t, X, Y), lambda t: maxed(t, X, Y))
    _emit(csv_text(["quantity", "value"], rows), args.output)
    return EXIT_OK


def cmd_geodesic(args: argparse.Namespace, settings: RunSettings) -> int:
    if args.space == "polygon":
        raise InvalidArgumentError("No closed-form geodesics on polygon space; use 'experiment polygon-bounds'")
    X, _, _ = _load_point(args.space, args.x)
    Y, _, _ = _load_point(args.space, args.y)
    grid = settings.grid

    if args.space == "triangle":
        samples = geodesic(X, Y).samples(grid)
        verdict = verify_geodesic(samples)
        d = eta
        header = ["t", "A1", "A2", "A3"]
        coords = [p.as_array().tolist() for _, p in samples]
    elif args.space == "quadrant":
        path = geodesic(phi(X), phi(Y))
        triangle_samples = path.samples(grid)
        verdict = verify_geodesic(triangle_samples)
        samples = [(t, phi_inverse(p)) for t, p in triangle_samples]
        d = eta_star
        header = ["t", "A1", "A2"]
        coords = [list(p.as_tuple()) for _, p in samples]
    else:
        path = geodesic_T(X, Y)
        samples = path.samples(grid)
        verdict = verify_geodesic_T(samples)
        d = eta_T
        tri = X.triangulation
        header = ["t"] + [f"f{f}_{q}" for f in range(tri.face_count) for q in range(3)]
        coords = [p.flat().tolist() for _, p in samples]
        logger.info(f"Surface path built by {path.construction} interpolation")

    total = d(X, Y)
    cumulative = 0.0
    rows = []
    previous = X
    for (t, point), values in zip(samples, coords):
        cumulative += d(previous, point)
        residual = abs(d(X, point) + d(point, Y) - total)
        rows.append([t] + values + [cumulative, residual])
        previous = point
    if not verdict.is_geodesic:
        logger.warning(f"Sampled path fails the dominance criterion ({verdict.label})")
    _emit(csv_text(header + ["cumulative_distance", "additivity_residual"], rows), args.output)
    return EXIT_OK


def cmd_norm(args: argparse.Namespace, settings: RunSettings) -> int:
    base, model, scale = _load_point(args.space, args.input)
    ts = _check_t(args.t or [])
    if model.vector is None:
        raise InvalidArgumentError(f"{args.input}: a 'vector' field is required")

    if args.space == "triangle":
        v = TangentVector(base, tuple(scale * float(x) for x in model.vector))
        rows = [("F", finsler_norm(v)), ("F_reverse", finsler_norm(-v))]
        for t in ts:
            rows += [(f"arith_t={t:g}", finsler_family_arith(t, v)), (f"max_t={t:g}", finsler_family_max(t, v))]
    elif args.space == "quadrant":
        x, y = model.vector
        rows = [("F_star", finsler_star(base, x, y)), ("F_star_reverse", finsler_star(base, -x, -y)),
                ("F_pushed", finsler_star_pushed(base, x, y))]
    elif args.space == "surface":
        v = SurfaceTangent(base, scale * model.vector_array())
        rows = [("F", finsler_T(v)), ("F_reverse", finsler_T(-v))]
        rows += [(f"arith_t={t:g}", finsler_T_family(t, v)) for t in ts]
    else:
        v = np.array(model.vector, dtype=float)
        rows = [("F_sup", finsler_sup(base, v)), ("F_sup_reverse", finsler_sup(base, -v)),
                ("F_avg", finsler_avg(base, v)), ("F_avg_reverse", finsler_avg(base, -v))]
    _emit(csv_text(["quantity", "value"], rows), args.output)
    return EXIT_OK


def cmd_unit_ball(args: argparse.Namespace, settings: RunSettings) -> int:
    if args.input:
        p = QuadrantInput.model_validate(load_json(args.input)).to_point()
    else:
        p = QuadrantPoint(*args.point)
    ball = unit_ball(p)
    if args.format == "svg":
        _emit(unit_ball_svg(ball), args.output)
    else:
        rows = [[name, x, y, finsler_star(p, x, y)] for name, (x, y) in zip("UVW", ball.vertices())]
        _emit(csv_text(["vertex", "x", "y", "F_star"], rows), args.output)
    return EXIT_OK


def _parse_params(items: List[str]) -> Dict[str, Any]:
    params: Dict[str, Any] = {}
    for item in items:
        if "=" not in item:
            raise InvalidArgumentError(f"Parameter '{item}' is not of the form key=value")
        key, value = item.split("=", 1)
        try:
            params[key] = json.loads(value)
        except json.JSONDecodeError:
            params[key] = value
    return params


def cmd_experiment(args: argparse.Namespace, settings: RunSettings) -> int:
    report = run_experiment(args.name, _parse_params(args.param or []), settings)
    if args.svg and "svg" not in report.artifacts:
        raise InvalidArgumentError(f"Experiment {args.name} produces no SVG")
    _emit(report.to_csv(), args.output)
    if args.svg:
        write_text_atomic(args.svg, report.artifacts["svg"])
    if args.report:
        write_text_atomic(args.report, report.model_dump_json(indent=2) + "\n")

    for name, ok in report.verdicts.items():
        mark = f"{GREEN}✅" if ok else f"{RED}❌"
        print(f"{mark} {name}{RESET}", file=sys.stderr)
    if not report.passed:
        print(f"{YELLOW}⚠️  {args.name}: some verdicts failed{RESET}", file=sys.stderr)
    return EXIT_OK


# ═══════════════════════════════════════════════════════════════════════════
# ARGUMENTS
# ═══════════════════════════════════════════════════════════════════════════

def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Asymmetric stretch metric on triangles, surfaces and polygons")
    parser.add_argument("--seed", type=int, default=0, help="Seed for every random draw")
    parser.add_argument("--tol", type=float, default=None, help="Quadrature tolerance")
    parser.add_argument("--grid", type=int, default=None, help="Samples along a geodesic")
    parser.add_argument("--workers", type=int, default=1, help="Worker threads for experiments")
    parser.add_argument("--log-level", default="WARNING", choices=["DEBUG", "INFO", "WARNING", "ERROR"])
    sub = parser.add_subparsers(dest="command", required=True)

    distance = sub.add_parser("distance", help="eta, its reverse, symmetrizations and families")
    distance.add_argument("x")
    distance.add_argument("y")
    distance.add_argument("--space", choices=SPACES, default="triangle")
    distance.add_argument("--raw", action="store_true", help="Skip unit-area normalization")
    distance.add_argument("--t", type=float, action="append", help="Family parameter (repeatable)")
    distance.add_argument("-o", "--output", default=None)
    distance.set_defaults(handler=cmd_distance)

    geo = sub.add_parser("geodesic", help="Sampled geodesic with cumulative distance")
    geo.add_argument("x")
    geo.add_argument("y")
    geo.add_argument("--space", choices=SPACES, default="triangle")
    geo.add_argument("-o", "--output", default=None)
    geo.set_defaults(handler=cmd_geodesic)

    norm = sub.add_parser("norm", help="Finsler norm of the 'vector' field at the input point")
    norm.add_argument("input")
    norm.add_argument("--space", choices=SPACES, default="triangle")
    norm.add_argument("--t", type=float, action="append", help="Family parameter (repeatable)")
    norm.add_argument("-o", "--output", default=None)
    norm.set_defaults(handler=cmd_norm)

    ball = sub.add_parser("unit-ball", help="Unit ball triangle of the quadrant norm")
    ball.add_argument("--point", type=float, nargs=2, default=[1.0, 1.0], metavar=("A1", "A2"))
    ball.add_argument("--input", default=None, help="Quadrant JSON instead of --point")
    ball.add_argument("--format", choices=["svg", "csv"], default="svg")
    ball.add_argument("-o", "--output", default=None)
    ball.set_defaults(handler=cmd_unit_ball)

    exp = sub.add_parser("experiment", help=f"Run one of: {', '.join(list_experiments())}")
    exp.add_argument("name")
    exp.add_argument("--param", action="append", help="key=value override (repeatable)")
    exp.add_argument("-o", "--output", default=None, help="CSV of per-sample records")
    exp.add_argument("--svg", default=None, help="Write the SVG artifact here")
    exp.add_argument("--report", default=None, help="Write the full report as JSON here")
    exp.set_defaults(handler=cmd_experiment)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=getattr(logging, args.log_level),
        format="%(asctime)s - %(name)s - %(levelname)s - %(message)s",
        stream=sys.stderr,
        force=True,
    )
    try:
        overrides = {k: v for k, v in (("tol", args.tol), ("grid", args.grid)) if v is not None}
        settings = RunSettings(seed=args.seed, workers=args.workers, log_level=args.log_level, **overrides)
        return args.handler(args, settings)
    except (StretchMetricError, ValidationError, json.JSONDecodeError, OSError) as exc:
        logger.debug(f"{args.command} failed", exc_info=True)
        _fail(str(exc))
        return exit_code_for(exc)


if __name__ == "__main__":
    sys.exit(main())
