# stretch_metric/__init__.py
"""
Stretch Metric - Asymmetric Metrics on Flat Shapes
==================================================
Log-ratio stretch distances between Euclidean triangles, triangulated
flat surfaces and convex polygons, with their geodesics, Finsler norms
and completeness diagnostics.
"""

from .errors import (
    EXIT_DOMAIN,
    EXIT_MALFORMED,
    EXIT_OK,
    DomainError,
    InconsistentPointError,
    InvalidArgumentError,
    NotConvexError,
    NumericalFailureError,
    StretchMetricError,
    exit_code_for,
)

from .settings import (
    DEFAULTS,
    TOLERANCES,
    RunSettings,
    get_default,
    get_tolerance,
    list_tolerances,
)

from .weak_metric import (
    ConvergenceSymmetryReport,
    SequenceDiagnostics,
    WeakMetric,
    cauchy_diagnose,
    check_triangle_inequality,
    convergence_symmetry_probe,
    symmetrize_arith,
    symmetrize_max,
)

from .triangle import (
    BoxDims,
    EdgeLengths,
    TriCoords,
    box_lipschitz,
    coords_to_edges,
    edges_to_coords,
    heron_area,
    heron_area_gradient,
    normalize_unit_area,
)

from .triangle_space import (
    GeodesicPath,
    GeodesicVerdict,
    TangentVector,
    TrianglePoint,
    d_max,
    eta,
    eta_family_arith,
    eta_family_max,
    finsler_family_arith,
    finsler_family_max,
    finsler_norm,
    geodesic,
    max_log_distance,
    triangle_metric,
    verify_geodesic,
    verify_log_dominance,
)

from .quadrant import (
    QuadrantPoint,
    UnitBallTriangle,
    eta_star,
    finsler_star,
    finsler_star_pushed,
    g_partials,
    g_third_coordinate,
    phi,
    phi_inverse,
    sample_unit_ball,
    unit_ball,
    verify_quadrant_geodesic,
)

from .surface import (
    SurfaceGeodesic,
    SurfacePoint,
    SurfaceTangent,
    Triangulation,
    edge_lengths,
    eta_T,
    eta_T_family_arith,
    eta_T_family_max,
    example_incomplete_sequence,
    finsler_T,
    finsler_T_family,
    geodesic_T,
    max_log_distance_T,
    quadrangle_triangulation,
    single_face_triangulation,
    surface_area,
    surface_metric,
    tetrahedron_triangulation,
    verify_geodesic_T,
)
from .surface import normalize_unit_area as normalize_surface_area

from .finsler_paths import (
    MinimizationResult,
    ParamPath,
    SurfacePathSpace,
    TrianglePathSpace,
    minimize_length,
    path_length,
)

from .polygon import (
    PolygonShape,
    PolygonTriangulation,
    chart_coords,
    enumerate_triangulations,
    eta_avg,
    eta_chart,
    eta_sup,
    finsler_avg,
    finsler_sup,
    path_metric_search,
    path_metric_upper,
    shape_from_chart,
)

from .experiments import (
    EXPERIMENTS,
    ExperimentReport,
    get_experiment,
    list_experiments,
    run_experiment,
)

__version__ = "1.0.0"
__all__ = [
    # Errors
    "EXIT_OK",
    "EXIT_MALFORMED",
    "EXIT_DOMAIN",
    "StretchMetricError",
    "DomainError",
    "InconsistentPointError",
    "NotConvexError",
    "InvalidArgumentError",
    "NumericalFailureError",
    "exit_code_for",
    # Settings
    "TOLERANCES",
    "DEFAULTS",
    "RunSettings",
    "get_tolerance",
    "get_default",
    "list_tolerances",
    # Weak metrics
    "WeakMetric",
    "symmetrize_arith",
    "symmetrize_max",
    "check_triangle_inequality",
    "SequenceDiagnostics",
    "cauchy_diagnose",
    "ConvergenceSymmetryReport",
    "convergence_symmetry_probe",
    # Triangles
    "EdgeLengths",
    "TriCoords",
    "BoxDims",
    "edges_to_coords",
    "coords_to_edges",
    "heron_area",
    "heron_area_gradient",
    "normalize_unit_area",
    "box_lipschitz",
    "TrianglePoint",
    "eta",
    "eta_family_arith",
    "eta_family_max",
    "d_max",
    "max_log_distance",
    "triangle_metric",
    "GeodesicPath",
    "geodesic",
    "GeodesicVerdict",
    "verify_log_dominance",
    "verify_geodesic",
    "TangentVector",
    "finsler_norm",
    "finsler_family_arith",
    "finsler_family_max",
    # Quadrant
    "QuadrantPoint",
    "UnitBallTriangle",
    "g_third_coordinate",
    "g_partials",
    "phi",
    "phi_inverse",
    "eta_star",
    "finsler_star",
    "finsler_star_pushed",
    "unit_ball",
    "sample_unit_ball",
    "verify_quadrant_geodesic",
    # Surfaces
    "Triangulation",
    "single_face_triangulation",
    "quadrangle_triangulation",
    "tetrahedron_triangulation",
    "SurfacePoint",
    "edge_lengths",
    "surface_area",
    "normalize_surface_area",
    "eta_T",
    "eta_T_family_arith",
    "eta_T_family_max",
    "max_log_distance_T",
    "surface_metric",
    "SurfaceGeodesic",
    "geodesic_T",
    "verify_geodesic_T",
    "SurfaceTangent",
    "finsler_T",
    "finsler_T_family",
    "example_incomplete_sequence",
    # Paths
    "ParamPath",
    "path_length",
    "TrianglePathSpace",
    "SurfacePathSpace",
    "MinimizationResult",
    "minimize_length",
    # Polygons
    "PolygonShape",
    "PolygonTriangulation",
    "enumerate_triangulations",
    "chart_coords",
    "shape_from_chart",
    "eta_chart",
    "eta_sup",
    "eta_avg",
    "finsler_sup",
    "finsler_avg",
    "path_metric_search",
    "path_metric_upper",
    # Experiments
    "EXPERIMENTS",
    "ExperimentReport",
    "get_experiment",
    "list_experiments",
    "run_experiment",
]
