"""Numerical laboratory for game-theoretic diffusion asymptotics.

The package studies the normalized p-Laplacian heat flow and its
resolvent: exact radial solutions, barrier envelopes, finite-difference
viscosity schemes, distance-law residuals, and the limit laws of
statistical q-means near the boundary.

Modules:

* special: quadrature, Bessel-type kernels, erfc machinery;
* geometry: domains, signed distance, curvature, parallel surfaces;
* radial: closed-form and series solutions on balls and half spaces;
* solver: monotone finite-difference scheme for the flow and resolvent;
* asympt: barriers, residual bounds, convergence-rate fitting;
* qmeans: q-means, limit constants, empirical limit ladders;
* reporting: deterministic CSV/JSON/figure writers;
* cli: the varadhan-lab command line runner.
"""

from .errors import (
    ConfigurationError,
    ConvergenceError,
    HypothesisViolation,
    NumericalFailure,
    QuadratureError,
    TruncationError,
)
from .special import (
    DEFAULT_QUADRATURE,
    PExponent,
    QuadratureSpec,
    adaptive_quadrature,
    as_p_exponent,
    asym_f,
    asym_g,
    bessel_j,
    bessel_j_fast,
    bessel_j_zeros,
    bessel_j_zeros_fast,
    erfc_fn,
    erfc_ln,
    gamma_fn,
    inv_erfc,
    log_asym_f,
    log_asym_g,
    mod_bessel_i,
    mod_bessel_k,
    order_alpha,
)
from .geometry import (
    BoundaryPoint,
    Domain,
    ParallelSurface,
    ball_domain,
    cap_measure,
    curvature_product,
    curve_from_json,
    distance_gradient,
    distance_to_boundary,
    ellipse_domain,
    exterior_ball_domain,
    half_space_domain,
    nearest_boundary_point,
    parallel_surface,
    point_in_domain,
    polyline_domain,
    unit_sphere_area,
)
from .radial import (
    SeriesSolution,
    ball_elliptic_eval,
    ball_series_eval,
    ball_series_profile,
    ball_series_radial_table,
    build_series_solution,
    coefficient_identity_value,
    density_exponent,
    exterior_elliptic_eval,
    global_elliptic_eval,
    global_parabolic_eval,
    half_space_eval,
    laplace_transform_check,
    log_ball_elliptic_eval,
    log_exterior_elliptic_eval,
    log_global_elliptic_eval,
    log_global_parabolic_eval,
    log_half_space_eval,
)
from .solver import (
    Field,
    Grid,
    SchemeParams,
    apply_game_p_laplacian,
    comparison_check,
    parabolic_solve,
    resolvent_solve,
    stable_dt,
)
from .asympt import (
    AsymptoticsReport,
    BarrierSet,
    ModulusSpec,
    RATE_MODELS,
    asymptotics_report,
    barrier_E_minus,
    barrier_E_p_eps,
    barrier_E_plus,
    barrier_e_pz,
    barriers_c2,
    elliptic_residual_bounds,
    enhanced_v,
    enhanced_v_values,
    parabolic_residual_bounds,
    psi_omega,
    rate_fit,
    select_rate_model,
    varadhan_elliptic_residual,
    varadhan_parabolic_residual,
)
from .qmeans import (
    QMeanLimitConstants,
    QMeanQuery,
    ball_lattice,
    barrier_q_mean_limit,
    elliptic_limit_constant,
    empirical_q_mean_limit,
    limit_constants,
    parabolic_limit_constant,
    q_mean,
    q_mean_translation_scale_check,
    surface_constancy,
    surface_q_means,
)

__version__ = "0.1.0"

__all__ = [
    "__version__",
    # errors
    "ConfigurationError",
    "ConvergenceError",
    "HypothesisViolation",
    "NumericalFailure",
    "QuadratureError",
    "TruncationError",
    # special
    "PExponent",
    "QuadratureSpec",
    "DEFAULT_QUADRATURE",
    "adaptive_quadrature",
    "as_p_exponent",
    "asym_f",
    "asym_g",
    "log_asym_f",
    "log_asym_g",
    "bessel_j",
    "bessel_j_fast",
    "bessel_j_zeros",
    "bessel_j_zeros_fast",
    "erfc_fn",
    "erfc_ln",
    "gamma_fn",
    "inv_erfc",
    "mod_bessel_i",
    "mod_bessel_k",
    "order_alpha",
    # geometry
    "Domain",
    "BoundaryPoint",
    "ParallelSurface",
    "ball_domain",
    "exterior_ball_domain",
    "half_space_domain",
    "ellipse_domain",
    "polyline_domain",
    "curve_from_json",
    "point_in_domain",
    "distance_to_boundary",
    "distance_gradient",
    "nearest_boundary_point",
    "curvature_product",
    "parallel_surface",
    "cap_measure",
    "unit_sphere_area",
    # radial
    "SeriesSolution",
    "density_exponent",
    "ball_elliptic_eval",
    "exterior_elliptic_eval",
    "global_elliptic_eval",
    "global_parabolic_eval",
    "half_space_eval",
    "log_ball_elliptic_eval",
    "log_exterior_elliptic_eval",
    "log_global_elliptic_eval",
    "log_global_parabolic_eval",
    "log_half_space_eval",
    "build_series_solution",
    "ball_series_eval",
    "ball_series_profile",
    "ball_series_radial_table",
    "coefficient_identity_value",
    "laplace_transform_check",
    # solver
    "SchemeParams",
    "Grid",
    "Field",
    "stable_dt",
    "apply_game_p_laplacian",
    "parabolic_solve",
    "resolvent_solve",
    "comparison_check",
    # asympt
    "ModulusSpec",
    "AsymptoticsReport",
    "BarrierSet",
    "RATE_MODELS",
    "barrier_E_minus",
    "barrier_E_plus",
    "barrier_e_pz",
    "barrier_E_p_eps",
    "barriers_c2",
    "psi_omega",
    "varadhan_parabolic_residual",
    "parabolic_residual_bounds",
    "varadhan_elliptic_residual",
    "elliptic_residual_bounds",
    "enhanced_v",
    "enhanced_v_values",
    "rate_fit",
    "select_rate_model",
    "asymptotics_report",
    # qmeans
    "QMeanQuery",
    "QMeanLimitConstants",
    "ball_lattice",
    "q_mean",
    "q_mean_translation_scale_check",
    "parabolic_limit_constant",
    "elliptic_limit_constant",
    "limit_constants",
    "barrier_q_mean_limit",
    "empirical_q_mean_limit",
    "surface_q_means",
    "surface_constancy",
]
