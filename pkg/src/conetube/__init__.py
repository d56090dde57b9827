"""Cone-manifold deformation toolkit for two-cusp Dehn surgery spaces.

Computes truncated analytic expansions of cusp eigenvalue curves, solves
one- and two-parameter cone structures by Newton continuation, and reports
maximal-tube geometry with short-length asymptotics.
"""

from .config import TOLERANCES, Tolerances, ensure_finite
from .curves import (
    BivariatePolynomial,
    CurveError,
    GeometricCurve,
    expand_from_polynomial,
    expand_from_samples,
    figure_eight_a_polynomial,
    involution_defect,
    whitehead_a_polynomial,
)
from .gluing import (
    BASE_SHAPES,
    BranchAnchors,
    CuspEigenvalues,
    GluingError,
    TetShapes,
    alternate_eigenvalues,
    cusp_eigenvalues,
    residuals,
    solve_shapes,
)
from .holonomy import (
    HolonomyError,
    PeripheralMatrices,
    Representation,
    RepresentationFamily,
    base_representation,
    build_representation,
    commutator_trace_minus2,
    cusp_relation_residuals,
    l2_eigenvalue,
    peripheral_matrices,
    relation_residuals,
    trace_identity_l1,
    trace_identity_m1,
    y_from_l2,
    z_radicand,
)
from .jets import (
    BranchError,
    Jet,
    JetError,
    compose,
    constant,
    continue_log,
    continue_sqrt,
    jet_exp,
    jet_log,
    jet_sqrt,
    log_along_path,
    real_modulus_jet,
    reversion,
    sqrt_along_path,
    variable,
)
from .surgery import (
    ConeExpansion,
    ConvergenceRow,
    Slope,
    SolvedStructure,
    SurgeryError,
    VarietyPoint,
    cone_derivatives_general,
    cone_expansion,
    convergence_table,
    filled_curve_sampler,
    solve_cone_structure,
    unfilled_curve_sampler,
)
from .tube import (
    INFINITY,
    KExpansion,
    TubeError,
    TubeMeasurement,
    commutator_trace_minus2_from_eigenvalues,
    core_length,
    cross_ratio,
    fit_k_expansion,
    k1_range_check,
    k_expansion_closed_form,
    line_distance,
    measure_tube,
    monotonicity_report,
    mu_hat_squared_numeric,
    tube_cosh2R,
    tube_cosh2R_trace_form,
    whitehead_k_reference,
)

__version__ = "0.1.0"

__all__ = [
    "BASE_SHAPES",
    "BivariatePolynomial",
    "BranchAnchors",
    "BranchError",
    "ConeExpansion",
    "ConvergenceRow",
    "CurveError",
    "CuspEigenvalues",
    "GeometricCurve",
    "GluingError",
    "HolonomyError",
    "INFINITY",
    "Jet",
    "JetError",
    "KExpansion",
    "PeripheralMatrices",
    "Representation",
    "RepresentationFamily",
    "Slope",
    "SolvedStructure",
    "SurgeryError",
    "TetShapes",
    "Tolerances",
    "TOLERANCES",
    "TubeError",
    "TubeMeasurement",
    "VarietyPoint",
    "alternate_eigenvalues",
    "base_representation",
    "build_representation",
    "commutator_trace_minus2",
    "commutator_trace_minus2_from_eigenvalues",
    "compose",
    "cone_derivatives_general",
    "cone_expansion",
    "constant",
    "continue_log",
    "continue_sqrt",
    "convergence_table",
    "core_length",
    "cross_ratio",
    "cusp_eigenvalues",
    "cusp_relation_residuals",
    "ensure_finite",
    "expand_from_polynomial",
    "expand_from_samples",
    "figure_eight_a_polynomial",
    "filled_curve_sampler",
    "fit_k_expansion",
    "involution_defect",
    "jet_exp",
    "jet_log",
    "jet_sqrt",
    "k1_range_check",
    "k_expansion_closed_form",
    "l2_eigenvalue",
    "line_distance",
    "log_along_path",
    "measure_tube",
    "monotonicity_report",
    "mu_hat_squared_numeric",
    "peripheral_matrices",
    "real_modulus_jet",
    "relation_residuals",
    "residuals",
    "reversion",
    "solve_cone_structure",
    "solve_shapes",
    "sqrt_along_path",
    "trace_identity_l1",
    "trace_identity_m1",
    "tube_cosh2R",
    "tube_cosh2R_trace_form",
    "unfilled_curve_sampler",
    "variable",
    "whitehead_a_polynomial",
    "whitehead_k_reference",
    "y_from_l2",
    "z_radicand",
]
