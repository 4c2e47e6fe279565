"""Numerical diagnostics for exponential tilting of real probability measures.

The package evaluates the family of exponentially tilted laws generated by a
base probability measure on the real line and a collection of residual
functionals (median gap, sign-kernel integral, convolution fixed-point
defect, mean-median gap, symmetry scores) that vanish simultaneously exactly
when the base measure is the standard normal law.
"""

from .convolution import (
    ConvolutionSetup,
    IterationTrace,
    WindowTooNarrowError,
    convolve,
    iterate_fixed_point,
    kernel,
    kernel_laplace,
)
from .measures import (
    BaseMeasure,
    Gaussian,
    GaussianMixture,
    GridFunction,
    MeasureError,
    MeasureSpec,
    NegativeDensityError,
    NotNormalizableError,
    PerturbedCosine,
    PerturbedQuadratic,
    Tabulated,
    TailViolationError,
    build_measure,
    closed_form_log_partition,
    sample_to_grid,
)
from .medianlaw import (
    DIAGNOSTIC_NAMES,
    DiagnosticReport,
    UnknownDiagnosticError,
    convolution_residual,
    lipschitz_bound,
    mean_median_gap,
    median_gap,
    monotonicity_check,
    scan,
    sign_kernel_residual,
)
from .numerics import (
    BracketError,
    DEFAULT_QUADRATURE,
    DEFAULT_X_TOL,
    NonFiniteIntegrandError,
    QuadratureConfig,
    QuadratureResult,
    find_root_monotone,
    integrate,
    log_integrate_exp,
)
from .symmetry import (
    QuadraticFit,
    SymmetryReport,
    asymmetry_score,
    default_offsets,
    fit_quadratic_log_partition,
    midpoint_residual,
)
from .tilting import T_MAX, TiltedView, half_line_mgf, log_partition, tilt

__version__ = "0.1.0"

__all__ = [
    "BaseMeasure",
    "BracketError",
    "ConvolutionSetup",
    "DEFAULT_QUADRATURE",
    "DEFAULT_X_TOL",
    "DIAGNOSTIC_NAMES",
    "DiagnosticReport",
    "Gaussian",
    "GaussianMixture",
    "GridFunction",
    "IterationTrace",
    "MeasureError",
    "MeasureSpec",
    "NegativeDensityError",
    "NonFiniteIntegrandError",
    "NotNormalizableError",
    "PerturbedCosine",
    "PerturbedQuadratic",
    "QuadraticFit",
    "QuadratureConfig",
    "QuadratureResult",
    "SymmetryReport",
    "T_MAX",
    "Tabulated",
    "TailViolationError",
    "TiltedView",
    "UnknownDiagnosticError",
    "WindowTooNarrowError",
    "asymmetry_score",
    "build_measure",
    "closed_form_log_partition",
    "convolution_residual",
    "convolve",
    "default_offsets",
    "find_root_monotone",
    "fit_quadratic_log_partition",
    "half_line_mgf",
    "integrate",
    "iterate_fixed_point",
    "kernel",
    "kernel_laplace",
    "lipschitz_bound",
    "log_integrate_exp",
    "log_partition",
    "mean_median_gap",
    "median_gap",
    "midpoint_residual",
    "monotonicity_check",
    "sample_to_grid",
    "scan",
    "sign_kernel_residual",
    "tilt",
]
