"""Symmetry diagnostics for the tilted family, in dimension one.

A base measure whose every tilt is symmetric about its mean is normal; the
chain runs through the midpoint identity for the tilted mean (symmetry
forces 2*m(t) = m(t+s) + m(t-s), so m is affine) and ends with the log
Laplace transform being a quadratic polynomial.  The three operations here
probe the three links of that chain numerically.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .measures import BaseMeasure
from .numerics import DEFAULT_QUADRATURE, QuadratureConfig
from .tilting import log_partition, tilt

__all__ = [
    "QuadraticFit",
    "SymmetryReport",
    "asymmetry_score",
    "default_offsets",
    "fit_quadratic_log_partition",
    "midpoint_residual",
]


@dataclass(frozen=True)
class SymmetryReport:
    """Largest pointwise density mismatch about the tilted mean."""

    t: float
    center: float
    asymmetry_score: float
    offsets_tested: int

    def __post_init__(self) -> None:
        if self.asymmetry_score < 0:
            raise ValueError("asymmetry_score must be nonnegative")


def default_offsets() -> np.ndarray:
    """50 log-spaced offsets covering both near-center and tail asymmetry."""
    return np.geomspace(0.05, 6.0, 50)


def asymmetry_score(
    m: BaseMeasure,
    t: float,
    offsets: Sequence[float] | None = None,
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> SymmetryReport:
    """Max over offsets u of |pdf(center+u) - pdf(center-u)| for the tilt-t law."""
    offs = default_offsets() if offsets is None else np.asarray(offsets, dtype=float)
    if offs.size == 0 or np.any(offs <= 0):
        raise ValueError("offsets must be positive")
    view = tilt(m, t, cfg)
    center = view.mean()
    # slack covers quadrature fuzz on the center when an offset lands
    # exactly on the truncation edge
    if abs(center) + float(offs.max()) > view.window_halfwidth() + 1e-9:
        raise ValueError("offsets reach beyond the truncation window")
    score = float(np.max(np.abs(view.pdf(center + offs) - view.pdf(center - offs))))
    return SymmetryReport(
        t=float(t), center=center, asymmetry_score=score, offsets_tested=int(offs.size)
    )


def midpoint_residual(
    m: BaseMeasure, t: float, s: float, cfg: QuadratureConfig = DEFAULT_QUADRATURE
) -> float:
    """m(t+s) + m(t-s) - 2*m(t) for the tilted mean; zero iff the mean is locally affine."""
    if s == 0.0:
        return 0.0
    mean_up = tilt(m, t + s, cfg).mean()
    mean_down = tilt(m, t - s, cfg).mean()
    mean_mid = tilt(m, t, cfg).mean()
    return mean_up + mean_down - 2.0 * mean_mid


@dataclass(frozen=True)
class QuadraticFit:
    """Least-squares quadratic for the log Laplace transform."""

    constant: float
    linear: float
    quadratic: float
    max_residual: float


def fit_quadratic_log_partition(
    m: BaseMeasure,
    t_grid: Sequence[float],
    cfg: QuadratureConfig = DEFAULT_QUADRATURE,
) -> QuadraticFit:
    """Fit constant + linear*t + quadratic*t^2 to the log Laplace transform.

    Uses the normal equations on the degree-2 Vandermonde design; the grids
    used here are short enough that conditioning is harmless.  For a normal
    base the fit is exact and the coefficients recover the mean and half the
    variance.
    """
    ts = np.asarray(t_grid, dtype=float)
    if ts.size < 5:
        raise ValueError("need at least five grid points for a stable quadratic fit")
    values = np.array([log_partition(m, float(t), cfg) for t in ts])
    design = np.column_stack([np.ones_like(ts), ts, ts**2])
    gram = design.T @ design
    coeffs = np.linalg.solve(gram, design.T @ values)
    residuals = design @ coeffs - values
    return QuadraticFit(
        constant=float(coeffs[0]),
        linear=float(coeffs[1]),
        quadratic=float(coeffs[2]),
        max_residual=float(np.max(np.abs(residuals))),
    )
