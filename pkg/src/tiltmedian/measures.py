"""Base probability measures written as a density ratio against the standard normal.

Every measure handled by this package has a density ``f(x) = g(x) * phi(x)``
where ``phi`` is the standard normal density and ``g`` is a nonnegative
factor stored in log domain (``-inf`` marking zeros of ``g``).  The catalog
covers four closed-form families plus densities tabulated in a text file;
all of them keep the two-sided Laplace transform finite for every real
argument, which is the standing assumption behind exponential tilting.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

from .numerics import DEFAULT_QUADRATURE, QuadratureConfig, integrate

__all__ = [
    "BaseMeasure",
    "Gaussian",
    "GaussianMixture",
    "GridFunction",
    "MeasureError",
    "MeasureSpec",
    "NegativeDensityError",
    "NotNormalizableError",
    "PerturbedCosine",
    "PerturbedQuadratic",
    "Tabulated",
    "TailViolationError",
    "build_measure",
    "closed_form_log_partition",
    "sample_to_grid",
]

LOG_SQRT_2PI = 0.5 * math.log(2.0 * math.pi)

_NORMALIZATION_TOL = 1e-10
_DENSITY_SCAN_POINTS = 4001
_TAIL_MASS_SIGMAS = 8.5  # two-sided normal tail beyond 8.5 sd is < 1e-14


class MeasureError(Exception):
    """Base class for measure construction failures."""


class NotNormalizableError(MeasureError):
    """The density does not integrate to one (or integrates to zero)."""


class NegativeDensityError(MeasureError):
    """The density ratio takes negative values."""


class TailViolationError(MeasureError):
    """Tabulated data grows super-Gaussianly toward the table edge."""


@dataclass(frozen=True)
class Gaussian:
    """Normal law N(mu, sigma^2)."""

    mu: float
    sigma: float

    def __post_init__(self) -> None:
        if not self.sigma > 0:
            raise ValueError("sigma must be positive")


@dataclass(frozen=True)
class PerturbedCosine:
    """Density ratio proportional to 1 + eps*cos(x)."""

    eps: float

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")


@dataclass(frozen=True)
class PerturbedQuadratic:
    """Density ratio proportional to 1 + eps*x^2."""

    eps: float

    def __post_init__(self) -> None:
        if self.eps < 0:
            raise ValueError("eps must be nonnegative")


@dataclass(frozen=True)
class GaussianMixture:
    """Two-component normal mixture: weight on the first component."""

    weight: float
    mu1: float
    sigma1: float
    mu2: float
    sigma2: float

    def __post_init__(self) -> None:
        if not 0.0 <= self.weight <= 1.0:
            raise ValueError("weight must lie in [0, 1]")
        if not (self.sigma1 > 0 and self.sigma2 > 0):
            raise ValueError("component sigmas must be positive")


@dataclass(frozen=True)
class Tabulated:
    """Density ratio tabulated in a two-column text file.

    Format: one ``x value`` pair per whitespace-separated line, strictly
    increasing x, nonnegative values; lines starting with '#' are ignored.
    The ratio is interpolated linearly inside the tabulated range, set to
    zero outside it, and renormalized so the density integrates to one.
    """

    path: str


MeasureSpec = Union[Gaussian, PerturbedCosine, PerturbedQuadratic, GaussianMixture, Tabulated]


@dataclass(frozen=True)
class GridFunction:
    """Uniform-grid samples of a real function with a tracked valid window.

    Entries outside ``[window_lo, window_hi]`` carry no information (they are
    nan-filled after window-shrinking operations); entries inside must be
    finite.
    """

    x_min: float
    step: float
    values: np.ndarray
    window_lo: int
    window_hi: int

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        values.flags.writeable = False
        object.__setattr__(self, "values", values)
        if not self.step > 0:
            raise ValueError("step must be positive")
        if values.ndim != 1 or values.size == 0:
            raise ValueError("values must be a nonempty 1-d sequence")
        if not (0 <= self.window_lo <= self.window_hi < values.size):
            raise ValueError(
                f"valid window [{self.window_lo}, {self.window_hi}] out of bounds "
                f"for {values.size} values"
            )
        if not np.all(np.isfinite(values[self.window_lo : self.window_hi + 1])):
            raise ValueError("values inside the valid window must be finite")

    def x(self) -> np.ndarray:
        return self.x_min + self.step * np.arange(self.values.size)

    def window_x(self) -> np.ndarray:
        return self.x_min + self.step * np.arange(self.window_lo, self.window_hi + 1)

    def window_values(self) -> np.ndarray:
        return self.values[self.window_lo : self.window_hi + 1]


@dataclass(frozen=True)
class BaseMeasure:
    """A validated base measure with density ``exp(log_g(x)) * phi(x)``.

    ``support_halfwidth`` is a radius outside which the base measure carries
    mass below 1e-14.  The remaining fields size integration windows for
    tilted integrals: the window grows like ``tilt_gain * |t|`` because
    tilting by t recenters a Gaussian-enveloped density by (envelope sd)^2
    per unit of t.
    """

    spec: MeasureSpec
    log_g: Callable[[np.ndarray], np.ndarray]
    support_halfwidth: float
    has_closed_form_L: bool
    window_scale: float = 1.0
    window_offset: float = 0.0
    tilt_gain: float = 1.0
    window_fixed: bool = False

    def g(self, x) -> np.ndarray:
        return np.exp(self.log_g(np.asarray(x, dtype=float)))

    def log_pdf(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return self.log_g(x) - 0.5 * x**2 - LOG_SQRT_2PI

    def pdf(self, x) -> np.ndarray:
        return np.exp(self.log_pdf(x))

    def window_halfwidth(self, t: float = 0.0, base: float = 12.0) -> float:
        """Truncation halfwidth for integrals against the tilt-t reweighting."""
        if self.window_fixed:
            return self.support_halfwidth
        return self.window_offset + base * self.window_scale + self.tilt_gain * abs(t)


def _log_g_gaussian(mu: float, sigma: float) -> Callable[[np.ndarray], np.ndarray]:
    log_sigma = math.log(sigma)

    def log_g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return 0.5 * x**2 - 0.5 * ((x - mu) / sigma) ** 2 - log_sigma

    return log_g


def _log_g_perturbed_cosine(eps: float) -> Callable[[np.ndarray], np.ndarray]:
    log_norm = math.log1p(eps * math.exp(-0.5))

    def log_g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        # log of a negative ratio yields nan, which construction-time
        # validation turns into NegativeDensityError
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.log(1.0 + eps * np.cos(x)) - log_norm

    return log_g


def _log_g_perturbed_quadratic(eps: float) -> Callable[[np.ndarray], np.ndarray]:
    log_norm = math.log1p(eps)

    def log_g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        return np.log1p(eps * x**2) - log_norm

    return log_g


def _log_g_mixture(spec: GaussianMixture) -> Callable[[np.ndarray], np.ndarray]:
    log_w1 = math.log(spec.weight) if spec.weight > 0 else -math.inf
    log_w2 = math.log1p(-spec.weight) if spec.weight < 1 else -math.inf

    def log_g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        a = log_w1 - 0.5 * ((x - spec.mu1) / spec.sigma1) ** 2 - math.log(spec.sigma1)
        b = log_w2 - 0.5 * ((x - spec.mu2) / spec.sigma2) ** 2 - math.log(spec.sigma2)
        return np.logaddexp(a, b) + 0.5 * x**2

    return log_g


def _load_table(path: str) -> tuple[np.ndarray, np.ndarray]:
    xs: list[float] = []
    gs: list[float] = []
    try:
        with open(path, "r", encoding="utf-8") as handle:
            for lineno, line in enumerate(handle, start=1):
                stripped = line.strip()
                if not stripped or stripped.startswith("#"):
                    continue
                parts = stripped.split()
                if len(parts) != 2:
                    raise MeasureError(
                        f"{path}:{lineno}: expected two columns, got {len(parts)}"
                    )
                try:
                    xs.append(float(parts[0]))
                    gs.append(float(parts[1]))
                except ValueError as exc:
                    raise MeasureError(f"{path}:{lineno}: {exc}") from exc
    except OSError as exc:
        raise MeasureError(f"cannot read tabulated density {path}: {exc}") from exc
    if len(xs) < 2:
        raise MeasureError(f"{path}: need at least two tabulated points")
    x_arr = np.array(xs)
    g_arr = np.array(gs)
    if not np.all(np.diff(x_arr) > 0):
        raise MeasureError(f"{path}: x column must be strictly increasing")
    if not np.all(np.isfinite(x_arr)) or not np.all(np.isfinite(g_arr)):
        raise MeasureError(f"{path}: entries must be finite")
    return x_arr, g_arr


def _check_table_tails(xs: np.ndarray, gs: np.ndarray) -> None:
    """Reject tables whose density rises toward an edge beyond |x| = 2.

    A tabulated ratio that grows faster than the Gaussian envelope decays
    would make the tilted-integral assumption vacuous outside the table, so
    the density g*phi must be falling across the two outermost intervals on
    each side.
    """
    if xs.size < 3:
        return
    log_f = np.where(gs > 0, np.log(np.where(gs > 0, gs, 1.0)), -np.inf) - 0.5 * xs**2
    if xs[0] <= -2.0 and log_f[0] > log_f[1] > log_f[2]:
        raise TailViolationError(
            f"density rises toward the left table edge x={xs[0]!r}"
        )
    if xs[-1] >= 2.0 and log_f[-1] > log_f[-2] > log_f[-3]:
        raise TailViolationError(
            f"density rises toward the right table edge x={xs[-1]!r}"
        )


def _log_g_tabulated(xs: np.ndarray, gs: np.ndarray) -> Callable[[np.ndarray], np.ndarray]:
    def log_g(x: np.ndarray) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        vals = np.interp(x, xs, gs, left=0.0, right=0.0)
        with np.errstate(divide="ignore"):
            return np.log(vals)

    return log_g


def build_measure(spec: MeasureSpec, cfg: QuadratureConfig = DEFAULT_QUADRATURE) -> BaseMeasure:
    """Construct and validate a ``BaseMeasure`` from its declarative spec.

    Validation checks the density ratio for negative values on a dense scan
    grid and the full density for unit mass by quadrature.  Tabulated input
    is renormalized before the mass check and additionally screened for
    super-Gaussian growth at the table edges.
    """
    if isinstance(spec, Gaussian):
        measure = BaseMeasure(
            spec=spec,
            log_g=_log_g_gaussian(spec.mu, spec.sigma),
            support_halfwidth=abs(spec.mu) + _TAIL_MASS_SIGMAS * spec.sigma,
            has_closed_form_L=True,
            window_scale=spec.sigma,
            window_offset=abs(spec.mu),
            tilt_gain=spec.sigma**2,
        )
    elif isinstance(spec, PerturbedCosine):
        measure = BaseMeasure(
            spec=spec,
            log_g=_log_g_perturbed_cosine(spec.eps),
            support_halfwidth=9.0,
            has_closed_form_L=True,
        )
    elif isinstance(spec, PerturbedQuadratic):
        measure = BaseMeasure(
            spec=spec,
            log_g=_log_g_perturbed_quadratic(spec.eps),
            support_halfwidth=9.0,
            has_closed_form_L=True,
        )
    elif isinstance(spec, GaussianMixture):
        measure = BaseMeasure(
            spec=spec,
            log_g=_log_g_mixture(spec),
            support_halfwidth=max(
                abs(spec.mu1) + _TAIL_MASS_SIGMAS * spec.sigma1,
                abs(spec.mu2) + _TAIL_MASS_SIGMAS * spec.sigma2,
            ),
            has_closed_form_L=True,
            window_scale=max(spec.sigma1, spec.sigma2),
            window_offset=max(abs(spec.mu1), abs(spec.mu2)),
            tilt_gain=max(spec.sigma1, spec.sigma2) ** 2,
        )
    elif isinstance(spec, Tabulated):
        xs, gs = _load_table(spec.path)
        if np.any(gs < 0):
            bad = xs[gs < 0][0]
            raise NegativeDensityError(f"tabulated ratio negative at x={bad!r}")
        _check_table_tails(xs, gs)
        mass = integrate(
            lambda x: np.interp(x, xs, gs, left=0.0, right=0.0)
            * np.exp(-0.5 * np.asarray(x, dtype=float) ** 2 - LOG_SQRT_2PI),
            (float(xs[0]), float(xs[-1])),
            cfg,
        ).value
        if not mass > 1e-300:
            raise NotNormalizableError("tabulated density has zero total mass")
        measure = BaseMeasure(
            spec=spec,
            log_g=_log_g_tabulated(xs, gs / mass),
            support_halfwidth=float(max(abs(xs[0]), abs(xs[-1]))),
            has_closed_form_L=False,
            window_fixed=True,
        )
    else:
        raise TypeError(f"unknown measure spec {spec!r}")

    _validate(measure, cfg)
    return measure


def _validate(measure: BaseMeasure, cfg: QuadratureConfig) -> None:
    halfwidth = measure.window_halfwidth(0.0, cfg.truncation_halfwidth)
    scan = np.linspace(-halfwidth, halfwidth, _DENSITY_SCAN_POINTS)
    with np.errstate(over="ignore"):
        g_values = measure.g(scan)
    if np.any(np.isnan(g_values)):
        bad = scan[np.isnan(g_values)][0]
        raise NegativeDensityError(f"density ratio negative near x={bad!r}")
    mass = integrate(measure.pdf, (-halfwidth, halfwidth), cfg)
    if abs(mass.value - 1.0) > _NORMALIZATION_TOL:
        raise NotNormalizableError(
            f"density integrates to {mass.value!r}, expected 1 within {_NORMALIZATION_TOL}"
        )


def closed_form_log_partition(spec: MeasureSpec, t: float) -> float | None:
    """Exact log Laplace transform for catalog families, None for tabulated."""
    t = float(t)
    if isinstance(spec, Gaussian):
        return spec.mu * t + 0.5 * (spec.sigma * t) ** 2
    if isinstance(spec, PerturbedCosine):
        scaled = spec.eps * math.exp(-0.5)
        return 0.5 * t * t + math.log1p(scaled * math.cos(t)) - math.log1p(scaled)
    if isinstance(spec, PerturbedQuadratic):
        return 0.5 * t * t + math.log1p(spec.eps * (1.0 + t * t)) - math.log1p(spec.eps)
    if isinstance(spec, GaussianMixture):
        log_w1 = math.log(spec.weight) if spec.weight > 0 else -math.inf
        log_w2 = math.log1p(-spec.weight) if spec.weight < 1 else -math.inf
        a = log_w1 + spec.mu1 * t + 0.5 * (spec.sigma1 * t) ** 2
        b = log_w2 + spec.mu2 * t + 0.5 * (spec.sigma2 * t) ** 2
        return float(np.logaddexp(a, b))
    if isinstance(spec, Tabulated):
        return None
    raise TypeError(f"unknown measure spec {spec!r}")


def sample_to_grid(measure: BaseMeasure, x_min: float, x_max: float, n: int) -> GridFunction:
    """Sample the density ratio g (not the density itself) on a uniform grid."""
    if not x_min < x_max:
        raise ValueError("x_min must be less than x_max")
    if n < 2:
        raise ValueError("need at least two grid points")
    xs = np.linspace(x_min, x_max, n)
    values = measure.g(xs)
    return GridFunction(
        x_min=float(x_min),
        step=float(xs[1] - xs[0]),
        values=values,
        window_lo=0,
        window_hi=n - 1,
    )
