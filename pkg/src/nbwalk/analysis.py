"""Fits of corrected probabilities, exceptional-point location and phase diagrams."""

from __future__ import annotations

import enum
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .bandtheory import DEFAULT_GBZ_POINTS, exceptional_theta2, nonbloch_spectrum
from .dynamics import Scheme, SchemeSpec, corrected_site, corrected_total, evolve, lattice_for
from .errors import BracketingError, DomainError
from .model import CoinParams
from .spectra import DEFAULT_WALL_SITES, PhaseDiagram, SpectralMethod, max_imag_quasienergy

__all__ = [
    "FitModel",
    "FitResult",
    "EpCriterion",
    "EpEstimate",
    "GridSpec",
    "SPECTRAL_THRESHOLD",
    "fit_exponential",
    "fit_power_law",
    "accumulated_variance",
    "ep_indicator",
    "bisect",
    "locate_ep",
    "phase_diagram",
]

SPECTRAL_THRESHOLD = 1e-6


class FitModel(str, enum.Enum):
    EXPONENTIAL = "exponential"
    POWER_LAW = "power-law"


@dataclass(frozen=True)
class FitResult:
    """Least-squares fit in log space.

    Exponential: ``f(t) = A e^{alpha t}``; power law: ``f(t) = A t^{-delta}``.
    ``param`` is alpha or delta, ``log_amplitude`` is ``ln A``.
    """

    model: FitModel
    param: float
    log_amplitude: float
    accumulated_variance: float
    t: np.ndarray = field(repr=False)
    series: np.ndarray = field(repr=False)

    def evaluate(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        if self.model is FitModel.EXPONENTIAL:
            return np.exp(self.log_amplitude + self.param * t)
        return np.exp(self.log_amplitude - self.param * np.log(t))

    @property
    def t_range(self) -> tuple[int, int]:
        return int(self.t[0]), int(self.t[-1])

    def to_dict(self) -> dict:
        return {
            "model": self.model.value,
            "param": self.param,
            "accumulated_variance": self.accumulated_variance,
            "t_range": list(self.t_range),
        }


def _window(series, t_range) -> tuple[np.ndarray, np.ndarray]:
    """Select ``t = lo..hi`` (inclusive) from a series indexed by t = 0, 1, 2, ..."""
    series = np.asarray(series, dtype=float)
    lo, hi = (1, len(series) - 1) if t_range is None else t_range
    if lo < 0 or hi >= len(series) or hi - lo + 1 < 3:
        raise DomainError(f"t_range {lo}..{hi} needs at least 3 points inside 0..{len(series) - 1}")
    t = np.arange(lo, hi + 1)
    y = series[lo:hi + 1]
    if np.any(~(y > 0)):
        raise DomainError("log-space fits need strictly positive values")
    return t, y


def accumulated_variance(series, fit) -> float:
    """``sum_t [P(t) - f(t)]^2 / f(t)^2`` over matching grids.

    ``fit`` is either a :class:`FitResult` (evaluated on its own grid) or the
    array of fitted values.
    """
    series = np.asarray(series, dtype=float)
    f = fit.evaluate(fit.t) if isinstance(fit, FitResult) else np.asarray(fit, dtype=float)
    if f.shape != series.shape:
        raise DomainError(f"series shape {series.shape} does not match fit shape {f.shape}")
    return float(np.sum((series - f) ** 2 / f ** 2))


def fit_exponential(series, t_range: tuple[int, int] | None = None) -> FitResult:
    """Fit ``ln P(t) = ln A + alpha t`` over ``t_range`` (default ``1..T``)."""
    t, y = _window(series, t_range)
    alpha, log_a = np.polyfit(t, np.log(y), 1)
    f = np.exp(log_a + alpha * t)
    return FitResult(FitModel.EXPONENTIAL, float(alpha), float(log_a),
                     accumulated_variance(y, f), t, y)


def fit_power_law(series, t_range: tuple[int, int] | None = None) -> FitResult:
    """Fit ``ln P(t) = ln A - delta ln t`` over ``t_range`` (default ``1..T``); needs ``t >= 1``."""
    t, y = _window(series, t_range)
    if t[0] < 1:
        raise DomainError("power-law fits need t >= 1")
    slope, log_a = np.polyfit(np.log(t), np.log(y), 1)
    f = np.exp(log_a + slope * np.log(t))
    return FitResult(FitModel.POWER_LAW, float(-slope), float(log_a),
                     accumulated_variance(y, f), t, y)


class EpCriterion(str, enum.Enum):
    PROBABILITY_UNITY = "probability-unity"
    ZERO_EXPONENT = "zero-exponent"
    SPECTRAL_ZERO = "spectral-zero"
    ANALYTIC = "analytic"


@dataclass(frozen=True)
class EpEstimate:
    theta2_star_pi: float
    criterion: EpCriterion
    bracket_pi: tuple[float, float]
    gamma: float
    steps: int | None = None
    scheme: Scheme | None = None

    def to_dict(self) -> dict:
        return {
            "gamma": self.gamma,
            "criterion": self.criterion.value,
            "theta2_star_pi": self.theta2_star_pi,
            "bracket_pi": list(self.bracket_pi),
            "steps": self.steps,
            "scheme": None if self.scheme is None else self.scheme.value,
        }


def _default_scheme(criterion: EpCriterion) -> SchemeSpec:
    if criterion is EpCriterion.ZERO_EXPONENT:
        return SchemeSpec.bulk(x0=6, steps=7)
    return SchemeSpec.domain_wall(steps=7)


def ep_indicator(gamma: float, left: CoinParams, theta1_right: float, criterion: EpCriterion | str,
                 scheme: SchemeSpec | None = None,
                 num_points: int = DEFAULT_GBZ_POINTS) -> Callable[[float], float]:
    """Scalar function of ``theta2_right`` (units of pi) whose sign flips at the exceptional point.

    * probability-unity: ``P(T) - 1``
    * zero-exponent: exponential-fit exponent of ``P_x0(t)``, ``t = 1..T``
    * spectral-zero: GBZ ``max Im E`` minus ``SPECTRAL_THRESHOLD``
    """
    criterion = EpCriterion(criterion)
    if criterion is EpCriterion.ANALYTIC:
        raise DomainError("the analytic criterion has no indicator function")
    spec = scheme or _default_scheme(criterion)

    def indicator(theta2_pi: float) -> float:
        right = CoinParams(theta1_right, theta2_pi * math.pi)
        if criterion is EpCriterion.SPECTRAL_ZERO:
            return max_imag_quasienergy(left, right, gamma, SpectralMethod.GBZ, num_points) - SPECTRAL_THRESHOLD
        traj = evolve(lattice_for(left, right, gamma, spec), spec)
        if criterion is EpCriterion.PROBABILITY_UNITY:
            return float(corrected_total(traj)[-1] - 1.0)
        return fit_exponential(corrected_site(traj)).param

    return indicator


def bisect(f: Callable[[float], float], lo: float, hi: float, xtol: float) -> tuple[float, float]:
    """Shrink a sign-change bracket of ``f`` to width ``<= xtol``; returns the final bracket."""
    flo, fhi = f(lo), f(hi)
    if not (math.isfinite(flo) and math.isfinite(fhi)) or flo * fhi > 0 or (flo == 0 and fhi == 0):
        raise BracketingError(f"no sign change on [{lo}, {hi}]: f(lo)={flo:.6g}, f(hi)={fhi:.6g}")
    if flo == 0:
        return lo, lo
    if fhi == 0:
        return hi, hi
    while hi - lo > xtol:
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if fm == 0:
            return mid, mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi = mid
    return lo, hi


def locate_ep(gamma: float, left: CoinParams, theta1_right: float, criterion: EpCriterion | str,
              bracket_pi: tuple[float, float], scheme: SchemeSpec | None = None,
              xtol_pi: float = 1e-4, num_points: int = DEFAULT_GBZ_POINTS) -> EpEstimate:
    """Locate the exceptional point in ``theta2_right`` inside ``bracket_pi`` (units of pi).

    ``theta1_right`` is in radians. Dynamical criteria run the lossy walk on
    an auto-sized lattice; the default scheme is the domain-wall start for
    probability-unity and the bulk start ``x0 = 6`` for zero-exponent, both with
    seven steps.
    """
    criterion = EpCriterion(criterion)
    lo, hi = sorted(map(float, bracket_pi))
    if criterion is EpCriterion.ANALYTIC:
        star = exceptional_theta2(gamma) / math.pi
        inside = [c for c in (star, -star, 1 - star, star - 1) if lo <= c <= hi]
        if not inside:
            raise BracketingError(f"no analytic exceptional point in [{lo}, {hi}] (pi units)")
        return EpEstimate(inside[0], criterion, (lo, hi), gamma)
    spec = None
    if criterion is not EpCriterion.SPECTRAL_ZERO:
        spec = scheme or _default_scheme(criterion)
    f = ep_indicator(gamma, left, theta1_right, criterion, spec, num_points)
    a, b = bisect(f, lo, hi, xtol_pi)
    return EpEstimate(0.5 * (a + b), criterion, (a, b), gamma,
                      None if spec is None else spec.steps,
                      None if spec is None else spec.scheme)


@dataclass(frozen=True)
class GridSpec:
    """Inclusive linear grid over the right region's angles, in units of pi."""

    theta1_pi: tuple[float, float] = (-1.0, 1.0)
    theta2_pi: tuple[float, float] = (-1.0, 1.0)
    n_theta1: int = 101
    n_theta2: int = 101

    def __post_init__(self):
        if self.n_theta1 < 1 or self.n_theta2 < 1:
            raise DomainError("grid needs at least one point per axis")

    @property
    def cells(self) -> int:
        return self.n_theta1 * self.n_theta2

    def axes(self) -> tuple[np.ndarray, np.ndarray]:
        return (np.linspace(*self.theta1_pi, self.n_theta1),
                np.linspace(*self.theta2_pi, self.n_theta2))


def phase_diagram(gamma: float, left: CoinParams, grid: GridSpec = GridSpec(),
                  method: SpectralMethod | str = SpectralMethod.GBZ,
                  num_points: int = DEFAULT_GBZ_POINTS,
                  n_left: int = DEFAULT_WALL_SITES, n_right: int = DEFAULT_WALL_SITES,
                  threads: int = 1) -> PhaseDiagram:
    """``max Im E`` over the (theta1_R, theta2_R) grid with the left region fixed.

    Rows are independent and may be computed on ``threads`` workers; the
    result does not depend on the worker count.
    """
    method = SpectralMethod(method)
    t1, t2 = grid.axes()
    if method is SpectralMethod.GBZ:
        left_max = nonbloch_spectrum(left, gamma, num_points, track=False).max_imag

        def cell(right: CoinParams) -> float:
            return max(left_max, nonbloch_spectrum(right, gamma, num_points, track=False).max_imag)
    else:
        def cell(right: CoinParams) -> float:
            return max_imag_quasienergy(left, right, gamma, method, num_points, n_left, n_right)

    def row(a: float) -> np.ndarray:
        return np.array([cell(CoinParams.from_pi(a, b)) for b in t2])

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            rows = list(pool.map(row, t1))
    else:
        rows = [row(a) for a in t1]
    return PhaseDiagram(t1, t2, np.vstack(rows), method, gamma)
