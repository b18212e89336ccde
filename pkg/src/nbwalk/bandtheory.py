"""Bloch and non-Bloch band theory of the two-band walk.

``bloch_operator`` evaluates the 2x2 momentum-space operator on the unit circle
(``beta = e^{ik}``) or anywhere in the punctured complex plane. Continuing it to
the generalized Brillouin zone ``|beta| = gbz_radius(theta2, gamma)`` reproduces
open-boundary spectra. All angles are in radians.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla

from .errors import DegenerateDispersionError, DomainError, EpProximityError, SingularityError
from .model import CoinParams, coin_rotation

__all__ = [
    "DEFAULT_GBZ_POINTS",
    "PT_TOL",
    "QuasiEnergy",
    "GbzCircle",
    "BandSpectrum",
    "PtPhase",
    "PtClassification",
    "EtaMetric",
    "bloch_operator",
    "hopping_blocks",
    "dispersion_trace",
    "quasienergy_from_lambda",
    "quasienergies",
    "gbz_radius",
    "gbz_circle",
    "beta_roots",
    "nonbloch_spectrum",
    "bloch_spectrum",
    "trace_deviation",
    "trace_deviation_direct",
    "pt_classify",
    "exceptional_theta2",
    "eta_metric",
    "track_bands",
]

DEFAULT_GBZ_POINTS = 256
PT_TOL = 1e-9
# below this |cos theta1| the beta^2 and beta^0 terms of the dispersion are dropped
DEGENERATE_COS_TOL = 1e-12
_SINGULAR_TOL = 1e-14
_EP_GAP = 1e-8


def _uv(theta2: float, gamma: float) -> tuple[float, float]:
    ch, sh = math.cosh(gamma), math.sinh(gamma)
    c2 = math.cos(theta2)
    return ch * c2 - sh, ch * c2 + sh


def bloch_operator(coin: CoinParams, gamma: float, beta) -> np.ndarray:
    """Analytically continued Bloch operator ``U(beta)``.

    ``e^{ik/2}`` is replaced by the principal square root of ``beta`` on both
    sides of the loss factor, so eigenvalues do not depend on the branch.
    ``beta`` may be a scalar or an array; the result has shape ``beta.shape + (2, 2)``.
    """
    beta = np.asarray(beta, dtype=complex)
    if np.any(beta == 0):
        raise DomainError("beta must be nonzero")
    s = np.sqrt(beta)
    zero = np.zeros_like(s)
    z = np.stack([np.stack([s, zero], -1), np.stack([zero, 1 / s], -1)], -2)
    r1 = coin_rotation(coin.theta1 / 2)
    r2 = coin_rotation(coin.theta2 / 2)
    m = np.diag([math.exp(gamma), math.exp(-gamma)])
    mid = r2 @ m @ r2
    return r1 @ z @ mid @ z @ r1


def hopping_blocks(coin: CoinParams, gamma: float) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Bulk blocks ``(A_m, A_p, A_s)`` with ``U = sum_x |x><x+1| A_m + |x><x-1| A_p + |x><x| A_s``."""
    r1 = coin_rotation(coin.theta1 / 2).astype(complex)
    r2 = coin_rotation(coin.theta2 / 2)
    mc = np.diag([math.exp(gamma), math.exp(-gamma)])
    p0 = np.diag([1.0, 0.0])
    p1 = np.diag([0.0, 1.0])
    mid = r2 @ mc @ r2
    a_m = r1 @ p0 @ mid @ p0 @ r1
    a_p = r1 @ p1 @ mid @ p1 @ r1
    a_s = r1 @ p1 @ mid @ p0 @ r1 + r1 @ p0 @ mid @ p1 @ r1
    return a_m, a_p, a_s


def dispersion_trace(coin: CoinParams, gamma: float, beta):
    """Closed form of ``lambda + 1/lambda = Tr U(beta)``."""
    beta = np.asarray(beta, dtype=complex)
    ch, sh = math.cosh(gamma), math.sinh(gamma)
    c1, s1 = math.cos(coin.theta1), math.sin(coin.theta1)
    c2, s2 = math.cos(coin.theta2), math.sin(coin.theta2)
    return (beta * (ch * c1 * c2 + sh * c1) + (ch * c1 * c2 - sh * c1) / beta
            - 2 * ch * s1 * s2)


@dataclass(frozen=True)
class QuasiEnergy:
    """Complex quasienergy with ``lambda = exp(-i E)``, Re E in (-pi, pi], Im E = ln|lambda|."""

    value: complex

    @property
    def lam(self) -> complex:
        return complex(np.exp(-1j * self.value))

    @property
    def real(self) -> float:
        return self.value.real

    @property
    def imag(self) -> float:
        return self.value.imag


def quasienergies(lam) -> np.ndarray:
    """Vectorized branch-fixed logarithm ``E = i ln(lambda)``."""
    lam = np.asarray(lam, dtype=complex)
    if np.any(lam == 0):
        raise DomainError("lambda must be nonzero")
    re = -np.angle(lam)
    re = np.where(re <= -np.pi, re + 2 * np.pi, re)
    return re + 1j * np.log(np.abs(lam))


def quasienergy_from_lambda(lam: complex) -> QuasiEnergy:
    return QuasiEnergy(complex(quasienergies(lam)))


def gbz_radius(theta2: float, gamma: float) -> float:
    """Radius of the circular generalized Brillouin zone."""
    u, v = _uv(theta2, gamma)
    if abs(v) < _SINGULAR_TOL:
        raise SingularityError(f"GBZ radius diverges at theta2={theta2}, gamma={gamma}")
    if abs(u) < _SINGULAR_TOL:
        raise SingularityError(f"GBZ radius vanishes at theta2={theta2}, gamma={gamma}")
    return math.sqrt(abs(u / v))


@dataclass(frozen=True)
class GbzCircle:
    radius: float
    num_points: int = DEFAULT_GBZ_POINTS

    @property
    def angles(self) -> np.ndarray:
        return np.arange(self.num_points) * (2 * np.pi / self.num_points)

    @property
    def betas(self) -> np.ndarray:
        return self.radius * np.exp(1j * self.angles)


def gbz_circle(theta2: float, gamma: float, num_points: int = DEFAULT_GBZ_POINTS) -> GbzCircle:
    if num_points < 2:
        raise DomainError("num_points must be >= 2")
    return GbzCircle(gbz_radius(theta2, gamma), int(num_points))


def beta_roots(coin: CoinParams, gamma: float, lam: complex) -> tuple[complex, complex]:
    """Both roots of the quadratic dispersion in beta at eigenvalue ``lam``, ordered by modulus."""
    if lam == 0:
        raise DomainError("lambda must be nonzero")
    c1 = math.cos(coin.theta1)
    if abs(c1) < DEGENERATE_COS_TOL:
        raise DegenerateDispersionError(
            "cos(theta1) = 0: dispersion is flat in beta, lambda + 1/lambda = -2 cosh(gamma) sin(theta1) sin(theta2)")
    ch = math.cosh(gamma)
    u, v = _uv(coin.theta2, gamma)
    a = -c1 * v
    b = lam + 1 / lam + 2 * ch * math.sin(coin.theta1) * math.sin(coin.theta2)
    c = -c1 * u
    if a == 0:
        raise DegenerateDispersionError("leading coefficient vanishes (GBZ radius singular)")
    disc = np.sqrt(complex(b * b - 4 * a * c))
    # pick the sign that avoids cancellation in b +- disc
    q = -0.5 * (b + disc if abs(b + disc) >= abs(b - disc) else b - disc)
    if q == 0:
        r1 = r2 = 0j
    else:
        r1, r2 = q / a, c / q
    return tuple(sorted((complex(r1), complex(r2)), key=abs))


def track_bands(lam: np.ndarray) -> np.ndarray:
    """Reorder the two eigenvalues at each parameter point for continuity."""
    lam = np.array(lam, dtype=complex)
    for i in range(1, len(lam)):
        prev = lam[i - 1]
        keep = abs(lam[i, 0] - prev[0]) + abs(lam[i, 1] - prev[1])
        swap = abs(lam[i, 1] - prev[0]) + abs(lam[i, 0] - prev[1])
        if swap < keep:
            lam[i] = lam[i, ::-1]
    return lam


@dataclass(frozen=True)
class BandSpectrum:
    """Two-band spectrum sampled along an ordered closed parameter sweep.

    ``param`` holds k (Bloch) or the GBZ angle p; ``lam`` has shape ``(n, 2)``
    with bands tracked for continuity.
    """

    param: np.ndarray = field(repr=False)
    lam: np.ndarray = field(repr=False)
    method: str
    radius: float = 1.0

    @property
    def energies(self) -> np.ndarray:
        return quasienergies(self.lam)

    @property
    def max_imag(self) -> float:
        return float(np.max(self.energies.imag))

    def __len__(self) -> int:
        return self.lam.size


def _flat_band_lambdas(coin: CoinParams, gamma: float, n: int) -> np.ndarray:
    tau = -2 * math.cosh(gamma) * math.sin(coin.theta1) * math.sin(coin.theta2)
    disc = np.sqrt(complex(tau * tau - 4))
    pair = np.array([(tau + disc) / 2, (tau - disc) / 2])
    return np.tile(pair, (n, 1))


def nonbloch_spectrum(coin: CoinParams, gamma: float,
                      num_points: int = DEFAULT_GBZ_POINTS, track: bool = True) -> BandSpectrum:
    """Quasienergies of ``U(beta)`` with beta on the generalized Brillouin zone.

    When the dispersion is flat in beta (``cos theta1 = 0``, or the GBZ radius
    is singular so that ``cos(theta1) sqrt(|uv|)`` vanishes) both bands are
    constant and follow from ``lambda + 1/lambda = -2 cosh(gamma) sin(theta1) sin(theta2)``.
    ``track=False`` skips band tracking when only the set of values matters.
    """
    if num_points < 2:
        raise DomainError("num_points must be >= 2")
    p = np.arange(num_points) * (2 * np.pi / num_points)
    u, v = _uv(coin.theta2, gamma)
    if abs(math.cos(coin.theta1)) < DEGENERATE_COS_TOL or abs(u) < _SINGULAR_TOL or abs(v) < _SINGULAR_TOL:
        radius = math.nan if abs(v) < _SINGULAR_TOL else (math.sqrt(abs(u / v)))
        return BandSpectrum(p, _flat_band_lambdas(coin, gamma, num_points), "gbz", radius)
    circle = gbz_circle(coin.theta2, gamma, num_points)
    lam = np.linalg.eigvals(bloch_operator(coin, gamma, circle.betas))
    return BandSpectrum(p, track_bands(lam) if track else lam, "gbz", circle.radius)


def bloch_spectrum(coin: CoinParams, gamma: float, num_k: int = DEFAULT_GBZ_POINTS) -> BandSpectrum:
    """Quasienergies over the ordinary Brillouin zone ``beta = e^{ik}``."""
    if num_k < 2:
        raise DomainError("num_k must be >= 2")
    k = np.arange(num_k) * (2 * np.pi / num_k)
    lam = np.linalg.eigvals(bloch_operator(coin, gamma, np.exp(1j * k)))
    return BandSpectrum(k, track_bands(lam), "bloch", 1.0)


def trace_deviation(coin: CoinParams, gamma: float, p):
    """``Tr[U^{-1}(beta) - U^dagger(beta)]`` at ``beta = r e^{ip}`` on the GBZ, in closed form."""
    r = gbz_radius(coin.theta2, gamma)
    u, v = _uv(coin.theta2, gamma)
    out = 2j * math.cos(coin.theta1) * np.sin(np.asarray(p, dtype=float)) * (-u / r + r * v)
    return complex(out) if np.ndim(out) == 0 else out


def trace_deviation_direct(coin: CoinParams, gamma: float, p: float) -> complex:
    """Same quantity by explicit inversion and adjoint of the 2x2 matrix."""
    beta = gbz_radius(coin.theta2, gamma) * np.exp(1j * p)
    u = bloch_operator(coin, gamma, beta)
    return complex(np.trace(np.linalg.inv(u) - u.conj().T))


class PtPhase(str, enum.Enum):
    EXACT = "exact"
    BROKEN = "broken"
    BOUNDARY = "boundary"


@dataclass(frozen=True)
class PtClassification:
    phase: PtPhase
    margin: float


def pt_classify(coin: CoinParams, gamma: float, tol: float = PT_TOL) -> PtClassification:
    """Exact iff ``|cos theta2| - |tanh gamma| > tol``; Boundary within ``tol``."""
    margin = abs(math.cos(coin.theta2)) - abs(math.tanh(gamma))
    if margin > tol:
        phase = PtPhase.EXACT
    elif margin < -tol:
        phase = PtPhase.BROKEN
    else:
        phase = PtPhase.BOUNDARY
    return PtClassification(phase, margin)


def exceptional_theta2(gamma: float) -> float:
    """Non-Bloch exceptional point ``arccos(tanh gamma)`` in (0, pi/2].

    The full set of exceptional points is ``+-theta*`` and ``+-(pi - theta*)``.
    """
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    return math.acos(math.tanh(gamma))


@dataclass(frozen=True)
class EtaMetric:
    eta: np.ndarray = field(repr=False)
    residual: float
    positive_definite: bool
    eigenvalues: np.ndarray = field(repr=False)


def eta_metric(coin: CoinParams, gamma: float, p: float) -> EtaMetric:
    """``eta = sum_n |chi_n><chi_n|`` from unit-norm left eigenvectors of ``U(beta)``.

    Also reports ``max|eta U^{-1} eta^{-1} - U^dagger|``, which vanishes exactly
    when both eigenvalues are unimodular.
    """
    beta = gbz_radius(coin.theta2, gamma) * np.exp(1j * p)
    u = bloch_operator(coin, gamma, beta)
    w, vl = sla.eig(u, left=True, right=False)
    if abs(w[0] - w[1]) <= _EP_GAP:
        raise EpProximityError(f"eigenvalue gap {abs(w[0] - w[1]):.3e} at p={p}: U(beta) is near-defective")
    vl = vl / np.linalg.norm(vl, axis=0)
    eta = vl @ vl.conj().T
    resid = eta @ np.linalg.inv(u) @ np.linalg.inv(eta) - u.conj().T
    pd = bool(np.all(np.linalg.eigvalsh(eta) > 0))
    return EtaMetric(eta, float(np.max(np.abs(resid))), pd, w)
