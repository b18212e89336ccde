"""Real-space spectra, skin-effect localization and spectral comparisons.

Open-boundary step operators of skin-effect walks are extremely non-normal:
bulk eigenvectors scale like ``r^x`` with ``r`` the GBZ radius, so a naive
eigensolve of a few hundred sites picks up spurious imaginary parts of order
``eps * r^{-N}``. ``realspace_spectrum`` therefore diagonalizes the similar
matrix ``D^{-1} U D`` with ``D = diag(r_region^x)`` by default, which leaves the
spectrum unchanged while removing most of the non-normality.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg as sla
from scipy.spatial import cKDTree

from .bandtheory import DEFAULT_GBZ_POINTS, BandSpectrum, bloch_operator, gbz_circle, nonbloch_spectrum, quasienergies
from .errors import DomainError, ResourceError, SingularityError, SolverError
from .model import Boundary, CoinParams, Variant, WalkConfig, build_step_operator

__all__ = [
    "MAX_SITES",
    "KERNEL_TOL",
    "SpectralMethod",
    "EigenSystem",
    "LocalizationReport",
    "PhaseDiagram",
    "eigendecompose",
    "skin_gauge",
    "realspace_eigenvalues",
    "realspace_eigensystem",
    "realspace_spectrum",
    "localization_report",
    "max_imag_quasienergy",
    "spectral_loop_area",
    "band_loops",
    "band_loop_areas",
    "gbz_lambda_curve",
    "hausdorff_distance",
]

MAX_SITES = 512
# eigenvalues below this modulus belong to the kernel created by open-boundary truncation
KERNEL_TOL = 1e-6
DEFAULT_WALL_SITES = 30
# smallest singular value of a cluster's left/right overlap matrix below which the cluster is defective
_DEFECT_TOL = 1e-10


class SpectralMethod(str, enum.Enum):
    GBZ = "gbz"
    REALSPACE_OBC = "realspace-obc"


@dataclass(frozen=True)
class EigenSystem:
    """Matched eigenvalues and right/left eigenvectors (columns, unit norm).

    ``overlaps[n] = <chi_n|phi_n>``; within clusters of (near-)degenerate
    eigenvalues the left vectors are re-biorthogonalized. ``defective`` flags
    pairs in clusters whose overlap matrix is numerically singular.
    """

    eigenvalues: np.ndarray
    right: np.ndarray = field(repr=False)
    left: np.ndarray = field(repr=False)
    residuals: np.ndarray = field(repr=False)
    overlaps: np.ndarray = field(repr=False)
    defective: np.ndarray = field(repr=False)

    @property
    def condition(self) -> np.ndarray:
        """Eigenvalue condition numbers ``1 / |<chi|phi>|``."""
        with np.errstate(divide="ignore"):
            return 1.0 / np.abs(self.overlaps)

    def biorthogonality_error(self) -> float:
        """Largest off-diagonal ``|<chi_n|phi_m>|`` among non-defective pairs."""
        ok = ~self.defective
        g = self.left[:, ok].conj().T @ self.right[:, ok]
        np.fill_diagonal(g, 0)
        return float(np.max(np.abs(g))) if g.size else 0.0


def _clusters(w: np.ndarray, tol: float) -> list[np.ndarray]:
    order = np.argsort(w.real)
    seen = np.zeros(w.size, bool)
    out = []
    for i in order:
        if seen[i]:
            continue
        members = np.flatnonzero((np.abs(w - w[i]) < tol) & ~seen)
        seen[members] = True
        out.append(members)
    return out


def _unit_columns(v: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Normalize columns; zero or non-finite columns (LAPACK on nilpotent blocks) are zeroed and reported."""
    norms = np.linalg.norm(v, axis=0)
    dead = ~(np.isfinite(norms) & (norms > 0))
    v = np.where(dead[None, :], 0.0, v)
    return v / np.where(dead, 1.0, norms), dead


def eigendecompose(matrix, residual_tol: float = 1e-8, cluster_tol: float = 1e-8) -> EigenSystem:
    """Full dense eigendecomposition with left vectors and residual contract.

    LAPACK's Hessenberg/QR path (``zgeev``) supplies the spectrum; pairs whose
    residual ``||A v - lambda v||`` exceeds ``residual_tol * max(1, ||A||)`` get
    one step of shifted inverse iteration. A pair that still fails raises
    :class:`SolverError` unless it is flagged defective.
    """
    a = np.asarray(matrix, dtype=complex)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise DomainError(f"expected a nonempty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise DomainError("matrix has non-finite entries")
    try:
        w, vl, vr = sla.eig(a, left=True, right=True)
    except np.linalg.LinAlgError as exc:
        raise SolverError(f"QR iteration failed to converge for n={a.shape[0]}: {exc}") from exc

    n = a.shape[0]
    scale = max(1.0, float(np.linalg.norm(a, 2)))
    defective = np.zeros(n, bool)
    vr, dead_r = _unit_columns(vr)
    vl, dead_l = _unit_columns(vl)
    defective |= dead_r | dead_l
    for members in _clusters(w, cluster_tol * scale):
        if members.size < 2:
            continue
        g = vl[:, members].conj().T @ vr[:, members]
        if np.linalg.svd(g, compute_uv=False)[-1] < _DEFECT_TOL:
            defective[members] = True
            continue
        vl[:, members] = vl[:, members] @ np.linalg.inv(g).conj().T
    vl, _ = _unit_columns(vl)

    res = np.linalg.norm(a @ vr - vr * w, axis=0)
    eye = np.eye(n)
    for i in np.flatnonzero(res > residual_tol * scale):
        shift = w[i] + 1e-10 * max(1.0, abs(w[i]))
        try:
            y = np.linalg.solve(a - shift * eye, vr[:, i])
        except np.linalg.LinAlgError:
            y = vr[:, i]
        y /= np.linalg.norm(y)
        lam = y.conj() @ a @ y
        r = np.linalg.norm(a @ y - lam * y)
        if r < res[i]:
            vr[:, i], w[i], res[i] = y, lam, r
        if res[i] > residual_tol * scale and not defective[i]:
            # a vanishing left/right overlap marks a Jordan block: eigenvalues there are only
            # determined to eps**(1/k), so flag the pair instead of failing the contract
            if abs(vl[:, i].conj() @ vr[:, i]) < math.sqrt(_DEFECT_TOL):
                defective[i] = True
                continue
            raise SolverError(f"pair {i} (lambda={w[i]:.6g}) residual {res[i]:.3e} after refinement")
    overlaps = np.einsum("ij,ij->j", vl.conj(), vr)
    return EigenSystem(w, vr, vl, res, overlaps, defective)


def skin_gauge(config: WalkConfig, clip: float = 200.0) -> np.ndarray:
    """Diagonal of ``D`` with ``D_x = r_region^x`` (identity for periodic lattices).

    Regions whose GBZ radius is singular get no rescaling; log-scales are
    clipped to ``+-clip`` to stay inside floating-point range.
    """
    if config.boundary is Boundary.PERIODIC:
        return np.ones(config.dim)

    def log_r(coin: CoinParams) -> float:
        try:
            return math.log(gbz_circle(coin.theta2, config.gamma).radius)
        except SingularityError:
            return 0.0

    x = config.positions
    logs = np.where(x < 0, x * log_r(config.left), x * log_r(config.right))
    return np.repeat(np.exp(np.clip(logs, -clip, clip)), 2)


def _check_size(config: WalkConfig, max_sites: int) -> None:
    if config.n_sites > max_sites:
        raise ResourceError(f"{config.n_sites} sites exceeds the cap of {max_sites}")


def realspace_eigenvalues(config: WalkConfig, gauge: bool = True, max_sites: int = MAX_SITES) -> np.ndarray:
    """All eigenvalues of the balanced step operator, kernel modes included."""
    _check_size(config, max_sites)
    u = build_step_operator(config, Variant.BALANCED).matrix
    if gauge:
        d = skin_gauge(config)
        u = (u / d[:, None]) * d[None, :]
    return sla.eigvals(u)


def realspace_eigensystem(config: WalkConfig, max_sites: int = MAX_SITES) -> EigenSystem:
    """Eigensystem of the balanced step operator.

    No gauge here: mapping vectors back through ``D`` would amplify their
    errors by up to ``r^{-N}`` and break the residual contract.
    """
    _check_size(config, max_sites)
    return eigendecompose(build_step_operator(config, Variant.BALANCED).matrix)


def realspace_spectrum(config: WalkConfig, gauge: bool = True, max_sites: int = MAX_SITES,
                       kernel_tol: float = KERNEL_TOL) -> np.ndarray:
    """Quasienergies of the real-space balanced operator.

    Eigenvalues with ``|lambda| < kernel_tol`` span the kernel produced by
    open-boundary truncation (amplitude shifted off the lattice) and carry no
    quasienergy; they are dropped.
    """
    lam = realspace_eigenvalues(config, gauge, max_sites)
    return quasienergies(lam[np.abs(lam) >= kernel_tol])


@dataclass(frozen=True)
class LocalizationReport:
    """Site-resolved weights of each eigenstate relative to a reference site."""

    positions: np.ndarray = field(repr=False)
    site_weights: np.ndarray = field(repr=False)
    eigenvalues: np.ndarray = field(repr=False)
    origin: int = 0

    def weight_within(self, d: float) -> np.ndarray:
        """Fraction of each state's squared norm on sites with ``|x - origin| <= d``."""
        mask = np.abs(self.positions - self.origin) <= d
        return self.site_weights[:, mask].sum(axis=1)

    @property
    def ipr(self) -> np.ndarray:
        return np.sum(self.site_weights ** 2, axis=1)

    @property
    def max_site_weight(self) -> np.ndarray:
        return self.site_weights.max(axis=1)


def localization_report(eig: EigenSystem, config: WalkConfig, origin: int = 0,
                        kernel_tol: float = KERNEL_TOL) -> LocalizationReport:
    """Per-state site weights of the right eigenvectors (kernel modes excluded)."""
    keep = np.abs(eig.eigenvalues) >= kernel_tol
    prob = np.abs(eig.right[:, keep]) ** 2
    site = prob[0::2] + prob[1::2]
    site = (site / site.sum(axis=0)).T
    return LocalizationReport(config.positions, site, eig.eigenvalues[keep], origin)


def max_imag_quasienergy(left: CoinParams, right: CoinParams, gamma: float,
                         method: SpectralMethod | str = SpectralMethod.GBZ,
                         num_points: int = DEFAULT_GBZ_POINTS,
                         n_left: int = DEFAULT_WALL_SITES, n_right: int = DEFAULT_WALL_SITES) -> float:
    """Largest Im E of the domain-wall system.

    ``gbz`` takes the maximum over the non-Bloch spectra of both bulks;
    ``realspace-obc`` diagonalizes the open domain-wall operator.
    """
    method = SpectralMethod(method)
    if method is SpectralMethod.GBZ:
        return max(nonbloch_spectrum(left, gamma, num_points, track=False).max_imag,
                   nonbloch_spectrum(right, gamma, num_points, track=False).max_imag)
    config = WalkConfig(left, right, gamma, n_left, n_right, Boundary.OPEN)
    return float(np.max(realspace_spectrum(config).imag))


def spectral_loop_area(curve) -> float:
    """Signed (shoelace) area enclosed by an ordered closed curve in the complex plane."""
    z = np.asarray(curve, dtype=complex).ravel()
    if z.size < 3:
        raise DomainError("need at least 3 points to enclose an area")
    x, y = z.real, z.imag
    return 0.5 * float(np.sum(x * np.roll(y, -1) - np.roll(x, -1) * y))


def band_loops(spectrum: BandSpectrum) -> list[np.ndarray]:
    """Closed lambda-curves traced by the tracked bands over one parameter period.

    If the two bands trade places over the period they form a single loop.
    """
    lam = spectrum.lam
    first, last = lam[0], lam[-1]
    step = np.max(np.abs(np.diff(lam, axis=0)), initial=0.0)
    stay = abs(last[0] - first[0]) + abs(last[1] - first[1])
    swap = abs(last[0] - first[1]) + abs(last[1] - first[0])
    if swap < stay and swap <= 4 * step:
        return [np.concatenate([lam[:, 0], lam[:, 1]])]
    return [lam[:, 0].copy(), lam[:, 1].copy()]


def band_loop_areas(spectrum: BandSpectrum) -> list[float]:
    return [spectral_loop_area(c) for c in band_loops(spectrum)]


def gbz_lambda_curve(coin: CoinParams, gamma: float, num_points: int = 4096) -> np.ndarray:
    """Dense sample of both eigenvalue branches of ``U(beta)`` over the GBZ."""
    circle = gbz_circle(coin.theta2, gamma, num_points)
    return np.linalg.eigvals(bloch_operator(coin, gamma, circle.betas)).ravel()


def hausdorff_distance(points, curve, max_outliers: int = 0) -> float:
    """Hausdorff distance in the complex plane, ignoring up to ``max_outliers`` points.

    Candidates for exclusion are the ``points`` farthest from ``curve``; the
    smallest distance over excluding ``0..max_outliers`` of them is returned,
    since dropping a point can also open a gap in the coverage of ``curve``.
    """
    pts = np.asarray(points, dtype=complex).ravel()
    cur = np.asarray(curve, dtype=complex).ravel()
    if pts.size == 0 or cur.size == 0:
        raise DomainError("both point sets must be nonempty")
    as2d = lambda z: np.column_stack([z.real, z.imag])  # noqa: E731
    d_pc, _ = cKDTree(as2d(cur)).query(as2d(pts))
    order = np.argsort(d_pc)
    best = math.inf
    for k in range(min(max_outliers, pts.size - 1) + 1):
        keep = order[: pts.size - k]
        d_cp, _ = cKDTree(as2d(pts[keep])).query(as2d(cur))
        best = min(best, max(d_pc[keep].max(), d_cp.max()))
    return float(best)


@dataclass(frozen=True)
class PhaseDiagram:
    """max Im E over a (theta1, theta2) grid of the right region, angles in units of pi."""

    theta1_pi: np.ndarray = field(repr=False)
    theta2_pi: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    method: SpectralMethod
    gamma: float

    def __post_init__(self):
        if self.values.shape != (self.theta1_pi.size, self.theta2_pi.size):
            raise DomainError("values must have shape (len(theta1_pi), len(theta2_pi))")

    def broken(self, threshold: float = 1e-6) -> np.ndarray:
        return self.values > threshold
