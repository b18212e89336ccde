"""Stroboscopic evolution under the lossy step operator with a loss ledger.

The walk is run with the physically realised loss ``M_E`` and the balanced
dynamics are recovered afterwards through the ``e^{2 gamma t}`` correction,
which is what a detector-side experiment does.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ContractError, DomainError
from .model import Boundary, CoinParams, Variant, WalkConfig, build_step_factors

__all__ = [
    "Scheme",
    "SchemeSpec",
    "Trajectory",
    "lattice_for",
    "check_margins",
    "evolve",
    "corrected_total",
    "corrected_site",
]


class Scheme(str, enum.Enum):
    DOMAIN_WALL = "domain-wall"
    BULK = "bulk"


@dataclass(frozen=True)
class SchemeSpec:
    """Detection scheme: the walker starts at the wall (x = 0) or in the bulk at ``x0``."""

    scheme: Scheme = Scheme.DOMAIN_WALL
    x0: int = 0
    coin: int = 0
    steps: int = 7

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if self.scheme is Scheme.DOMAIN_WALL and self.x0 != 0:
            raise ConfigError("the domain-wall scheme starts at x = 0")
        if self.coin not in (0, 1):
            raise ConfigError(f"coin must be 0 or 1, got {self.coin!r}")
        if self.steps < 0:
            raise ConfigError(f"steps must be >= 0, got {self.steps}")

    @classmethod
    def domain_wall(cls, steps: int = 7, coin: int = 0) -> "SchemeSpec":
        return cls(Scheme.DOMAIN_WALL, 0, coin, steps)

    @classmethod
    def bulk(cls, x0: int = 6, steps: int = 7, coin: int = 0) -> "SchemeSpec":
        return cls(Scheme.BULK, x0, coin, steps)

    @property
    def margin(self) -> int:
        return self.steps + 2


def lattice_for(left: CoinParams, right: CoinParams, gamma: float, spec: SchemeSpec) -> WalkConfig:
    """Smallest open domain-wall lattice keeping ``steps + 2`` free sites on both sides of the start."""
    lo = spec.x0 - spec.margin
    hi = spec.x0 + spec.margin
    return WalkConfig(left, right, gamma, max(0, -lo), max(1, hi + 1), Boundary.OPEN)


def check_margins(config: WalkConfig, spec: SchemeSpec) -> None:
    if config.boundary is Boundary.PERIODIC:
        raise ConfigError("dynamics require open boundaries")
    lo, hi = -config.n_left, config.n_right - 1
    if spec.x0 - spec.margin < lo or spec.x0 + spec.margin > hi:
        raise ConfigError(
            f"lattice [{lo}, {hi}] leaves less than steps + 2 = {spec.margin} sites around x0 = {spec.x0}")


@dataclass(frozen=True)
class Trajectory:
    """Record of a lossy walk.

    ``site_probs[t, i, c]`` is the surviving probability on site
    ``positions[i]`` with coin ``c`` after ``t`` steps; ``loss[t]`` is the
    probability removed by the loss factor during step ``t`` (``loss[0] = 0``).
    """

    positions: np.ndarray = field(repr=False)
    site_probs: np.ndarray = field(repr=False)
    loss: np.ndarray = field(repr=False)
    gamma: float
    start: int
    final_state: np.ndarray = field(repr=False)

    @property
    def steps(self) -> int:
        return len(self.loss) - 1

    @property
    def times(self) -> np.ndarray:
        return np.arange(self.steps + 1)

    @property
    def survival(self) -> np.ndarray:
        return self.site_probs.sum(axis=(1, 2))

    @property
    def cumulative_loss(self) -> np.ndarray:
        return np.cumsum(self.loss)

    def site_index(self, x: int) -> int:
        i = x - int(self.positions[0])
        if not 0 <= i < len(self.positions):
            raise DomainError(f"site {x} outside [{self.positions[0]}, {self.positions[-1]}]")
        return i


def evolve(config: WalkConfig, spec: SchemeSpec) -> Trajectory:
    """Apply the lossy step operator ``spec.steps`` times to ``|x0> (x) |coin>``.

    The loss removed inside each step is read off right after the loss factor.
    """
    check_margins(config, spec)
    f = build_step_factors(config, Variant.LOSSY)
    removed = 1.0 - f.loss ** 2
    psi = np.zeros(config.dim, dtype=complex)
    psi[config.index(spec.x0, spec.coin)] = 1.0

    n = config.n_sites
    probs = np.empty((spec.steps + 1, n, 2))
    loss = np.zeros(spec.steps + 1)
    probs[0] = (np.abs(psi) ** 2).reshape(n, 2)
    for t in range(1, spec.steps + 1):
        mid = f.inner @ psi
        weight = np.abs(mid) ** 2
        loss[t] = float(removed @ weight)
        psi = f.outer @ (f.loss * mid)
        probs[t] = (np.abs(psi) ** 2).reshape(n, 2)
    return Trajectory(config.positions, probs, loss, config.gamma, spec.x0, psi)


def _gamma(traj: Trajectory, gamma: float | None) -> float:
    if gamma is None:
        return traj.gamma
    if not math.isclose(gamma, traj.gamma, rel_tol=0.0, abs_tol=1e-15):
        raise ContractError(f"trajectory was run with gamma={traj.gamma}, got gamma={gamma}")
    return gamma


def _normalisation(traj: Trajectory) -> np.ndarray:
    # detected plus lost; identically 1 for exact amplitudes
    return traj.survival + traj.cumulative_loss


def corrected_total(traj: Trajectory, gamma: float | None = None) -> np.ndarray:
    """``P(t) = e^{2 gamma t} * survival / (survival + lost)``: the balanced-walk norm."""
    g = _gamma(traj, gamma)
    return np.exp(2 * g * traj.times) * traj.survival / _normalisation(traj)


def corrected_site(traj: Trajectory, x0: int | None = None, gamma: float | None = None) -> np.ndarray:
    """``P_x0(t)``: corrected probability on site ``x0`` (both coin states); defaults to the start site."""
    g = _gamma(traj, gamma)
    i = traj.site_index(traj.start if x0 is None else x0)
    return np.exp(2 * g * traj.times) * traj.site_probs[:, i, :].sum(axis=1) / _normalisation(traj)
