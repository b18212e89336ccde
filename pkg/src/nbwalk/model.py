"""Real-space Floquet operator of the split-step walk with polarization-selective loss.

The one-step operator is

    U = R(theta1/2) S2 R(theta2/2) M R(theta2/2) S1 R(theta1/2)

on the basis |x> (x) |c>, c in {0, 1}, ordered as index ``2 * (x + n_left) + c``.
``R(theta) = exp(-i theta sigma_y)`` acts site-locally, ``S1`` moves coin |1> one
site right, ``S2`` moves coin |0> one site left, and ``M = exp(gamma sigma_z)``
(balanced gain/loss) or ``M_E = diag(1, sqrt(1 - p))`` (pure loss, as realised by
a partially polarizing beam splitter).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np
import scipy.sparse as sp

from .errors import ConfigError, ContractError, DomainError

__all__ = [
    "Boundary",
    "Variant",
    "CoinParams",
    "WalkConfig",
    "StepOperator",
    "StepFactors",
    "wrap_angle",
    "coin_rotation",
    "loss_fraction",
    "loss_parameter",
    "build_step_factors",
    "build_step_operator",
    "balanced_from_lossy",
]


class Boundary(str, enum.Enum):
    OPEN = "open"
    PERIODIC = "periodic"


class Variant(str, enum.Enum):
    BALANCED = "balanced"
    LOSSY = "lossy"


def wrap_angle(theta: float) -> float:
    """Map an angle in radians to the canonical range (-pi, pi]."""
    theta = float(theta)
    if not math.isfinite(theta):
        raise DomainError(f"angle must be finite, got {theta!r}")
    if -math.pi < theta <= math.pi:
        return theta
    return math.pi - (math.pi - theta) % (2.0 * math.pi)


@dataclass(frozen=True)
class CoinParams:
    """Rotation angles (radians) of one bulk region."""

    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "theta1", wrap_angle(self.theta1))
        object.__setattr__(self, "theta2", wrap_angle(self.theta2))

    @classmethod
    def from_pi(cls, theta1_pi: float, theta2_pi: float) -> "CoinParams":
        """Build from angles given in units of pi (0.4375 means 0.4375*pi)."""
        return cls(theta1_pi * math.pi, theta2_pi * math.pi)

    @property
    def theta1_pi(self) -> float:
        return self.theta1 / math.pi

    @property
    def theta2_pi(self) -> float:
        return self.theta2 / math.pi


@dataclass(frozen=True)
class WalkConfig:
    """Full walk specification.

    Sites run over ``x = -n_left, ..., n_right - 1``; sites with ``x < 0`` use
    ``left`` and sites with ``x >= 0`` use ``right``, so the domain wall sits
    between ``x = -1`` and ``x = 0``.
    """

    left: CoinParams
    right: CoinParams
    gamma: float
    n_left: int
    n_right: int
    boundary: Boundary = Boundary.OPEN

    def __post_init__(self):
        object.__setattr__(self, "boundary", Boundary(self.boundary))
        if not (math.isfinite(self.gamma) and self.gamma >= 0):
            raise ConfigError(f"gamma must be finite and >= 0, got {self.gamma!r}")
        if int(self.n_left) != self.n_left or int(self.n_right) != self.n_right:
            raise ConfigError("site counts must be integers")
        object.__setattr__(self, "n_left", int(self.n_left))
        object.__setattr__(self, "n_right", int(self.n_right))
        if self.n_left < 0:
            raise ConfigError(f"n_left must be >= 0, got {self.n_left}")
        if self.n_right < 1:
            raise ConfigError(f"n_right must be >= 1, got {self.n_right}")
        if self.n_sites < 2:
            raise ConfigError("a walk needs at least two sites")

    @classmethod
    def uniform(cls, coin: CoinParams, gamma: float, n_sites: int,
                boundary: Boundary = Boundary.OPEN) -> "WalkConfig":
        """A single-bulk lattice ``x = 0 .. n_sites-1`` (no domain wall)."""
        return cls(coin, coin, gamma, 0, n_sites, boundary)

    @property
    def n_sites(self) -> int:
        return self.n_left + self.n_right

    @property
    def dim(self) -> int:
        return 2 * self.n_sites

    @property
    def positions(self) -> np.ndarray:
        return np.arange(-self.n_left, self.n_right)

    def index(self, x: int, coin: int = 0) -> int:
        """Basis index of ``|x> (x) |coin>``."""
        if not -self.n_left <= x < self.n_right:
            raise DomainError(f"site {x} outside [{-self.n_left}, {self.n_right - 1}]")
        if coin not in (0, 1):
            raise DomainError(f"coin must be 0 or 1, got {coin!r}")
        return 2 * (x + self.n_left) + coin

    def site_angles(self) -> tuple[np.ndarray, np.ndarray]:
        """Per-site (theta1, theta2) arrays in radians."""
        left = self.positions < 0
        t1 = np.where(left, self.left.theta1, self.right.theta1)
        t2 = np.where(left, self.left.theta2, self.right.theta2)
        return t1, t2

    def with_sizes(self, n_left: int, n_right: int) -> "WalkConfig":
        return WalkConfig(self.left, self.right, self.gamma, n_left, n_right, self.boundary)

    def with_right(self, right: CoinParams) -> "WalkConfig":
        return WalkConfig(self.left, right, self.gamma, self.n_left, self.n_right, self.boundary)

    def to_dict(self) -> dict[str, Any]:
        """The canonical JSON record (angles in units of pi)."""
        return {
            "theta1_left_pi": self.left.theta1_pi,
            "theta2_left_pi": self.left.theta2_pi,
            "theta1_right_pi": self.right.theta1_pi,
            "theta2_right_pi": self.right.theta2_pi,
            "gamma": self.gamma,
            "n_left": self.n_left,
            "n_right": self.n_right,
            "boundary": self.boundary.value,
        }

    @classmethod
    def from_dict(cls, record: Mapping[str, Any]) -> "WalkConfig":
        required = ("theta1_left_pi", "theta2_left_pi", "theta1_right_pi",
                    "theta2_right_pi", "gamma", "n_left", "n_right", "boundary")
        missing = [k for k in required if k not in record]
        if missing:
            raise ConfigError(f"config record missing fields: {', '.join(missing)}")
        try:
            boundary = Boundary(str(record["boundary"]).lower())
        except ValueError:
            raise ConfigError(f"boundary must be 'open' or 'periodic', got {record['boundary']!r}") from None
        return cls(
            left=CoinParams.from_pi(float(record["theta1_left_pi"]), float(record["theta2_left_pi"])),
            right=CoinParams.from_pi(float(record["theta1_right_pi"]), float(record["theta2_right_pi"])),
            gamma=float(record["gamma"]),
            n_left=record["n_left"],
            n_right=record["n_right"],
            boundary=boundary,
        )


def loss_fraction(gamma: float) -> float:
    """Loss probability ``p = 1 - exp(-4 gamma)`` of the beam splitter on coin |1>."""
    if not gamma >= 0:
        raise DomainError(f"gamma must be >= 0, got {gamma!r}")
    return -math.expm1(-4.0 * gamma)


def loss_parameter(p: float) -> float:
    """Inverse of :func:`loss_fraction`: ``gamma = -ln(1 - p) / 4``."""
    if not 0 <= p < 1:
        raise DomainError(f"loss probability must lie in [0, 1), got {p!r}")
    return -0.25 * math.log1p(-p)


def coin_rotation(theta: float | np.ndarray) -> np.ndarray:
    """``exp(-i theta sigma_y)`` as a real 2x2 (or stacked ...x2x2) array."""
    c, s = np.cos(theta), np.sin(theta)
    return np.stack([np.stack([c, -s], -1), np.stack([s, c], -1)], -2)


@dataclass(frozen=True)
class StepFactors:
    """``U = outer @ diag(loss) @ inner`` with the only nonunitary factor exposed.

    ``inner = R(theta2/2) S1 R(theta1/2)`` and ``outer = R(theta1/2) S2 R(theta2/2)``
    are sparse; ``loss`` is the diagonal of ``M`` or ``M_E``.
    """

    inner: sp.csr_matrix
    loss: np.ndarray
    outer: sp.csr_matrix
    variant: Variant
    gamma: float


def _block_rotation(half_angles: np.ndarray) -> sp.csr_matrix:
    return sp.block_diag(list(coin_rotation(half_angles)), format="csr")


def _shifts(n: int, periodic: bool) -> tuple[sp.csr_matrix, sp.csr_matrix]:
    i = np.arange(n)
    # S1: |x,0> -> |x,0>, |x,1> -> |x+1,1>
    dst1 = i + 1
    keep1 = periodic | (dst1 < n)
    rows1 = np.concatenate([2 * i, 2 * (dst1[keep1] % n) + 1])
    cols1 = np.concatenate([2 * i, 2 * i[keep1] + 1])
    # S2: |x,0> -> |x-1,0>, |x,1> -> |x,1>
    dst2 = i - 1
    keep2 = periodic | (dst2 >= 0)
    rows2 = np.concatenate([2 * (dst2[keep2] % n), 2 * i + 1])
    cols2 = np.concatenate([2 * i[keep2], 2 * i + 1])
    s1 = sp.csr_matrix((np.ones(rows1.size), (rows1, cols1)), shape=(2 * n, 2 * n))
    s2 = sp.csr_matrix((np.ones(rows2.size), (rows2, cols2)), shape=(2 * n, 2 * n))
    return s1, s2


def build_step_factors(config: WalkConfig, variant: Variant = Variant.BALANCED) -> StepFactors:
    variant = Variant(variant)
    n = config.n_sites
    t1, t2 = config.site_angles()
    r1 = _block_rotation(t1 / 2)
    r2 = _block_rotation(t2 / 2)
    s1, s2 = _shifts(n, config.boundary is Boundary.PERIODIC)
    g = config.gamma
    if variant is Variant.BALANCED:
        coin_loss = np.array([math.exp(g), math.exp(-g)])
    else:
        # sqrt(1 - p) = exp(-2 gamma)
        coin_loss = np.array([1.0, math.exp(-2.0 * g)])
    inner = (r2 @ s1 @ r1).tocsr()
    outer = (r1 @ s2 @ r2).tocsr()
    return StepFactors(inner, np.tile(coin_loss, n), outer, variant, g)


@dataclass(frozen=True)
class StepOperator:
    """Dense ``2N x 2N`` one-step operator tagged with its loss variant."""

    matrix: np.ndarray = field(repr=False)
    variant: Variant
    gamma: float

    def __post_init__(self):
        self.matrix.flags.writeable = False

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]


def build_step_operator(config: WalkConfig, variant: Variant = Variant.BALANCED) -> StepOperator:
    """Assemble ``R1 S2 R2 M R2 S1 R1`` for ``config``.

    Under open boundaries each shift is truncated on its own: amplitude that
    would leave ``[-n_left, n_right - 1]`` is annihilated. Under periodic
    boundaries indices wrap modulo ``N``.
    """
    f = build_step_factors(config, variant)
    u = f.outer @ sp.diags(f.loss) @ f.inner
    return StepOperator(np.asarray(u.toarray(), dtype=complex), f.variant, f.gamma)


def balanced_from_lossy(op: StepOperator, gamma: float) -> StepOperator:
    """Rescale a lossy operator to the balanced gain/loss one, ``U = e^gamma U_E``."""
    if op.variant is not Variant.LOSSY:
        raise ContractError(f"expected a lossy operator, got {op.variant.value}")
    if not math.isclose(op.gamma, gamma, rel_tol=0.0, abs_tol=1e-15):
        raise ContractError(f"operator built with gamma={op.gamma}, asked to rescale with gamma={gamma}")
    return StepOperator(math.exp(gamma) * op.matrix, Variant.BALANCED, op.gamma)
