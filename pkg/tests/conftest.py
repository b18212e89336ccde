import math

import numpy as np
import pytest
import scipy.linalg as sla
from hypothesis import strategies as st

from nbwalk.bandtheory import bloch_operator
from nbwalk.model import Boundary, CoinParams, WalkConfig

GAMMA = 0.2746
WEAK_GAMMA = 0.1373

angles_pi = st.floats(-1.0, 1.0, allow_nan=False)
gammas = st.floats(0.0, 1.0, allow_nan=False)
coins = st.builds(CoinParams.from_pi, angles_pi, angles_pi)


@st.composite
def configs(draw, max_sites=8, gamma=gammas, boundary=None):
    n_left = draw(st.integers(0, max_sites - 2))
    n_right = draw(st.integers(max(1, 2 - n_left), max_sites - n_left))
    b = boundary if boundary is not None else draw(st.sampled_from(list(Boundary)))
    return WalkConfig(draw(coins), draw(coins), draw(gamma), n_left, n_right, b)


def rotation_oracle(theta: float) -> np.ndarray:
    """exp(-i theta sigma_y) by matrix exponential."""
    sigma_y = np.array([[0, -1j], [1j, 0]])
    return sla.expm(-1j * theta * sigma_y)


def step_operator_oracle(config: WalkConfig, loss_diag: tuple[float, float]) -> np.ndarray:
    """Dense step operator built factor by factor from explicit basis maps."""
    n = config.n_sites
    dim = 2 * n
    periodic = config.boundary is Boundary.PERIODIC

    def site_op(angle_of):
        out = np.zeros((dim, dim), dtype=complex)
        for i, x in enumerate(config.positions):
            coin = config.left if x < 0 else config.right
            out[2 * i:2 * i + 2, 2 * i:2 * i + 2] = rotation_oracle(angle_of(coin) / 2)
        return out

    def shift(coin_state, step):
        out = np.zeros((dim, dim))
        for i in range(n):
            out[2 * i + 1 - coin_state, 2 * i + 1 - coin_state] = 1.0
            j = i + step
            if periodic:
                j %= n
            elif not 0 <= j < n:
                continue
            out[2 * j + coin_state, 2 * i + coin_state] = 1.0
        return out

    r1 = site_op(lambda c: c.theta1)
    r2 = site_op(lambda c: c.theta2)
    s1 = shift(1, +1)
    s2 = shift(0, -1)
    m = np.diag(np.tile(loss_diag, n))
    return r1 @ s2 @ r2 @ m @ r2 @ s1 @ r1


def vieta_root_product(coin, gamma, lam):
    """|beta1 beta2| from the quadratic beta * (Tr U(beta) - lam - 1/lam) = 0.

    The coefficients are recovered by sampling the directly multiplied
    2x2 operator at three points, so no closed form enters the oracle.
    """
    samples = np.array([0.7, 1.3, 2.1 + 0.4j])
    vals = [b * (np.trace(bloch_operator(coin, gamma, b)) - lam - 1 / lam) for b in samples]
    coeffs = np.linalg.solve(np.vander(samples, 3), vals)
    return abs(coeffs[2] / coeffs[0])


def bisect_oracle(f, lo, hi, tol=1e-15):
    flo = f(lo)
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if (f(mid) > 0) == (flo > 0):
            lo = mid
        else:
            hi = mid
    return 0.5 * (lo + hi)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


def pi(x: float) -> float:
    return x * math.pi
