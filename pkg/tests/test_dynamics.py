import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GAMMA, coins, gammas
from nbwalk.bandtheory import nonbloch_spectrum
from nbwalk.dynamics import (
    Scheme,
    SchemeSpec,
    check_margins,
    corrected_site,
    corrected_total,
    evolve,
    lattice_for,
)
from nbwalk.errors import ConfigError, ContractError, DomainError
from nbwalk.model import Boundary, CoinParams, Variant, WalkConfig, build_step_operator

LEFT_A = CoinParams.from_pi(-0.0625, 0.75)


def right(theta2_pi, theta1_pi=0.5625):
    return CoinParams.from_pi(theta1_pi, theta2_pi)


def auto(left, rgt, gamma, spec):
    return evolve(lattice_for(left, rgt, gamma, spec), spec)


specs = st.builds(
    lambda bulk, x0, coin, steps: SchemeSpec.bulk(x0, steps, coin) if bulk else SchemeSpec.domain_wall(steps, coin),
    st.booleans(), st.integers(-8, 8), st.integers(0, 1), st.integers(0, 25))


# --- scheme spec and margins ---

def test_domain_wall_rejects_offset_start():
    with pytest.raises(ConfigError):
        SchemeSpec(Scheme.DOMAIN_WALL, x0=3)


@pytest.mark.parametrize("kwargs", [{"coin": 2}, {"steps": -1}])
def test_scheme_validation(kwargs):
    with pytest.raises(ConfigError):
        SchemeSpec(**kwargs)


@given(specs)
def test_auto_lattice_satisfies_margins(spec):
    cfg = lattice_for(LEFT_A, right(0.45), GAMMA, spec)
    check_margins(cfg, spec)
    assert cfg.boundary is Boundary.OPEN


def test_margin_violation_is_config_error():
    spec = SchemeSpec.domain_wall(steps=7)
    cfg = WalkConfig(LEFT_A, right(0.45), GAMMA, 8, 10)
    with pytest.raises(ConfigError):
        evolve(cfg, spec)
    evolve(cfg.with_sizes(9, 10), spec)


def test_periodic_lattice_refused():
    cfg = WalkConfig(LEFT_A, right(0.45), GAMMA, 20, 20, Boundary.PERIODIC)
    with pytest.raises(ConfigError):
        evolve(cfg, SchemeSpec.domain_wall(steps=3))


# --- ledger and trivial limits ---

def test_initial_step():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.bulk(x0=6, steps=0))
    assert tr.steps == 0
    assert corrected_total(tr)[0] == 1.0
    assert corrected_site(tr)[0] == 1.0
    assert tr.loss[0] == 0.0


@given(coins, coins, specs)
@settings(max_examples=40, deadline=None)
def test_lossless_walk_conserves_norm(left, rgt, spec):
    tr = auto(left, rgt, 0.0, spec)
    assert np.all(tr.loss == 0.0)
    np.testing.assert_allclose(tr.survival, 1.0, atol=1e-12)
    np.testing.assert_allclose(corrected_total(tr), 1.0, atol=1e-12)


@given(coins, coins, gammas, specs)
@settings(max_examples=60, deadline=None)
def test_probability_ledger_closes(left, rgt, gamma, spec):
    tr = auto(left, rgt, gamma, spec)
    np.testing.assert_allclose(tr.survival + tr.cumulative_loss, 1.0, rtol=0, atol=1e-10)
    assert np.all(tr.loss >= 0)


def test_loss_increment_matches_norm_drop():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.domain_wall(steps=12))
    np.testing.assert_allclose(-np.diff(tr.survival), tr.loss[1:], atol=1e-14)


# --- lossy vs balanced evolution ---

def test_lossy_and_balanced_actions_agree_to_150_steps():
    spec = SchemeSpec.bulk(x0=6, steps=150)
    cfg = lattice_for(LEFT_A, right(0.45), GAMMA, spec)
    ue = build_step_operator(cfg, Variant.LOSSY).matrix
    u = build_step_operator(cfg, Variant.BALANCED).matrix
    psi_e = np.zeros(cfg.dim, dtype=complex)
    psi_e[cfg.index(6, 0)] = 1.0
    psi = psi_e.copy()
    worst = 0.0
    for t in range(1, 151):
        psi_e = ue @ psi_e
        psi = u @ psi
        scale = math.exp(GAMMA * t)
        worst = max(worst, np.max(np.abs(scale * psi_e - psi)) / max(1.0, np.max(np.abs(psi))))
    assert worst < 1e-10


@given(coins, coins, gammas)
@settings(max_examples=25, deadline=None)
def test_rescaled_survival_is_balanced_norm(left, rgt, gamma):
    spec = SchemeSpec.domain_wall(steps=10)
    cfg = lattice_for(left, rgt, gamma, spec)
    tr = evolve(cfg, spec)
    u = build_step_operator(cfg, Variant.BALANCED).matrix
    psi = np.zeros(cfg.dim, dtype=complex)
    psi[cfg.index(0, 0)] = 1.0
    for t in range(1, 11):
        psi = u @ psi
        balanced = np.vdot(psi, psi).real
        assert math.isclose(math.exp(2 * gamma * t) * tr.survival[t], balanced, rel_tol=1e-12, abs_tol=1e-12)


def test_final_state_matches_operator_power():
    spec = SchemeSpec.bulk(x0=-3, steps=9, coin=1)
    cfg = lattice_for(LEFT_A, right(0.45), GAMMA, spec)
    ue = build_step_operator(cfg, Variant.LOSSY).matrix
    psi = np.zeros(cfg.dim, dtype=complex)
    psi[cfg.index(-3, 1)] = 1.0
    np.testing.assert_allclose(evolve(cfg, spec).final_state, np.linalg.matrix_power(ue, 9) @ psi, atol=1e-13)


# --- light cone ---

@given(coins, coins, gammas, specs)
@settings(max_examples=40, deadline=None)
def test_light_cone(left, rgt, gamma, spec):
    tr = auto(left, rgt, gamma, spec)
    dist = np.abs(tr.positions - spec.x0)
    for t in range(tr.steps + 1):
        outside = tr.site_probs[t][dist > t]
        assert np.all(outside == 0.0)


# --- corrected probabilities ---

def test_wall_start_grows_in_broken_phase():
    p = corrected_total(auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.domain_wall(steps=7)))
    assert np.all(np.diff(p[1:]) > 0)


def test_wall_start_decays_in_exact_phase():
    p = corrected_total(auto(LEFT_A, right(0.40), GAMMA, SchemeSpec.domain_wall(steps=7)))
    assert np.all(np.diff(p[1:]) < 0)


def test_bulk_start_site_probability_net_growth():
    p6 = corrected_site(auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.bulk(x0=6, steps=7)))
    assert p6[7] > p6[1]


def test_corrected_site_default_and_explicit_agree():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.bulk(x0=6, steps=7))
    np.testing.assert_array_equal(corrected_site(tr), corrected_site(tr, 6))


def test_corrected_site_sums_to_total():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.domain_wall(steps=7))
    total = sum(corrected_site(tr, int(x)) for x in tr.positions)
    np.testing.assert_allclose(total, corrected_total(tr), rtol=1e-12)


def test_corrected_site_out_of_range():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.domain_wall(steps=3))
    with pytest.raises(DomainError):
        corrected_site(tr, 10_000)


def test_gamma_mismatch_is_contract_error():
    tr = auto(LEFT_A, right(0.45), GAMMA, SchemeSpec.domain_wall(steps=3))
    with pytest.raises(ContractError):
        corrected_total(tr, gamma=0.1)
    np.testing.assert_array_equal(corrected_total(tr, gamma=GAMMA), corrected_total(tr))


# --- long-time behaviour ---

@pytest.mark.parametrize("theta2_pi", [0.45, 0.5])
def test_long_time_site_rate_matches_gbz(theta2_pi):
    rgt = right(theta2_pi)
    tr = auto(rgt, rgt, GAMMA, SchemeSpec.domain_wall(steps=150))
    rate = math.log(corrected_site(tr)[-1]) / 300
    gbz = nonbloch_spectrum(rgt, GAMMA).max_imag
    assert gbz > 0.1
    assert abs(rate - gbz) < 0.02


@pytest.mark.parametrize("theta2_pi", [0.40, 0.30, 0.7])
def test_exact_phase_site_probability_stays_bounded(theta2_pi):
    p = corrected_site(auto(LEFT_A, right(theta2_pi), GAMMA, SchemeSpec.bulk(x0=6, steps=150)))
    assert p[150] < 2 * p[:21].max()
    assert np.all(p <= 2 * p[:21].max())
