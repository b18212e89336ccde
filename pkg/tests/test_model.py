import json
import math

import numpy as np
import pytest
import scipy.sparse as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import GAMMA, WEAK_GAMMA, bisect_oracle, configs, step_operator_oracle
from nbwalk.bandtheory import bloch_operator
from nbwalk.errors import ConfigError, ContractError, DomainError
from nbwalk.model import (Boundary, CoinParams, Variant, WalkConfig, balanced_from_lossy,
                          build_step_factors, build_step_operator, coin_rotation, loss_fraction,
                          loss_parameter, wrap_angle)


class TestLossFraction:
    def test_zero_gamma_has_no_loss(self):
        assert loss_fraction(0.0) == 0.0

    @pytest.mark.parametrize("gamma", [GAMMA, WEAK_GAMMA])
    def test_agrees_with_bisection_of_inverse(self, gamma):
        p_oracle = bisect_oracle(lambda p: -0.25 * math.log(1 - p) - gamma, 0.0, 1 - 1e-12)
        assert loss_fraction(gamma) == pytest.approx(p_oracle, abs=1e-12)

    @given(st.floats(0.0, 2.0))
    def test_round_trip(self, gamma):
        assert loss_parameter(loss_fraction(gamma)) == pytest.approx(gamma, abs=1e-12)

    @given(st.floats(0.0, 0.999))
    def test_inverse_round_trip(self, p):
        assert loss_fraction(loss_parameter(p)) == pytest.approx(p, abs=1e-12)

    @pytest.mark.parametrize("bad", [-1e-9, -1.0, math.nan])
    def test_negative_gamma_is_rejected(self, bad):
        with pytest.raises(DomainError):
            loss_fraction(bad)

    @pytest.mark.parametrize("bad", [-0.1, 1.0, 1.5])
    def test_loss_parameter_domain(self, bad):
        with pytest.raises(DomainError):
            loss_parameter(bad)


class TestAngles:
    @given(st.floats(-50, 50))
    def test_wrap_lands_in_half_open_interval(self, theta):
        w = wrap_angle(theta)
        assert -math.pi < w <= math.pi
        assert math.isclose(math.cos(w), math.cos(theta), abs_tol=1e-9)
        assert math.isclose(math.sin(w), math.sin(theta), abs_tol=1e-9)

    def test_minus_pi_maps_to_pi(self):
        assert wrap_angle(-math.pi) == math.pi

    def test_units_of_pi(self):
        c = CoinParams.from_pi(0.5625, -0.44)
        assert c.theta1 == pytest.approx(0.5625 * math.pi)
        assert c.theta2_pi == pytest.approx(-0.44)

    def test_rotation_matches_matrix_exponential(self):
        from conftest import rotation_oracle
        for theta in (0.0, 0.3, -1.2, 2.9):
            np.testing.assert_allclose(coin_rotation(theta), rotation_oracle(theta), atol=1e-14)


class TestWalkConfig:
    def test_sites_and_wall_position(self):
        cfg = WalkConfig(CoinParams(0.1, 0.2), CoinParams(0.3, 0.4), GAMMA, 2, 3)
        assert cfg.n_sites == 5 and cfg.dim == 10
        assert list(cfg.positions) == [-2, -1, 0, 1, 2]
        t1, t2 = cfg.site_angles()
        assert list(t1) == [0.1, 0.1, 0.3, 0.3, 0.3]
        assert list(t2) == [0.2, 0.2, 0.4, 0.4, 0.4]
        assert cfg.index(-2, 0) == 0 and cfg.index(2, 1) == 9

    @pytest.mark.parametrize("n_left, n_right", [(0, 1), (1, 0), (-1, 5), (0, 0)])
    def test_invalid_sizes(self, n_left, n_right):
        with pytest.raises(ConfigError):
            WalkConfig(CoinParams(0, 0), CoinParams(0, 0), 0.0, n_left, n_right)

    def test_negative_gamma(self):
        with pytest.raises(ConfigError):
            WalkConfig(CoinParams(0, 0), CoinParams(0, 0), -0.1, 1, 1)

    def test_index_out_of_range(self):
        cfg = WalkConfig.uniform(CoinParams(0, 0), 0.0, 4)
        with pytest.raises(DomainError):
            cfg.index(4)
        with pytest.raises(DomainError):
            cfg.index(0, 2)

    @given(configs(max_sites=20))
    def test_json_round_trip(self, cfg):
        record = json.loads(json.dumps(cfg.to_dict()))
        back = WalkConfig.from_dict(record)
        assert back.n_left == cfg.n_left and back.n_right == cfg.n_right
        assert back.boundary is cfg.boundary
        assert back.left.theta1 == pytest.approx(cfg.left.theta1, abs=1e-15)
        assert back.right.theta2 == pytest.approx(cfg.right.theta2, abs=1e-15)

    def test_from_dict_reports_missing_fields(self):
        with pytest.raises(ConfigError, match="gamma"):
            WalkConfig.from_dict({"theta1_left_pi": 0, "theta2_left_pi": 0, "theta1_right_pi": 0,
                                  "theta2_right_pi": 0, "n_left": 1, "n_right": 1, "boundary": "open"})

    def test_from_dict_rejects_unknown_boundary(self):
        record = WalkConfig.uniform(CoinParams(0, 0), 0.0, 4).to_dict()
        record["boundary"] = "twisted"
        with pytest.raises(ConfigError):
            WalkConfig.from_dict(record)


class TestStepOperator:
    @settings(max_examples=40, deadline=None)
    @given(configs(max_sites=7))
    def test_matches_factor_by_factor_oracle(self, cfg):
        g = cfg.gamma
        u = build_step_operator(cfg, Variant.BALANCED).matrix
        np.testing.assert_allclose(u, step_operator_oracle(cfg, (math.exp(g), math.exp(-g))), atol=1e-12)
        ue = build_step_operator(cfg, Variant.LOSSY).matrix
        np.testing.assert_allclose(ue, step_operator_oracle(cfg, (1.0, math.exp(-2 * g))), atol=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(configs(max_sites=12, gamma=st.just(0.0), boundary=Boundary.PERIODIC))
    def test_unitary_without_loss_on_a_ring(self, cfg):
        for variant in Variant:
            u = build_step_operator(cfg, variant).matrix
            assert np.max(np.abs(u.conj().T @ u - np.eye(cfg.dim))) < 1e-12

    @settings(max_examples=40, deadline=None)
    @given(configs(max_sites=12, gamma=st.just(0.0), boundary=Boundary.OPEN))
    def test_open_chain_without_loss_is_a_contraction_and_interior_isometry(self, cfg):
        # amplitude pushed past an edge is annihilated, so only interior states keep their norm
        u = build_step_operator(cfg).matrix
        assert np.linalg.norm(u, 2) <= 1 + 1e-12
        norms = np.linalg.norm(u, axis=0)
        for x in cfg.positions[2:-2]:
            for c in (0, 1):
                assert norms[cfg.index(int(x), c)] == pytest.approx(1.0, abs=1e-12)

    @settings(max_examples=40, deadline=None)
    @given(configs(max_sites=12))
    def test_balanced_is_scaled_lossy(self, cfg):
        u = build_step_operator(cfg, Variant.BALANCED).matrix
        ue = build_step_operator(cfg, Variant.LOSSY).matrix
        np.testing.assert_allclose(u, math.exp(cfg.gamma) * ue, rtol=0, atol=1e-13)

    @settings(max_examples=40, deadline=None)
    @given(configs(max_sites=12))
    def test_column_support_is_local(self, cfg):
        u = build_step_operator(cfg).matrix
        nonzero = np.abs(u) > 1e-12
        site = np.repeat(np.arange(cfg.n_sites), 2)
        hop = np.abs(site[:, None] - site[None, :])
        if cfg.boundary is Boundary.PERIODIC:
            hop = np.minimum(hop, cfg.n_sites - hop)
        assert not np.any(nonzero & (hop > 1))
        assert np.max(nonzero.sum(axis=0)) <= 6
        # before the closing coin rotation each state reaches at most four basis states
        f = build_step_factors(cfg)
        r1 = coin_rotation(cfg.site_angles()[0] / 2)
        inner_part = sp.block_diag(list(r1), format="csr").T @ (f.outer @ sp.diags(f.loss) @ f.inner)
        assert np.max((np.abs(inner_part.toarray()) > 1e-12).sum(axis=0)) <= 4

    @settings(max_examples=25, deadline=None)
    @given(coin=st.builds(CoinParams.from_pi, st.floats(-1, 1), st.floats(-1, 1)),
           gamma=st.floats(0, 1), n=st.integers(3, 24))
    def test_periodic_determinant_is_one(self, coin, gamma, n):
        cfg = WalkConfig.uniform(coin, gamma, n, Boundary.PERIODIC)
        det = np.linalg.det(build_step_operator(cfg).matrix)
        assert abs(det - 1) < 1e-8

    def test_periodic_spectrum_equals_bloch_spectrum(self):
        coin = CoinParams.from_pi(0.5625, -0.44)
        n = 32
        cfg = WalkConfig.uniform(coin, GAMMA, n, Boundary.PERIODIC)
        lam = np.linalg.eigvals(build_step_operator(cfg).matrix)
        k = 2 * np.pi * np.arange(n) / n
        bloch = np.linalg.eigvals(bloch_operator(coin, GAMMA, np.exp(1j * k))).ravel()
        # every real-space eigenvalue has a Bloch partner and vice versa
        d = np.abs(lam[:, None] - bloch[None, :])
        assert d.min(axis=1).max() < 1e-9
        assert d.min(axis=0).max() < 1e-9

    @given(configs(max_sites=10))
    def test_empty_left_region_reduces_to_uniform_bulk(self, cfg):
        wall = WalkConfig(cfg.left, cfg.right, cfg.gamma, 0, cfg.n_sites, cfg.boundary)
        bulk = WalkConfig.uniform(cfg.right, cfg.gamma, cfg.n_sites, cfg.boundary)
        np.testing.assert_array_equal(build_step_operator(wall).matrix, build_step_operator(bulk).matrix)

    def test_matrix_is_read_only(self):
        op = build_step_operator(WalkConfig.uniform(CoinParams(0.1, 0.2), 0.1, 3))
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 1.0

    def test_loss_entries(self):
        cfg = WalkConfig.uniform(CoinParams(0, 0), GAMMA, 2)
        lossy = build_step_factors(cfg, Variant.LOSSY).loss
        balanced = build_step_factors(cfg, Variant.BALANCED).loss
        assert lossy[1] == pytest.approx(math.sqrt(1 - loss_fraction(GAMMA)), abs=1e-15)
        assert balanced[1] == pytest.approx(math.exp(-GAMMA), abs=1e-15)
        assert balanced[0] == pytest.approx(math.exp(GAMMA), abs=1e-15)
        assert lossy[0] == 1.0

    def test_pure_translation_without_rotation(self):
        cfg = WalkConfig.uniform(CoinParams(0, 0), 0.0, 5, Boundary.PERIODIC)
        u = build_step_operator(cfg).matrix
        # coin 1 moves right, coin 0 moves left
        assert u[cfg.index(3, 1), cfg.index(2, 1)] == 1
        assert u[cfg.index(1, 0), cfg.index(2, 0)] == 1


class TestBalancedFromLossy:
    def test_identity_without_loss(self):
        cfg = WalkConfig.uniform(CoinParams(0.3, 0.7), 0.0, 4)
        lossy = build_step_operator(cfg, Variant.LOSSY)
        np.testing.assert_array_equal(balanced_from_lossy(lossy, 0.0).matrix, lossy.matrix)

    def test_matrix_power_identity(self, rng):
        left = CoinParams(*rng.uniform(-math.pi, math.pi, 2))
        right = CoinParams(*rng.uniform(-math.pi, math.pi, 2))
        cfg = WalkConfig(left, right, GAMMA, 4, 4)
        ue = build_step_operator(cfg, Variant.LOSSY).matrix
        u = build_step_operator(cfg, Variant.BALANCED).matrix
        lhs = math.exp(5 * GAMMA) * np.linalg.matrix_power(ue, 5)
        np.testing.assert_allclose(lhs, np.linalg.matrix_power(u, 5), rtol=0, atol=1e-12)
        np.testing.assert_allclose(balanced_from_lossy(build_step_operator(cfg, Variant.LOSSY), GAMMA).matrix,
                                   u, atol=1e-14)

    def test_gamma_mismatch(self):
        cfg = WalkConfig.uniform(CoinParams(0.3, 0.7), GAMMA, 4)
        with pytest.raises(ContractError):
            balanced_from_lossy(build_step_operator(cfg, Variant.LOSSY), WEAK_GAMMA)

    def test_variant_mismatch(self):
        cfg = WalkConfig.uniform(CoinParams(0.3, 0.7), GAMMA, 4)
        with pytest.raises(ContractError):
            balanced_from_lossy(build_step_operator(cfg, Variant.BALANCED), GAMMA)
