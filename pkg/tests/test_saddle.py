"""
Unit tests for stochastic heavy-ball saddle escape, its diagnostics and the benchmark objectives.
"""

from dataclasses import replace

import numpy as np
import pytest

from fenchel_game.oracles import make_quadratic
from fenchel_game.saddle import (
    DiagnosticsConfig,
    SaddleConfig,
    apcg_matrix,
    apcg_psd,
    beta_sweep,
    cnc_sgd_run,
    diagnostics,
    gd_run,
    min_eigenvector,
    overparam_distance,
    overparam_phase_objective,
    phase_retrieval_objective,
    relative_distance,
    saddle_parameter_table,
    sample_indices,
    sgd_momentum_reference,
    toy_saddle_objective,
)


class TestSaddleConfig:
    """Test parameter validation and the boost schedule."""

    def test_defaults(self):
        """Test r = 10 eta and the boost schedule."""
        config = SaddleConfig(eta=0.01, T=2500)
        assert config.boost_step == pytest.approx(0.1)
        assert config.step_size(0) == pytest.approx(0.1)
        assert config.step_size(1) == pytest.approx(0.01)
        assert config.step_size(1000) == pytest.approx(0.1)
        assert config.boosted_steps() == 3

    def test_boost_below_eta(self):
        """r must be at least eta."""
        with pytest.raises(ValueError, match="must be at least eta"):
            SaddleConfig(eta=0.1, r=0.05)

    def test_invalid_values(self):
        """Test the remaining checks."""
        with pytest.raises(ValueError, match="eta must be positive"):
            SaddleConfig(eta=0.0)
        with pytest.raises(ValueError, match="beta must lie"):
            SaddleConfig(eta=0.1, beta=1.0)
        with pytest.raises(ValueError, match="T_thred"):
            SaddleConfig(eta=0.1, T_thred=0)
        with pytest.raises(ValueError, match="T must be nonnegative"):
            SaddleConfig(eta=0.1, T=-1)
        with pytest.raises(ValueError, match="record_every"):
            SaddleConfig(eta=0.1, record_every=0)

    def test_diagnostics_config(self):
        """tau must leave room for k."""
        with pytest.raises(ValueError, match="tau >= 2"):
            DiagnosticsConfig(tau=1)
        with pytest.raises(ValueError, match="eps must be positive"):
            DiagnosticsConfig(eps=0.0)


class TestMomentumSGD:
    """Test the momentum SGD loop."""

    def test_indices_are_reproducible(self):
        """Test the Philox index stream."""
        a = sample_indices(3, 10, 100)
        b = sample_indices(3, 10, 100)
        np.testing.assert_array_equal(a, b)
        assert a.min() >= 0
        assert a.max() < 10
        assert not np.array_equal(a, sample_indices(4, 10, 100))

    def test_matches_reference_loop(self):
        """Test that the traced run follows the plain loop exactly."""
        objective = toy_saddle_objective(n=10, seed=1)
        config = SaddleConfig(eta=0.01, beta=0.9, T=60, T_thred=20, seed=5)
        trace = cnc_sgd_run(objective, config, keep_history=True)
        path = sgd_momentum_reference(objective, config)
        assert len(trace.iterates) == 61
        for w, ref in zip(trace.iterates, path):
            np.testing.assert_array_equal(w, ref)

    def test_boosted_column(self):
        """Test that boosted steps land on multiples of T_thred."""
        objective = toy_saddle_objective(n=5)
        trace = cnc_sgd_run(objective, SaddleConfig(eta=0.01, T=25, T_thred=10))
        boosted = [row["t"] for row in trace.rows if row["boosted"]]
        assert boosted == [0, 10, 20]
        assert trace.metadata["stopped_at"] == 25

    def test_boost_count_when_period_divides_T(self):
        """Test that the boost at t = T is applied and the run ends at w_{T+1}."""
        objective = toy_saddle_objective(n=5, seed=2)
        config = SaddleConfig(eta=0.01, beta=0.5, T=20, T_thred=10, seed=3)
        trace = cnc_sgd_run(objective, config, keep_history=True)
        marked = [row["t"] for row in trace.rows if row["boosted"]]
        path = sgd_momentum_reference(objective, config)

        assert marked == [0, 10, 20]
        assert trace.metadata["boosted_steps"] == config.boosted_steps() == 3
        assert len(trace.iterates) == 21
        assert len(path) == 22
        np.testing.assert_array_equal(trace.metadata["w_final"], path[-1])

    def test_early_stop_takes_no_step(self):
        """Test that a run stopped by stop_below keeps the point it stopped at."""
        objective = toy_saddle_objective(n=5)
        config = SaddleConfig(eta=0.01, T=20, T_thred=10, stop_below=1.0)
        trace = cnc_sgd_run(objective, config)

        assert trace.metadata["stopped_at"] == 0
        assert trace.metadata["boosted_steps"] == 0
        assert trace.rows[-1]["boosted"] is False
        np.testing.assert_array_equal(trace.metadata["w_final"], np.zeros(objective.point_shape))

    def test_record_every(self):
        """Test trace thinning keeps the last row."""
        objective = toy_saddle_objective(n=5)
        trace = cnc_sgd_run(objective, SaddleConfig(eta=0.01, T=25, record_every=10))
        assert trace.column("t") == [0, 10, 20, 25]

    def test_escapes_toy_saddle(self):
        """Test that momentum SGD leaves the origin and reaches negative values."""
        objective = toy_saddle_objective(n=10, seed=0)
        config = SaddleConfig(eta=0.002, beta=0.9, T=20000, T_thred=1000, record_every=100, stop_below=-0.005)
        trace = cnc_sgd_run(objective, config)
        assert trace.metadata["stopped_at"] < 20000
        assert objective.value(trace.metadata["w_final"]) <= -0.005

    def test_thresholds_recorded(self):
        """Test first-hit times of the tracked distance."""
        objective, w_star = phase_retrieval_objective(n=50, d=3, seed=2, w_star=[0.8, -0.5, 0.3])
        rng = np.random.default_rng(0)
        w0 = w_star + 0.05 * rng.standard_normal(3)
        config = SaddleConfig(eta=0.005, beta=0.5, T=3000, thresholds=(0.5, 1e-3))
        trace = cnc_sgd_run(objective, config, w0, lambda w: relative_distance(w, w_star))
        first = trace.metadata["first_below"]
        assert first[0.5] == 0
        assert 1e-3 in first
        assert first[1e-3] >= first[0.5]

    def test_beta_sweep_order_and_values(self):
        """Test that the sweep keeps the input order and matches single runs."""
        objective = toy_saddle_objective(n=10, seed=2)
        config = SaddleConfig(eta=0.01, T=40, T_thred=10)
        betas = [0.9, 0.0, 0.5]
        results = beta_sweep(objective, config, betas, seeds={0.9: 1, 0.0: 2, 0.5: 3})
        assert list(results) == betas
        single = cnc_sgd_run(objective, replace(config, beta=0.5, seed=3))
        assert results[0.5].column("f_value") == single.column("f_value")


class TestDiagnostics:
    """Test the alignment and curvature measurements."""

    def test_large_gradient_regime(self):
        """Test apag with m = g and no apcg."""
        objective = make_quadratic(np.diag([1.0, -0.5]), [1.0, 0.0])
        g = objective.gradient(np.zeros(2))
        row = diagnostics(objective, 0, np.zeros(2), g, g, 0.1, 0.5, DiagnosticsConfig(tau=5))
        assert row.apag_ratio == pytest.approx(0.0)
        assert row.apcg_ratio is None
        assert row.grace_value == pytest.approx(0.5)
        assert row.cnc_proxy == pytest.approx(0.0)

    def test_small_gradient_regime(self):
        """Test that apcg is measured near a saddle."""
        objective = make_quadratic(np.diag([1.0, -0.5]), [0.001, 0.0])
        g = objective.gradient(np.zeros(2))
        row = diagnostics(objective, 3, np.zeros(2), g, g, 0.1, 0.5, DiagnosticsConfig(tau=5))
        assert row.apag_ratio is None
        assert row.apcg_ratio is not None
        assert row.apcg_suppressed is False

    def test_apcg_suppressed(self):
        """Large steps make G_s indefinite and suppress apcg."""
        objective = make_quadratic(np.diag([1.0, -0.5]), [0.001, 0.0])
        g = objective.gradient(np.zeros(2))
        row = diagnostics(objective, 3, np.zeros(2), g, g, 1.0, 0.5, DiagnosticsConfig(tau=5))
        assert row.apcg_ratio is None
        assert row.apcg_suppressed is True

    def test_apcg_matrix_without_momentum(self):
        """Test M = (I - eta H)^(2 tau - 1 - k) when beta = 0."""
        H = np.diag([1.0, -0.5])
        M = apcg_matrix(H, 0.1, 0.0, tau=3, k=1)
        np.testing.assert_allclose(M, np.diag([0.9**4, 1.05**4]))

    def test_apcg_psd(self):
        """Test the PSD condition on the largest factor."""
        evals = np.array([1.0, -0.5])
        assert apcg_psd(evals, 0.1, 0.5, 5)
        assert not apcg_psd(evals, 1.0, 0.5, 5)

    def test_min_eigenvector_sign(self):
        """Test the sign convention of the smallest eigenvector."""
        lam, v = min_eigenvector(np.diag([1.0, -1.0]))
        assert lam == pytest.approx(-1.0)
        np.testing.assert_allclose(v, [0.0, 1.0])

    def test_diagnostics_columns_in_run(self):
        """Test that a run with diagnostics adds their columns."""
        objective = toy_saddle_objective(n=5)
        trace = cnc_sgd_run(objective, SaddleConfig(eta=0.001, beta=0.5, T=5), diagnostics_config=DiagnosticsConfig(tau=5))
        for name in ("apag_ratio", "apcg_ratio", "grace_value", "cnc_proxy"):
            assert name in trace.columns


class TestObjectives:
    """Test the benchmark objectives."""

    def test_toy_origin(self):
        """Test f(0) = 0 and the finite-sum structure."""
        objective = toy_saddle_objective(n=10, seed=3)
        assert objective.dim == 2
        assert objective.value(np.zeros(2)) == 0.0
        w = np.array([0.3, -0.2])
        mean = np.mean([objective.component_gradient(i, w) for i in range(10)], axis=0)
        np.testing.assert_allclose(mean, objective.gradient(w))

    def test_toy_needs_components(self):
        """n must be positive."""
        with pytest.raises(ValueError, match="at least 1"):
            toy_saddle_objective(n=0)

    def test_phase_retrieval_gradient(self):
        """Test the gradient against central differences and the component mean."""
        objective, w_star = phase_retrieval_objective(n=30, d=4, seed=1)
        assert objective.value(w_star) == pytest.approx(0.0, abs=1e-14)
        w = np.array([0.2, -0.1, 0.4, 0.3])
        grad = objective.gradient(w)
        h = 1e-6
        for k in range(4):
            e = np.zeros(4)
            e[k] = h
            numeric = (objective.value(w + e) - objective.value(w - e)) / (2 * h)
            assert grad[k] == pytest.approx(numeric, rel=1e-5, abs=1e-8)
        mean = np.mean([objective.component_gradient(i, w) for i in range(30)], axis=0)
        np.testing.assert_allclose(mean, grad, atol=1e-12)

    def test_phase_retrieval_hessian(self):
        """Test the Hessian against differences of gradients."""
        objective, _ = phase_retrieval_objective(n=30, d=3, seed=2)
        w = np.array([0.1, 0.5, -0.2])
        H = objective.hessian(w)
        h = 1e-6
        for k in range(3):
            e = np.zeros(3)
            e[k] = h
            column = (objective.gradient(w + e) - objective.gradient(w - e)) / (2 * h)
            np.testing.assert_allclose(H[:, k], column, rtol=1e-5, atol=1e-7)

    def test_relative_distance_sign_invariant(self):
        """Test that w and -w are equally close to w*."""
        w_star = np.array([1.0, 2.0])
        assert relative_distance(-w_star, w_star) == 0.0
        assert relative_distance(np.zeros(2), w_star) == pytest.approx(1.0)

    def test_overparam_single_column(self):
        """Test that K = 1 is a quarter of phase retrieval."""
        w_star = np.array([1.0, 0.0, 0.0])
        overparam, _ = overparam_phase_objective(1, d=3, n=40, seed=6, w_star=w_star)
        phase, _ = phase_retrieval_objective(n=40, d=3, seed=6, w_star=w_star)
        w = np.array([0.3, -0.4, 0.2])
        assert overparam.value(w[:, None]) == pytest.approx(0.25 * phase.value(w))

    def test_overparam_distance(self):
        """Test the distance at zero and at a rotated solution."""
        w_star = np.array([1.0, 0.0, 0.0])
        assert overparam_distance(np.zeros((3, 2)), w_star) == pytest.approx(1.0)
        q = np.array([0.6, 0.8])
        assert overparam_distance(np.outer(w_star, q), w_star) == pytest.approx(0.0, abs=1e-12)

    def test_overparam_needs_width(self):
        """K must be positive."""
        with pytest.raises(ValueError, match="K must be at least 1"):
            overparam_phase_objective(0)

    def test_gd_run_decreases(self):
        """Test full-batch gradient descent on a convex quadratic."""
        objective = make_quadratic(np.diag([1.0, 2.0]), [1.0, -1.0])
        trace = gd_run(objective, np.zeros(2), 0.1, 100, record_every=10)
        assert trace.column("t")[-1] == 100
        assert trace.last("f_value") < trace.rows[0]["f_value"]
        np.testing.assert_allclose(trace.metadata["w_final"], [-1.0, 0.5], atol=1e-3)


class TestParameterTable:
    """Test the escape-analysis parameter table."""

    def test_values(self):
        """Test r, eta, F_thred and T_thred with unit constants."""
        params = saddle_parameter_table(0.1, 0.5, delta=0.1)
        c0 = 1.0 / 1152.0
        assert params.r == pytest.approx(0.1 * 0.01 * c0)
        assert params.eta == pytest.approx(0.01 * 1e-5 * c0 / 24.0)
        assert params.F_thred == pytest.approx(0.1 * 1e-4 * c0 / 576.0)
        expected = 0.5 / (params.eta * 0.1) * np.log(1.0 / (0.5 * 0.1 * 0.1))
        assert params.T_thred == pytest.approx(expected)

    def test_constraints(self):
        """Test constraint flags with unit constants."""
        params = saddle_parameter_table(0.1, 0.5)
        assert params.constraints["eta <= (1-beta)/L"] is True
        assert params.constraints["L(1-beta)^3 > 1"] is False

    def test_invalid_eps(self):
        """eps must lie in (0, 1]."""
        with pytest.raises(ValueError, match="eps must lie"):
            saddle_parameter_table(0.0, 0.5)
