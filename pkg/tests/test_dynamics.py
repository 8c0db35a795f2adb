"""
Unit tests for the Fenchel game engine, presets and iterative references.
"""

import numpy as np
import pytest

from fenchel_game.dynamics import (
    PRESETS,
    REFERENCE_METHODS,
    GameConfig,
    Payoff,
    accel_linear_certificate,
    accel_linear_theta,
    equilibrium_gap,
    online_to_batch,
    preset,
    reference_iterative,
    run_dynamics,
)
from fenchel_game.learners import LearnerSpec, build_learner, linear_loss
from fenchel_game.oracles import (
    L2Ball,
    Unconstrained,
    WeightSchedule,
    make_least_squares,
    minimize_over_set,
    make_quadratic,
)


def _quadratic(seed=0, d=4, kappa=10.0, b_scale=3.0):
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    Gamma = (Q * np.linspace(1.0, kappa, d)) @ Q.T
    Gamma = 0.5 * (Gamma + Gamma.T)
    b = b_scale * rng.standard_normal(d)
    return make_quadratic(Gamma, b), np.linalg.solve(Gamma, -b)


class TestPresets:
    """Test the preset registry."""

    def test_all_presets_registered(self):
        """Test that the projection-free presets join the registry."""
        for name in ("frank_wolfe", "nesterov_1mem", "accel_linear", "boundary_fw", "gauge_fw", "nuclear_norm"):
            assert name in PRESETS

    def test_unknown_preset(self):
        """Unknown names should list the valid presets."""
        with pytest.raises(ValueError, match="Valid presets"):
            preset("adagrad", {})

    def test_missing_constant(self):
        """Presets needing L should fail without it."""
        with pytest.raises(ValueError, match="needs parameter 'L'"):
            preset("nesterov_1mem", {"T": 10})

    def test_accel_linear_mu_above_L(self):
        """mu > L should fail."""
        with pytest.raises(ValueError, match="mu <= L"):
            preset("accel_linear", {"mu": 2.0, "L": 1.0})

    def test_accel_linear_theta(self):
        """Test theta = 1/2 sqrt(mu / (L (1 + L_phi)))."""
        assert accel_linear_theta(1.0, 2.0) == pytest.approx(0.5 * np.sqrt(0.25))
        config = preset("accel_linear", {"mu": 1.0, "L": 2.0, "T": 5})
        assert config.extras["theta"] == pytest.approx(0.25)

    def test_adaptive_weights_need_fw_pairing(self):
        """Adaptive weights only work with FTL against best response."""
        with pytest.raises(ValueError, match="adaptive weights"):
            GameConfig(
                name="bad",
                x_strategy=LearnerSpec("ftl"),
                y_strategy=LearnerSpec("ftl"),
                weights=WeightSchedule("adaptive"),
            )

    def test_invalid_payoff(self):
        """Composite payoffs need psi."""
        with pytest.raises(ValueError, match="needs psi"):
            Payoff("composite")


class TestRunDynamics:
    """Test game runs."""

    def test_frank_wolfe_rate(self):
        """Test f(x_bar_T) - f* <= 8LD/(T+1) on a ball."""
        f, _ = _quadratic(seed=6)
        ball = L2Ball(4, 1.0)
        _, f_star = minimize_over_set(f.value, f.gradient, ball, np.zeros(4), 1.0 / f.smoothness_L, 1e-13, 100_000)
        _, _, trace = run_dynamics(preset("frank_wolfe", {"T": 200, "f_star": f_star}), f, ball)
        for row in trace.rows:
            assert row["error"] <= 8.0 * f.smoothness_L * ball.diameter_sq_D / (row["t"] + 1) + 1e-9

    def test_frank_wolfe_distance_quadratic(self):
        """Test that the first LMO answer is already optimal for 1/2||w - c||^2."""
        c = np.array([2.0, 0.0])
        f = make_quadratic(np.eye(2), -c, 0.5 * float(c @ c))
        x_bar, _, trace = run_dynamics(preset("frank_wolfe", {"T": 20, "f_star": 0.5}), f, L2Ball(2, 1.0))
        np.testing.assert_allclose(x_bar, [1.0, 0.0], atol=1e-12)
        assert max(trace.column("error")) <= 1e-12

    def test_trace_columns(self):
        """Test the declared columns and the optional ones."""
        f, _ = _quadratic()
        _, _, trace = run_dynamics(preset("frank_wolfe", {"T": 5, "f_star": 0.0}), f, L2Ball(4))
        assert trace.columns[:7] == ["f_value", "grad_norm", "gap_estimate", "x_regret", "y_regret", "y_bar_norm", "nu"]
        assert "x_gauge" in trace.columns
        assert "error" in trace.columns
        assert len(trace.iterates) == 5
        assert len(trace.actions) == 5

    def test_gap_estimate_bounds_error(self):
        """Test that the gap estimate dominates f(x_bar_t) - f*."""
        f, _ = _quadratic(seed=2)
        ball = L2Ball(4, 1.0)
        _, f_star = minimize_over_set(f.value, f.gradient, ball, np.zeros(4), 1.0 / f.smoothness_L, 1e-13, 100_000)
        _, _, trace = run_dynamics(preset("frank_wolfe", {"T": 100, "f_star": f_star}), f, ball)
        for row in trace.rows:
            assert row["gap_estimate"] >= row["error"] - 1e-8

    def test_nesterov_rate_unconstrained(self):
        """Test T^2 (f(x_bar_T) - f*) <= 8 L D with D = 1/2 ||x*||^2."""
        f, x_star = _quadratic(seed=1, d=5, kappa=20.0)
        space = Unconstrained(5, comparator_radius=20.0)
        config = preset("nesterov_1mem", {"L": f.smoothness_L, "T": 300, "f_star": f.value(x_star)})
        _, _, trace = run_dynamics(config, f, space)
        bound = 8.0 * f.smoothness_L * 0.5 * float(x_star @ x_star)
        for row in trace.rows:
            assert row["t"] ** 2 * row["error"] <= bound * 1.01

    def test_accel_linear_certificate(self):
        """Test error(T) <= C (1 - theta)^T."""
        f, x_star = _quadratic(seed=3, d=4, kappa=10.0)
        config = preset(
            "accel_linear",
            {"mu": f.strong_convexity_mu, "L": f.smoothness_L, "T": 100, "f_star": f.value(x_star)},
        )
        _, _, trace = run_dynamics(config, f, Unconstrained(4, comparator_radius=20.0))
        C = accel_linear_certificate(config, x_star, np.zeros(4))
        theta = config.extras["theta"]
        for row in trace.rows:
            assert row["error"] <= C * (1.0 - theta) ** row["t"] * (1.0 + 1e-9)

    def test_incremental_fw(self):
        """Test the incremental y-player on a least-squares finite sum."""
        rng = np.random.default_rng(4)
        f = make_least_squares(rng.standard_normal((12, 3)), rng.standard_normal(12))
        ball = L2Ball(3, 1.0)
        x_bar, _, trace = run_dynamics(preset("incremental_fw", {"T": 60}), f, ball)
        assert len(trace) == 60
        assert ball.contains(x_bar)
        assert all(np.isfinite(trace.column("f_value")))

    def test_equilibrium_gap_at_optimum(self):
        """Test that the gap vanishes at the saddle point."""
        c = np.array([2.0, 0.0])
        f = make_quadratic(np.eye(2), -c, 2.0)
        x = np.array([1.0, 0.0])
        assert equilibrium_gap(x, f.gradient(x), f, L2Ball(2, 1.0)) == pytest.approx(0.0, abs=1e-12)


class TestEquivalence:
    """Test that game presets reproduce their iterative methods."""

    @pytest.mark.parametrize("method", REFERENCE_METHODS)
    def test_iterates_match(self, method):
        """Test max_t ||x_bar_t - w_t|| <= 1e-8."""
        f, _ = _quadratic(seed=5, d=5)
        if method in ("frank_wolfe", "nesterov_1mem", "nesterov_infmem"):
            decision_set = L2Ball(5, 1.0)
        else:
            decision_set = Unconstrained(5, 10.0)
        params = {"L": f.smoothness_L, "T": 50}
        _, _, game = run_dynamics(preset(method, params), f, decision_set)
        reference = reference_iterative(method, params, f, decision_set, 50)
        deviation = max(np.linalg.norm(a - b) for a, b in zip(game.iterates, reference.iterates))
        assert deviation <= 1e-8

    def test_unknown_reference(self):
        """Methods without an iterative form should fail."""
        f, _ = _quadratic()
        with pytest.raises(ValueError, match="No iterative reference"):
            reference_iterative("gauge_fw", {}, f, L2Ball(4), 5)


class TestOnlineToBatch:
    """Test online-to-batch conversion."""

    def test_average_of_iterates(self):
        """Test that the returned point is the mean of the learner's actions."""
        ball = L2Ball(2, 1.0)
        learner = build_learner(LearnerSpec("best_response"), ball, np.zeros(2))
        losses = [linear_loss([1.0, 0.0]), linear_loss([0.0, 1.0])]
        x = online_to_batch(learner, losses, 4)
        np.testing.assert_allclose(x, [-0.5, -0.5])

    def test_empty_losses(self):
        """An empty sample should fail."""
        learner = build_learner(LearnerSpec("ftl"), L2Ball(2), np.zeros(2))
        with pytest.raises(ValueError, match="empty"):
            online_to_batch(learner, [], 3)
