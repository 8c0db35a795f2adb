"""
Unit tests for the projection-free methods.
"""

import math

import numpy as np
import pytest

from fenchel_game.dynamics import preset
from fenchel_game.oracles import (
    FenchelGameError,
    L2Ball,
    Simplex,
    make_l1_distance,
    make_matrix_completion,
    make_quadratic,
    nuclear_norm,
)
from fenchel_game.projection_free import (
    NuclearConfig,
    NuclearRunState,
    SpectrahedronPoint,
    boundary_fw,
    embed_gradient,
    gauge_ftrl_plus_solve,
    gauge_fw,
    nuclear_run,
    psi_oracle,
    sample_spectrahedron,
)


def _distance_quadratic(c):
    c = np.asarray(c, dtype=np.float64)
    return make_quadratic(np.eye(len(c)), -c, 0.5 * float(c @ c))


def _completion_problem():
    rng = np.random.default_rng(7)
    u = rng.standard_normal(3)
    v = rng.standard_normal(3)
    target = np.outer(u / np.linalg.norm(u), v / np.linalg.norm(v))
    return make_matrix_completion(target, np.ones((3, 3), dtype=bool)), target


class TestBoundaryFW:
    """Test Boundary Frank-Wolfe."""

    def test_iterates_on_boundary(self):
        """Test that every played point lies on the sphere."""
        _, trace = boundary_fw(make_l1_distance([2.0, 0.3]), L2Ball(2, 1.0), 200)
        for row in trace.rows:
            assert row["x_gauge"] == pytest.approx(1.0, abs=1e-12)

    def test_certificate_columns(self):
        """Test the running minimum and the regret bound columns."""
        _, trace = boundary_fw(make_l1_distance([2.0, 0.3]), L2Ball(2, 1.0), 50)
        for name in ("L_T", "degenerate", "bound", "envelope"):
            assert name in trace.columns
        running = trace.column("L_T")
        assert all(a >= b for a, b in zip(running, running[1:]))
        assert all(row["bound"] > 0 for row in trace.rows)
        assert trace.metadata["degenerate"] is False

    def test_average_is_feasible(self):
        """Test that the averaged output stays in the ball."""
        ball = L2Ball(2, 1.0)
        x_bar, _ = boundary_fw(make_l1_distance([2.0, 0.3]), ball, 100)
        assert ball.contains(x_bar)

    def test_needs_strongly_convex_set(self):
        """Sets without curvature should fail."""
        with pytest.raises(ValueError, match="strongly convex set"):
            boundary_fw(make_l1_distance([0.2, 0.3]), Simplex(2), 10)


class TestGaugeFW:
    """Test Gauge Frank-Wolfe."""

    def test_ftrl_plus_solve_interior(self):
        """Test the radial solution of min eta <L, x> + gauge(x)^2."""
        ball = L2Ball(2, 1.0)
        np.testing.assert_allclose(gauge_ftrl_plus_solve([-1.0, 0.0], 1.0, ball), [0.5, 0.0])

    def test_ftrl_plus_solve_clipped(self):
        """Test that the radius is clipped at the boundary."""
        ball = L2Ball(2, 1.0)
        np.testing.assert_allclose(gauge_ftrl_plus_solve([-4.0, 0.0], 1.0, ball), [1.0, 0.0])

    def test_accelerated_rate_on_ball(self):
        """Test T^2 (f(x_bar_T) - f*) <= 8 L gauge(x*)^2 / lambda."""
        c = np.array([2.0, 1.0])
        ball = L2Ball(2, 1.0)
        f_star = 0.5 * (np.linalg.norm(c) - 1.0) ** 2
        _, trace = gauge_fw(_distance_quadratic(c), ball, 200, f_star=f_star)
        bound = 8.0 * 1.0 * 1.0 / ball.gauge_sq_strong_convexity
        for row in trace.rows:
            assert row["t"] ** 2 * row["error"] <= bound * 1.05
        assert trace.metadata["eta"] == pytest.approx(ball.gauge_sq_strong_convexity / 4.0)

    def test_set_without_gauge(self):
        """The simplex exposes no gauge."""
        with pytest.raises(FenchelGameError, match="gauge data"):
            gauge_fw(_distance_quadratic([0.2, 0.3]), Simplex(2), 10)

    def test_nonsmooth_objective(self):
        """Gauge FW needs a smoothness constant."""
        with pytest.raises(ValueError, match="smooth objective"):
            gauge_fw(make_l1_distance([2.0, 0.3]), L2Ball(2), 10)

    def test_nonpositive_eta(self):
        """A zero step should fail."""
        with pytest.raises(ValueError, match="eta must be positive"):
            gauge_fw(_distance_quadratic([2.0, 1.0]), L2Ball(2), 10, eta=0.0)


class TestSpectrahedron:
    """Test the spectrahedron oracle and its helpers."""

    def test_psi_oracle_zero_matrix(self):
        """Test that D = 0 gives u u'."""
        u = np.array([0.6, 0.8])
        X = psi_oracle(np.zeros((2, 2)), u)
        np.testing.assert_allclose(X.matrix, np.outer(u, u), atol=1e-15)

    def test_psi_oracle_diagonal(self):
        """Test the weighting by exp(D/2)."""
        u = np.array([1.0, 1.0]) / math.sqrt(2.0)
        X = psi_oracle(np.diag([2.0, 0.0]), u)
        e2 = math.exp(2.0)
        assert X.matrix[0, 0] == pytest.approx(e2 / (e2 + 1.0))
        assert X.trace_error() <= 1e-12

    def test_psi_oracle_rejects_non_unit(self):
        """u must lie on the sphere."""
        with pytest.raises(ValueError, match="unit vector"):
            psi_oracle(np.zeros((2, 2)), [1.0, 1.0])

    def test_psi_oracle_rejects_nan(self):
        """Non-finite matrices should fail."""
        with pytest.raises(ValueError, match="non-finite"):
            psi_oracle(np.array([[np.nan, 0.0], [0.0, 0.0]]), [1.0, 0.0])

    def test_embed_gradient(self):
        """Test the symmetric block embedding."""
        g = np.array([[1.0, 2.0, 3.0]])
        E = embed_gradient(g)
        assert E.shape == (4, 4)
        np.testing.assert_array_equal(E, E.T)
        np.testing.assert_array_equal(E[:1, 1:], g)
        assert np.all(E[:1, :1] == 0.0)

    def test_embed_gradient_rejects_vectors(self):
        """Vectors are not matrices."""
        with pytest.raises(ValueError, match="must be a matrix"):
            embed_gradient([1.0, 2.0])

    def test_sample_is_density_matrix(self):
        """Test that the averaged draws are PSD with unit trace."""
        G = np.diag([1.0, -1.0, 0.5, 0.0])
        X = sample_spectrahedron(G, t=1, m=8, seed=3, d1=2)
        X.validate()
        assert X.block2.shape == (2, 2)

    def test_sample_independent_of_threads(self):
        """Test that the worker count does not change the draws."""
        G = np.diag([1.0, -1.0, 0.5, 0.0])
        a = sample_spectrahedron(G, 2, 9, 5, 2, parallelism_hint=1)
        b = sample_spectrahedron(G, 2, 9, 5, 2, parallelism_hint=3)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_validate_rejects_bad_trace(self):
        """Matrices off the spectrahedron should fail."""
        with pytest.raises(FenchelGameError, match="trace"):
            SpectrahedronPoint(np.eye(2), 1).validate()

    def test_draw_count(self):
        """Test m_t = max(ceil(log(4d/delta)), t)."""
        start = SpectrahedronPoint(np.eye(4) / 4.0, 2)
        state = NuclearRunState(start, start, start, np.zeros((4, 4)), eta=0.1, delta=0.1, radius=1.0)
        assert state.draws(3) == 6
        assert state.draws(10) == 10


class TestNuclearRun:
    """Test the nuclear-norm method."""

    def test_feasible_and_decreasing(self):
        """Test nuclear-norm feasibility, spectrahedron membership and progress."""
        objective, target = _completion_problem()
        radius = nuclear_norm(target)
        W, trace = nuclear_run(objective, radius, T=40, seed=1)
        assert nuclear_norm(W) <= radius + 1e-6
        assert max(trace.column("nuclear_norm")) <= radius + 1e-6
        assert min(trace.column("min_eigenvalue")) >= -1e-9
        assert max(trace.column("trace_error")) <= 1e-9
        assert trace.last("f_value") < objective.value(np.zeros((3, 3)))

    def test_reproducible(self):
        """Test that a fixed seed gives identical runs."""
        objective, _ = _completion_problem()
        a, _ = nuclear_run(objective, 1.0, T=5, seed=4)
        b, _ = nuclear_run(objective, 1.0, T=5, seed=4, parallelism_hint=2)
        np.testing.assert_array_equal(a, b)

    def test_fixed_draws(self):
        """Test that draws overrides m_t."""
        objective, _ = _completion_problem()
        _, trace = nuclear_run(objective, 1.0, T=3, draws=2)
        assert trace.column("draws") == [2, 2, 2]

    def test_step_too_large(self):
        """Steps above 1/(36 L_hat) should fail."""
        objective, _ = _completion_problem()
        with pytest.raises(ValueError, match="violates"):
            nuclear_run(objective, 1.0, eta=1.0, T=3)

    def test_needs_matrix_objective(self):
        """Vector objectives should fail."""
        with pytest.raises(ValueError, match="over matrices"):
            nuclear_run(_distance_quadratic([1.0, 0.0]), 1.0, T=3)

    def test_invalid_delta(self):
        """delta must lie in (0, 1)."""
        objective, _ = _completion_problem()
        with pytest.raises(ValueError, match="delta"):
            nuclear_run(objective, 1.0, delta=1.5, T=3)

    def test_preset_returns_config(self):
        """Test the nuclear_norm preset."""
        config = preset("nuclear_norm", {"radius": 2.0, "T": 7})
        assert isinstance(config, NuclearConfig)
        assert config.radius == 2.0
        assert config.T == 7

    def test_preset_needs_radius(self):
        """The preset needs a radius."""
        with pytest.raises(ValueError, match="radius"):
            preset("nuclear_norm", {})
