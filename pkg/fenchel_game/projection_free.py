"""
Projection-free methods built on the Fenchel game.

Boundary Frank-Wolfe (non-smooth objectives over strongly convex sets),
Gauge Frank-Wolfe (accelerated rates with only an LMO) and the
spectrahedron method for nuclear-norm constrained problems, whose
randomized matrix-exponential oracle calls run in parallel.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Optional, Tuple

import numpy as np
import scipy.linalg

from .dynamics import GameConfig, preset, register_preset, run_dynamics
from .learners import LearnerSpec
from .oracles import (
    BregmanGeometry,
    DivergenceError,
    FeasibleSet,
    FenchelGameError,
    Objective,
    Trace,
    Vector,
    WeightSchedule,
    nuclear_norm,
)

logger = logging.getLogger(__name__)

DEGENERATE_GRADIENT_TOL = 1e-12
SPECTRAHEDRON_TOL = 1e-9
UNIT_NORM_TOL = 1e-12


# ---------------------------------------------------------------------------
# Boundary Frank-Wolfe
# ---------------------------------------------------------------------------


@register_preset("boundary_fw")
def _boundary_fw(params: Dict[str, Any]) -> GameConfig:
    x1 = params.get("x1")
    return GameConfig(
        name="boundary_fw",
        x_strategy=LearnerSpec("ftl"),
        y_strategy=LearnerSpec("best_response"),
        weights=WeightSchedule("uniform"),
        ordering="x_first",
        T=int(params.get("T", 100)),
        x0=None if x1 is None else np.asarray(x1, dtype=np.float64),
        start="lmo_of_gradient",
        f_star=params.get("f_star"),
    )


def boundary_fw(
    objective: Objective,
    decision_set: FeasibleSet,
    T: int,
    x1: Optional[Vector] = None,
    f_star: Optional[float] = None,
) -> Tuple[Vector, Trace]:
    """
    Boundary Frank-Wolfe: x_t = lmo of the average subgradient of rounds 1..t-1.

    Args:
        objective: Function with a (sub)gradient oracle
        decision_set: A strongly convex set (set_strong_convexity_lambda > 0)
        T: Number of rounds
        x1: Initial point (default: lmo of the subgradient at the canonical point)
        f_star: Optimal value, adds an ``error`` column when given

    Returns:
        Tuple of (uniform average x_bar_T, trace). The trace adds ``L_T``
        (running minimum of the averaged subgradient norm), ``degenerate`` and,
        when the objective declares ``lipschitz_M``, the regret ``bound`` and
        the rate ``envelope`` M log(t) / (lambda L_t t).

    Raises:
        ValueError: If the set is not strongly convex
    """
    lam = decision_set.set_strong_convexity_lambda
    if not lam > 0:
        raise ValueError(f"boundary_fw needs a strongly convex set, {decision_set.name} has lambda={lam}")
    config = preset("boundary_fw", {"T": T, "x1": x1, "f_star": f_star})
    x_bar, _, trace = run_dynamics(config, objective, decision_set)

    running_min = math.inf
    degenerate = False
    M = objective.lipschitz_M
    for row in trace.rows:
        t = row["t"]
        # uniform weights: y_bar_t is the averaged subgradient
        theta_norm = row["y_bar_norm"]
        running_min = min(running_min, theta_norm)
        flagged = t * theta_norm < DEGENERATE_GRADIENT_TOL
        if flagged and not degenerate:
            logger.warning("cumulative subgradient vanished at round %d; the rate certificate does not apply", t)
        degenerate = degenerate or flagged
        row["L_T"] = running_min
        row["degenerate"] = flagged
        if M is not None and running_min > 0:
            row["bound"] = 2.0 * M**2 * (1.0 + math.log(t)) / (lam * running_min * t)
            row["envelope"] = M * math.log(t) / (lam * running_min * t)
        else:
            row["bound"] = None
            row["envelope"] = None
    trace.columns.extend(["L_T", "degenerate", "bound", "envelope"])
    trace.metadata["degenerate"] = degenerate
    return x_bar, trace


# ---------------------------------------------------------------------------
# Gauge Frank-Wolfe
# ---------------------------------------------------------------------------


def gauge_ftrl_plus_solve(L: Any, eta: float, decision_set: FeasibleSet) -> Vector:
    """
    Solve min_x eta <L, x> + gauge(x)^2 over the set.

    Writing x = rho z with z on the boundary gives z = lmo(L) and
    rho = max(0, min(1, -(eta/2) <L, z>)).
    """
    L = np.asarray(L, dtype=np.float64)
    if not np.any(L):
        return np.zeros(decision_set.point_shape)
    z = decision_set.lmo(L)
    rho = float(np.clip(-0.5 * eta * float(np.vdot(L, z)), 0.0, 1.0))
    return rho * z


class GaugeRegularizer(BregmanGeometry):
    """R(x) = gauge(x)^2; strongly convex on sets with gauge data, not differentiable at 0."""

    differentiable = False

    def __init__(self, decision_set: FeasibleSet):
        if not decision_set.has_gauge:
            raise FenchelGameError(f"{decision_set.name} does not expose gauge data")
        self.decision_set = decision_set
        self.strong_convexity_beta = decision_set.gauge_sq_strong_convexity
        self.center = None

    def phi(self, x: Vector) -> float:
        return self.decision_set.gauge(np.asarray(x, dtype=np.float64)) ** 2

    def mirror(self, theta: Vector, decision_set: Optional[FeasibleSet] = None) -> Vector:
        target = self.decision_set if decision_set is None else decision_set
        return gauge_ftrl_plus_solve(-np.asarray(theta, dtype=np.float64), 1.0, target)


@register_preset("gauge_fw")
def _gauge_fw(params: Dict[str, Any]) -> GameConfig:
    regularizer = params.get("regularizer")
    if regularizer is None:
        raise ValueError("preset 'gauge_fw' needs parameter 'regularizer' (a GaugeRegularizer)")
    eta = params.get("eta")
    if eta is None:
        L = params.get("L")
        if L is None:
            raise ValueError("preset 'gauge_fw' needs parameter 'eta' or 'L'")
        eta = regularizer.strong_convexity_beta / (4.0 * float(L))
    x0 = params.get("x0")
    config = GameConfig(
        name="gauge_fw",
        x_strategy=LearnerSpec("ftrl_plus", {"regularizer": regularizer, "eta": float(eta)}),
        y_strategy=LearnerSpec("optimistic_ftl"),
        weights=WeightSchedule("linear"),
        T=int(params.get("T", 100)),
        x0=None if x0 is None else np.asarray(x0, dtype=np.float64),
        f_star=params.get("f_star"),
        comparator=params.get("comparator"),
    )
    config.extras["eta"] = float(eta)
    return config


def gauge_fw(
    objective: Objective,
    decision_set: FeasibleSet,
    T: int,
    eta: Optional[float] = None,
    x0: Optional[Vector] = None,
    f_star: Optional[float] = None,
) -> Tuple[Vector, Trace]:
    """
    Gauge Frank-Wolfe: linear weights, optimistic FTL y-player and an FTRL+
    x-player regularized by the squared gauge.

    The default step is eta = lambda / (4L) with lambda the strong convexity
    of the squared gauge. Each x step costs one LMO call.

    Raises:
        FenchelGameError: If the set has no gauge data
        ValueError: If the objective is not smooth or eta is not positive
    """
    if not decision_set.has_gauge or not decision_set.gauge_sq_strong_convexity > 0:
        raise FenchelGameError(f"gauge_fw needs a set with gauge data, got {decision_set.name}")
    if objective.smoothness_L is None:
        raise ValueError("gauge_fw needs a smooth objective")
    regularizer = GaugeRegularizer(decision_set)
    params: Dict[str, Any] = {"regularizer": regularizer, "T": T, "x0": x0, "f_star": f_star}
    if eta is None:
        params["L"] = objective.smoothness_L
    elif not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")
    else:
        params["eta"] = eta
    config = preset("gauge_fw", params)
    x_bar, _, trace = run_dynamics(config, objective, decision_set)
    trace.metadata["eta"] = config.extras["eta"]
    return x_bar, trace


# ---------------------------------------------------------------------------
# Spectrahedron method for nuclear-norm balls
# ---------------------------------------------------------------------------


@dataclass
class SpectrahedronPoint:
    """
    A density matrix X (PSD, unit trace) of size d = d1 + d2.

    The blocks X1 (d1 x d1), X2 (d1 x d2) and X3 (d2 x d2) are views into X.
    """

    matrix: Vector
    d1: int

    @property
    def d(self) -> int:
        return self.matrix.shape[0]

    @property
    def block1(self) -> Vector:
        return self.matrix[: self.d1, : self.d1]

    @property
    def block2(self) -> Vector:
        return self.matrix[: self.d1, self.d1:]

    @property
    def block3(self) -> Vector:
        return self.matrix[self.d1:, self.d1:]

    def min_eigenvalue(self) -> float:
        return float(scipy.linalg.eigvalsh(self.matrix)[0])

    def trace_error(self) -> float:
        return abs(float(np.trace(self.matrix)) - 1.0)

    def validate(self, tol: float = SPECTRAHEDRON_TOL) -> None:
        """Raise FenchelGameError unless X is symmetric PSD with unit trace."""
        if self.min_eigenvalue() < -tol:
            raise FenchelGameError(f"matrix is not PSD, min eigenvalue {self.min_eigenvalue():.3e}")
        if self.trace_error() > tol:
            raise FenchelGameError(f"trace differs from 1 by {self.trace_error():.3e}")


@dataclass
class NuclearRunState:
    """Iterates of the spectrahedron method and its accumulated dual matrix G."""

    W: SpectrahedronPoint
    X: SpectrahedronPoint
    Z: SpectrahedronPoint
    G: Vector
    eta: float
    delta: float
    radius: float

    def draws(self, t: int) -> int:
        """m_t = max(ceil(log(4d/delta)), t)."""
        return max(math.ceil(math.log(4.0 * self.W.d / self.delta)), t)


@dataclass(frozen=True)
class NuclearConfig:
    """Arguments of ``nuclear_run`` as produced by the ``nuclear_norm`` preset."""

    radius: float
    eta: Optional[float] = None
    delta: float = 0.1
    T: int = 100
    seed: int = 0
    parallelism_hint: int = 1
    draws: Optional[int] = None
    smoothness_L: Optional[float] = None

    def run(self, objective: Objective) -> Tuple[Vector, Trace]:
        return nuclear_run(
            objective,
            self.radius,
            eta=self.eta,
            delta=self.delta,
            T=self.T,
            seed=self.seed,
            parallelism_hint=self.parallelism_hint,
            draws=self.draws,
            smoothness_L=self.smoothness_L,
        )


@register_preset("nuclear_norm")
def _nuclear_norm(params: Dict[str, Any]) -> NuclearConfig:
    if params.get("radius") is None:
        raise ValueError("preset 'nuclear_norm' needs parameter 'radius'")
    return NuclearConfig(
        radius=float(params["radius"]),
        eta=params.get("eta"),
        delta=float(params.get("delta", 0.1)),
        T=int(params.get("T", 100)),
        seed=int(params.get("seed", 0)),
        parallelism_hint=int(params.get("parallelism_hint", 1)),
        draws=params.get("draws"),
        smoothness_L=params.get("L"),
    )


def psi_oracle(D: Any, u: Any, d1: int = 0) -> SpectrahedronPoint:
    """
    Rank-one density exp(D/2) u u' exp(D/2) / (u' exp(D) u).

    Computed through a dense eigendecomposition of D; eigenvalues are shifted
    by their maximum before exponentiating.

    Raises:
        ValueError: If D has non-finite entries or u is not a unit vector
    """
    D = np.asarray(D, dtype=np.float64)
    u = np.asarray(u, dtype=np.float64)
    if not np.all(np.isfinite(D)):
        raise ValueError("D has non-finite entries")
    if abs(float(np.linalg.norm(u)) - 1.0) > UNIT_NORM_TOL:
        raise ValueError(f"u must be a unit vector, got norm {np.linalg.norm(u):.15f}")
    evals, Q = scipy.linalg.eigh(D)
    v = Q @ (np.exp(0.5 * (evals - evals[-1])) * (Q.T @ u))
    X = np.outer(v, v) / float(v @ v)
    return SpectrahedronPoint(0.5 * (X + X.T), d1)


def embed_gradient(grad: Any) -> Vector:
    """Symmetric embedding [[0, g], [g', 0]] of a d1 x d2 gradient."""
    g = np.asarray(grad, dtype=np.float64)
    if g.ndim != 2:
        raise ValueError(f"gradient must be a matrix, got shape {g.shape}")
    d1, d2 = g.shape
    E = np.zeros((d1 + d2, d1 + d2))
    E[:d1, d1:] = g
    E[d1:, :d1] = g.T
    return E


def sphere_draw(seed: int, t: int, j: int, d: int) -> Vector:
    """Uniform draw on the unit sphere of R^d for round t, draw j."""
    u = np.random.default_rng([seed, t, j]).standard_normal(d)
    return u / np.linalg.norm(u)


def sample_spectrahedron(
    G: Vector,
    t: int,
    m: int,
    seed: int,
    d1: int = 0,
    parallelism_hint: int = 1,
) -> SpectrahedronPoint:
    """
    Average of m oracle answers Psi_{u_j}(G), j = 1..m.

    G is diagonalized once; each draw j uses the seed (seed, t, j). Draws
    may run on ``parallelism_hint`` threads and are summed in index order.
    """
    d = G.shape[0]
    evals, Q = scipy.linalg.eigh(G)
    scale = np.exp(0.5 * (evals - evals[-1]))

    def draw(j: int) -> Vector:
        v = Q @ (scale * (Q.T @ sphere_draw(seed, t, j, d)))
        return np.outer(v, v) / float(v @ v)

    if parallelism_hint > 1:
        with ThreadPoolExecutor(max_workers=parallelism_hint) as executor:
            parts = list(executor.map(draw, range(1, m + 1)))
    else:
        parts = [draw(j) for j in range(1, m + 1)]

    total = np.zeros((d, d))
    for part in parts:
        total += part
    X = total / m
    return SpectrahedronPoint(0.5 * (X + X.T), d1)


def _mix(beta: float, A: SpectrahedronPoint, B: SpectrahedronPoint) -> SpectrahedronPoint:
    return SpectrahedronPoint((1.0 - beta) * A.matrix + beta * B.matrix, A.d1)


def nuclear_run(
    objective: Objective,
    radius: float,
    eta: Optional[float] = None,
    delta: float = 0.1,
    T: int = 100,
    seed: int = 0,
    parallelism_hint: int = 1,
    draws: Optional[int] = None,
    smoothness_L: Optional[float] = None,
) -> Tuple[Vector, Trace]:
    """
    Minimize f over the nuclear-norm ball of radius r through the spectrahedron.

    A d1 x d2 matrix is represented as 2r X2 for a density matrix X of size
    d1 + d2. Each round mixes Z_t = (1 - beta_t) W_{t-1} + beta_t X_{t-1},
    accumulates G_t = G_{t-1} - eta t grad F_r(Z_t), draws X_t from m_t
    oracle calls at G_t and mixes W_t = (1 - beta_t) W_{t-1} + beta_t X_t,
    with beta_t = 2/(t+1).

    Args:
        objective: Smooth objective over d1 x d2 matrices
        radius: Nuclear-norm radius r
        eta: Step size; defaults to the largest admissible 1/(36 L_hat)
        delta: Failure probability entering m_t
        T: Number of rounds
        seed: Seed of the sphere draws
        parallelism_hint: Worker threads for the oracle calls
        draws: Fixed number of draws per round instead of m_t
        smoothness_L: Overrides the objective's declared smoothness

    Returns:
        Tuple of (2r W_T2, trace)

    Raises:
        ValueError: If eta exceeds 1/(36 L_hat) with L_hat = 2rL, or inputs are invalid
        DivergenceError: If an iterate leaves the spectrahedron
    """
    if objective.shape is None:
        raise ValueError("nuclear_run needs an objective over matrices")
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if draws is not None and draws < 1:
        raise ValueError(f"draws must be at least 1, got {draws}")
    L = smoothness_L if smoothness_L is not None else objective.smoothness_L
    if L is None or not L > 0:
        raise ValueError("nuclear_run needs a positive smoothness constant")
    L_hat = 2.0 * radius * L
    limit = 1.0 / (36.0 * L_hat)
    if eta is None:
        eta = limit
    elif not 0 < eta <= limit * (1.0 + 1e-12):
        raise ValueError(f"eta={eta} violates eta <= 1/(36 L_hat) = {limit:.6e}")

    d1, d2 = objective.shape
    d = d1 + d2
    start = SpectrahedronPoint(np.eye(d) / d, d1)
    state = NuclearRunState(W=start, X=start, Z=start, G=np.zeros((d, d)), eta=eta, delta=delta, radius=radius)
    trace = Trace(
        columns=["f_value", "nuclear_norm", "draws", "min_eigenvalue", "trace_error"],
        metadata={"radius": radius, "eta": eta, "delta": delta, "L_hat": L_hat, "seed": seed},
    )
    logger.info("nuclear_run d=%d r=%g eta=%.3e T=%d", d, radius, eta, T)

    for t in range(1, T + 1):
        beta = 2.0 / (t + 1)
        state.Z = _mix(beta, state.W, state.X)
        grad = objective.gradient(2.0 * radius * state.Z.block2)
        state.G = state.G - eta * t * embed_gradient(grad)
        m = draws if draws is not None else state.draws(t)
        try:
            state.X = sample_spectrahedron(state.G, t, m, seed, d1, parallelism_hint)
            state.W = _mix(beta, state.W, state.X)
            for point in (state.X, state.Z, state.W):
                point.validate()
        except (FenchelGameError, np.linalg.LinAlgError, ValueError) as e:
            raise DivergenceError(f"spectrahedron step failed: {e}", t) from e

        output = 2.0 * radius * state.W.block2
        trace.append(
            t,
            f_value=objective.value(output),
            nuclear_norm=nuclear_norm(output),
            draws=m,
            min_eigenvalue=state.W.min_eigenvalue(),
            trace_error=state.W.trace_error(),
        )

    trace.metadata["final_X"] = state.X.matrix.copy()
    return 2.0 * radius * state.W.block2, trace
