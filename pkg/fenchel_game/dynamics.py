"""
Fenchel game no-regret dynamics.

Two online learners play g(x, y) = <x, y> - f*(y) (+ psi(x)); the weighted
averages of their points form an approximate equilibrium whose error is the
sum of the players' average regrets. ``preset`` assembles the learner
pairings that reproduce classical first-order methods and
``reference_iterative`` runs the same methods in their textbook form.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .learners import (
    LearnerSpec,
    LossDescriptor,
    OnlineLearner,
    build_learner,
    composite_loss,
    fenchel_loss,
)
from .oracles import (
    CompositeTerm,
    DivergenceError,
    FeasibleSet,
    FenchelGameError,
    L1Penalty,
    L2Ball,
    Objective,
    QuadraticTerm,
    Trace,
    Unconstrained,
    Vector,
    WeightSchedule,
    prox_l1,
)

logger = logging.getLogger(__name__)

PAYOFF_KINDS = ("fenchel", "composite", "strongly_convex_split")
ORDERINGS = ("y_first", "x_first")
STARTS = ("canonical", "lmo_of_gradient")


@dataclass(frozen=True)
class Payoff:
    """
    Game payoff.

    ``fenchel``: <x,y> - f*(y). ``composite``: adds psi(x).
    ``strongly_convex_split``: <x,y> - f~*(y) + mu phi(x) with
    f~ = f - mu phi and phi = 1/2 ||x - phi_center||^2.
    """

    kind: str = "fenchel"
    psi: Optional[CompositeTerm] = None
    mu: float = 0.0
    phi_center: Optional[Vector] = None
    phi_smoothness: float = 1.0

    def __post_init__(self) -> None:
        if self.kind not in PAYOFF_KINDS:
            raise ValueError(f"Unknown payoff '{self.kind}'. Valid payoffs: {', '.join(PAYOFF_KINDS)}")
        if self.kind == "composite" and self.psi is None:
            raise ValueError("composite payoff needs psi")
        if self.kind == "strongly_convex_split" and not self.mu > 0:
            raise ValueError(f"strongly_convex_split needs mu > 0, got {self.mu}")

    def resolve(self, objective: Objective) -> Tuple[Objective, Optional[CompositeTerm]]:
        """Return the y-player's objective and the x-player's composite term."""
        if self.kind == "fenchel":
            return objective, None
        if self.kind == "composite":
            return objective, self.psi
        if objective.smoothness_L is None:
            raise ValueError("strongly_convex_split needs a smooth objective")
        if self.mu > objective.smoothness_L:
            raise ValueError(f"strongly_convex_split needs mu <= L, got mu={self.mu}, L={objective.smoothness_L}")
        center = np.zeros(objective.point_shape) if self.phi_center is None else np.asarray(self.phi_center, float)
        return objective.shifted(self.mu, center), QuadraticTerm(self.mu, center)


@dataclass
class GameConfig:
    """A learner pairing with its weights, payoff, ordering and budget."""

    name: str
    x_strategy: LearnerSpec
    y_strategy: LearnerSpec
    weights: WeightSchedule
    payoff: Payoff = field(default_factory=Payoff)
    ordering: str = "y_first"
    T: int = 100
    x0: Optional[Vector] = None
    start: str = "canonical"
    comparator: Optional[Vector] = None
    f_star: Optional[float] = None
    extras: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.ordering not in ORDERINGS:
            raise ValueError(f"Unknown ordering '{self.ordering}'. Valid orderings: {', '.join(ORDERINGS)}")
        if self.start not in STARTS:
            raise ValueError(f"Unknown start '{self.start}'. Valid starts: {', '.join(STARTS)}")
        if self.T < 1:
            raise ValueError(f"T must be at least 1, got {self.T}")
        if self.weights.adaptive and (
            self.ordering != "y_first"
            or self.y_strategy.strategy != "ftl"
            or self.x_strategy.strategy != "best_response"
        ):
            raise ValueError("adaptive weights need a y-first FTL y-player and a best-response x-player")


@dataclass
class GameState:
    """Running averages and the sums behind the regret and gap estimates."""

    x_bar: Vector
    x_prev: Vector
    y_bar: Optional[Vector] = None
    total_weight: float = 0.0
    sum_conj: float = 0.0
    sum_inner: float = 0.0
    sum_psi: float = 0.0
    nu: float = math.inf

    def x_tilde(self, alpha: float) -> Vector:
        """(alpha x_{t-1} + A_{t-1} x_bar_{t-1}) / A_t, the point optimistic y-players answer at."""
        return (alpha * self.x_prev + self.total_weight * self.x_bar) / (self.total_weight + alpha)

    def update(self, alpha: float, x: Vector, y: Vector, conj: float, psi_value: float) -> None:
        self.total_weight += alpha
        ratio = alpha / self.total_weight
        self.x_bar = self.x_bar + ratio * (x - self.x_bar)
        self.y_bar = np.array(y, dtype=np.float64) if self.y_bar is None else self.y_bar + ratio * (y - self.y_bar)
        self.sum_conj += alpha * conj
        self.sum_inner += alpha * float(np.vdot(x, y))
        self.sum_psi += alpha * psi_value
        self.nu = min(self.nu, float(np.linalg.norm(y)))
        self.x_prev = x


def _ball_radius(decision_set: FeasibleSet) -> Optional[float]:
    if isinstance(decision_set, L2Ball):
        return decision_set.radius
    if isinstance(decision_set, Unconstrained):
        return decision_set.comparator_radius
    return None


def linear_psi_min(y: Vector, psi: Optional[CompositeTerm], decision_set: FeasibleSet) -> float:
    """
    Evaluate min over the set of <x, y> + psi(x).

    Unconstrained sets answer over their comparator ball when psi is absent
    or an l1 penalty.
    """
    if psi is None:
        x = decision_set.lmo(y)
        return float(np.vdot(x, y))
    if isinstance(psi, QuadraticTerm):
        center = psi.center if psi.center is not None else np.zeros_like(y)
        x = decision_set.project(center - y / psi.mu) if psi.mu > 0 else decision_set.lmo(y)
        return float(np.vdot(x, y)) + psi.value(x)
    radius = _ball_radius(decision_set)
    if isinstance(psi, L1Penalty) and radius is not None:
        return -radius * float(np.linalg.norm(prox_l1(y, psi.lam)))
    raise FenchelGameError(f"no closed form for min <x,y> + {type(psi).__name__} over {decision_set.name}")


def equilibrium_gap(
    x_bar: Vector,
    y_bar: Vector,
    objective: Objective,
    decision_set: FeasibleSet,
    psi: Optional[CompositeTerm] = None,
) -> float:
    """
    Duality gap sup_y g(x_bar, y) - inf_x g(x, y_bar), clamped at zero.

    sup_y g(x_bar, y) = f(x_bar) + psi(x_bar) by conjugacy; the infimum uses
    f*(y_bar) (closed form or numeric) and the closed-form linear minimization.
    """
    upper = objective.value(x_bar) + (psi.value(x_bar) if psi is not None else 0.0)
    conj = objective.conjugate(y_bar)
    if not math.isfinite(conj):
        return math.inf
    lower = linear_psi_min(y_bar, psi, decision_set) - conj
    return max(upper - lower, 0.0)


def _resolve_start(
    start: str, x0: Optional[Vector], objective: Objective, decision_set: FeasibleSet
) -> Vector:
    if x0 is not None:
        return np.array(x0, dtype=np.float64)
    point = decision_set.canonical_point()
    if start == "lmo_of_gradient":
        return decision_set.lmo(objective.gradient(point))
    return point


def _play_y_first(
    t: int,
    config: GameConfig,
    x_player: OnlineLearner,
    y_player: OnlineLearner,
    state: GameState,
    payoff_objective: Objective,
    psi: Optional[CompositeTerm],
) -> Tuple[Vector, Vector, float]:
    if y_player.prescient:
        raise FenchelGameError(f"y-player '{y_player.strategy}' cannot see x_t when it moves first")
    adaptive = config.weights.adaptive
    alpha = 1.0 if adaptive else config.weights.alpha(t)
    hint = fenchel_loss(state.x_prev, alpha, payoff_objective) if y_player.optimistic else None
    y_t = y_player.act(hint=hint)
    x_loss = composite_loss(y_t, alpha, psi)
    x_t = x_player.act(current=x_loss)
    if adaptive:
        alpha = config.weights.adaptive_weight(float(np.linalg.norm(x_t - state.x_bar)))
        x_loss = composite_loss(y_t, alpha, psi)
    y_player.observe(fenchel_loss(x_t, alpha, payoff_objective))
    x_player.observe(x_loss)
    return x_t, y_t, alpha


def _play_x_first(
    t: int,
    config: GameConfig,
    x_player: OnlineLearner,
    y_player: OnlineLearner,
    payoff_objective: Objective,
    psi: Optional[CompositeTerm],
) -> Tuple[Vector, Vector, float]:
    if x_player.prescient:
        raise FenchelGameError(f"x-player '{x_player.strategy}' cannot see y_t when it moves first")
    alpha = config.weights.alpha(t)
    x_t = x_player.act()
    y_loss = fenchel_loss(x_t, alpha, payoff_objective)
    y_t = y_player.act(current=y_loss, hint=y_loss if y_player.optimistic else None)
    y_player.observe(y_loss)
    x_player.observe(composite_loss(y_t, alpha, psi))
    return x_t, y_t, alpha


def _record_row(
    trace: Trace,
    t: int,
    config: GameConfig,
    state: GameState,
    objective: Objective,
    payoff_objective: Objective,
    psi: Optional[CompositeTerm],
    decision_set: FeasibleSet,
    x_t: Vector,
) -> None:
    A = state.total_weight
    x_bar, y_bar = state.x_bar, state.y_bar
    f_value = objective.value(x_bar)
    if config.payoff.kind == "composite":
        f_value += psi.value(x_bar)
    m = linear_psi_min(y_bar, psi, decision_set)
    if config.comparator is not None:
        x_star = np.asarray(config.comparator, dtype=np.float64)
        comp = float(np.vdot(x_star, y_bar)) + (psi.value(x_star) if psi is not None else 0.0)
    else:
        comp = m
    row: Dict[str, Any] = {
        "f_value": f_value,
        "grad_norm": float(np.linalg.norm(objective.gradient(x_bar))),
        "gap_estimate": payoff_objective.value(x_bar) + (state.sum_psi + state.sum_conj) / A - m,
        "x_regret": state.sum_inner + state.sum_psi - A * comp,
        "y_regret": state.sum_conj - state.sum_inner + A * payoff_objective.value(x_bar),
        "y_bar_norm": float(np.linalg.norm(y_bar)),
        "nu": state.nu,
    }
    if decision_set.has_gauge:
        row["x_gauge"] = decision_set.gauge(x_t)
    if config.f_star is not None:
        row["error"] = f_value - config.f_star
    if config.comparator is not None:
        row["dist"] = float(np.linalg.norm(x_bar - np.asarray(config.comparator, dtype=np.float64)))
    trace.append(t, **row)


def run_dynamics(
    config: GameConfig, objective: Objective, decision_set: FeasibleSet
) -> Tuple[Vector, Vector, Trace]:
    """
    Play the Fenchel game for ``config.T`` rounds.

    Args:
        config: Learner pairing, weights, payoff and ordering
        objective: The function to minimize
        decision_set: The x-player's feasible set

    Returns:
        Tuple of (x_bar, y_bar, trace); ``trace.iterates`` holds x_bar_t and
        ``trace.actions`` holds x_t for every round

    Raises:
        DivergenceError: If a round fails or produces a non-finite point
    """
    payoff_objective, psi = config.payoff.resolve(objective)
    x0 = _resolve_start(config.start, config.x0, objective, decision_set)
    x_player = build_learner(config.x_strategy, decision_set, x0, side="x")
    y_player = build_learner(config.y_strategy, None, x0, payoff_objective, side="y")
    logger.info("game %s: %s vs %s, T=%d", config.name, config.x_strategy.strategy, config.y_strategy.strategy, config.T)
    state = GameState(x_bar=x0.copy(), x_prev=x0.copy())
    trace = Trace(
        columns=["f_value", "grad_norm", "gap_estimate", "x_regret", "y_regret", "y_bar_norm", "nu"],
        metadata={"game": config.name, "T": config.T, "ordering": config.ordering},
    )

    for t in range(1, config.T + 1):
        try:
            if config.ordering == "y_first":
                x_t, y_t, alpha = _play_y_first(t, config, x_player, y_player, state, payoff_objective, psi)
            else:
                x_t, y_t, alpha = _play_x_first(t, config, x_player, y_player, payoff_objective, psi)
        except DivergenceError:
            raise
        except (FenchelGameError, ValueError, np.linalg.LinAlgError) as e:
            raise DivergenceError(f"round failed: {e}", t) from e
        if not (np.all(np.isfinite(x_t)) and np.all(np.isfinite(y_t))):
            raise DivergenceError("non-finite iterate", t)

        conj = y_player.conj_values[-1] if y_player.conj_values else payoff_objective.conjugate(y_t)
        psi_value = psi.value(x_t) if psi is not None else 0.0
        state.update(alpha, x_t, y_t, conj, psi_value)
        trace.iterates.append(state.x_bar.copy())
        trace.actions.append(np.array(x_t, copy=True))
        _record_row(trace, t, config, state, objective, payoff_objective, psi, decision_set, x_t)

    trace.metadata["final_regret_x"] = trace.last("x_regret")
    trace.metadata["final_regret_y"] = trace.last("y_regret")
    return state.x_bar, state.y_bar, trace


# ---------------------------------------------------------------------------
# Presets
# ---------------------------------------------------------------------------

PRESETS: Dict[str, Callable[[Dict[str, Any]], Any]] = {}


def register_preset(name: str) -> Callable[[Callable[[Dict[str, Any]], Any]], Callable[[Dict[str, Any]], Any]]:
    """Register a preset builder under ``name``."""

    def decorator(builder: Callable[[Dict[str, Any]], Any]) -> Callable[[Dict[str, Any]], Any]:
        PRESETS[name] = builder
        return builder

    return decorator


def preset(name: str, params: Optional[Dict[str, Any]] = None, **overrides: Any) -> Any:
    """
    Build the configuration of a named method.

    Args:
        name: Preset name (see ``PRESETS``)
        params: Constants the preset needs (L, mu, L_phi, lam, T, x0, ...)
        **overrides: Extra parameters merged over ``params``

    Returns:
        A GameConfig (or the preset's own configuration type)

    Raises:
        ValueError: If the name is unknown or a required constant is missing
    """
    if name not in PRESETS:
        raise ValueError(f"Unknown preset '{name}'. Valid presets: {', '.join(sorted(PRESETS))}")
    merged = dict(params or {})
    merged.update(overrides)
    return PRESETS[name](merged)


def _require(params: Dict[str, Any], key: str, name: str) -> float:
    if params.get(key) is None:
        raise ValueError(f"preset '{name}' needs parameter '{key}'")
    value = float(params[key])
    if not value > 0:
        raise ValueError(f"preset '{name}' needs {key} > 0, got {value}")
    return value


def _common(params: Dict[str, Any]) -> Dict[str, Any]:
    x0 = params.get("x0")
    return {
        "T": int(params.get("T", 100)),
        "x0": None if x0 is None else np.asarray(x0, dtype=np.float64),
        "comparator": params.get("comparator"),
        "f_star": params.get("f_star"),
    }


def _fw_config(name: str, params: Dict[str, Any], weights: WeightSchedule, y: LearnerSpec) -> GameConfig:
    return GameConfig(
        name=name,
        x_strategy=LearnerSpec("best_response"),
        y_strategy=y,
        weights=weights,
        start="lmo_of_gradient",
        **_common(params),
    )


@register_preset("frank_wolfe")
def _frank_wolfe(params: Dict[str, Any]) -> GameConfig:
    return _fw_config("frank_wolfe", params, WeightSchedule("linear"), LearnerSpec("ftl"))


@register_preset("fw_uniform")
def _fw_uniform(params: Dict[str, Any]) -> GameConfig:
    return _fw_config("fw_uniform", params, WeightSchedule("uniform"), LearnerSpec("ftl"))


@register_preset("fw_linear_rate")
def _fw_linear_rate(params: Dict[str, Any]) -> GameConfig:
    return _fw_config("fw_linear_rate", params, WeightSchedule("adaptive"), LearnerSpec("ftl"))


@register_preset("smoothed_fw")
def _smoothed_fw(params: Dict[str, Any]) -> GameConfig:
    y = LearnerSpec(
        "ftpl",
        {
            "noise_scale": float(params.get("noise_scale", 1.0)),
            "n_samples": int(params.get("n_samples", 64)),
            "seed": int(params.get("seed", 0)),
        },
    )
    return _fw_config("smoothed_fw", params, WeightSchedule("uniform"), y)


@register_preset("incremental_fw")
def _incremental_fw(params: Dict[str, Any]) -> GameConfig:
    return _fw_config("incremental_fw", params, WeightSchedule("uniform"), LearnerSpec("incremental"))


def _accelerated(name: str, params: Dict[str, Any], x: LearnerSpec, y: LearnerSpec, payoff: Payoff) -> GameConfig:
    return GameConfig(
        name=name,
        x_strategy=x,
        y_strategy=y,
        weights=WeightSchedule("linear"),
        payoff=payoff,
        **_common(params),
    )


@register_preset("nesterov_1mem")
def _nesterov_1mem(params: Dict[str, Any]) -> GameConfig:
    gamma = 1.0 / (4.0 * _require(params, "L", "nesterov_1mem"))
    x = LearnerSpec("omd_plus", {"geometry": "euclidean", "gamma": gamma})
    return _accelerated("nesterov_1mem", params, x, LearnerSpec("optimistic_ftl"), Payoff())


@register_preset("nesterov_infmem")
def _nesterov_infmem(params: Dict[str, Any]) -> GameConfig:
    eta = 1.0 / (4.0 * _require(params, "L", "nesterov_infmem"))
    x = LearnerSpec("ftrl_plus", {"regularizer": "euclidean", "eta": eta, "center_at_start": True})
    return _accelerated("nesterov_infmem", params, x, LearnerSpec("optimistic_ftl"), Payoff())


@register_preset("nesterov_first")
def _nesterov_first(params: Dict[str, Any]) -> GameConfig:
    gamma = 1.0 / (4.0 * _require(params, "L", "nesterov_first"))
    x = LearnerSpec("omd_plus", {"geometry": "euclidean", "gamma": gamma})
    return _accelerated("nesterov_first", params, x, LearnerSpec("optimistic_ftl"), Payoff())


@register_preset("heavy_ball")
def _heavy_ball(params: Dict[str, Any]) -> GameConfig:
    gamma = 1.0 / (4.0 * _require(params, "L", "heavy_ball"))
    x = LearnerSpec("omd_plus", {"geometry": "euclidean", "gamma": gamma})
    return _accelerated("heavy_ball", params, x, LearnerSpec("ftl"), Payoff())


@register_preset("accel_prox")
def _accel_prox(params: Dict[str, Any]) -> GameConfig:
    gamma = 1.0 / (4.0 * _require(params, "L", "accel_prox"))
    lam = float(params.get("lam", 0.1))
    x = LearnerSpec("omd_plus", {"geometry": "euclidean", "gamma": gamma})
    payoff = Payoff("composite", psi=L1Penalty(lam))
    return _accelerated("accel_prox", params, x, LearnerSpec("optimistic_ftl"), payoff)


def accel_linear_theta(mu: float, L: float, L_phi: float = 1.0) -> float:
    """theta = 1/2 sqrt(mu / (L (1 + L_phi)))."""
    return 0.5 * math.sqrt(mu / (L * (1.0 + L_phi)))


@register_preset("accel_linear")
def _accel_linear(params: Dict[str, Any]) -> GameConfig:
    mu = _require(params, "mu", "accel_linear")
    L = _require(params, "L", "accel_linear")
    L_phi = float(params.get("L_phi", 1.0))
    if mu > L:
        raise ValueError(f"accel_linear needs mu <= L, got mu={mu}, L={L}")
    theta = accel_linear_theta(mu, L, L_phi)
    common = _common(params)
    center = common["x0"]
    weights = WeightSchedule("exponential", theta=theta, first=mu / (2.0 * L * (1.0 + L_phi)))
    # R = phi centered at x0 with eta = 1/mu
    x = LearnerSpec("ftrl_plus", {"regularizer": "euclidean", "eta": 1.0 / mu, "center_at_start": True})
    payoff = Payoff("strongly_convex_split", mu=mu, phi_center=center, phi_smoothness=L_phi)
    config = GameConfig(
        name="accel_linear",
        x_strategy=x,
        y_strategy=LearnerSpec("optimistic_ftl"),
        weights=weights,
        payoff=payoff,
        **common,
    )
    config.extras["theta"] = theta
    return config


def accel_linear_certificate(config: GameConfig, x_star: Vector, x0: Vector) -> float:
    """
    Constant C of the bound error(T) <= C (1 - theta)^T.

    Anchored at T = 1: C (1 - theta) = (mu/2) ||x* - x0||^2 / A_1.
    """
    theta = config.extras["theta"]
    mu = config.payoff.mu
    diff = np.asarray(x_star, dtype=np.float64) - np.asarray(x0, dtype=np.float64)
    return 0.5 * mu * float(diff @ diff) / (config.weights.cum_A(1) * (1.0 - theta))


# ---------------------------------------------------------------------------
# Iterative references
# ---------------------------------------------------------------------------

REFERENCE_METHODS = ("frank_wolfe", "nesterov_1mem", "nesterov_infmem", "nesterov_first", "heavy_ball", "accel_prox")


def _reference_frank_wolfe(objective, decision_set, w0, T, params):
    w = w0.copy()
    for t in range(1, T + 1):
        v = decision_set.lmo(objective.gradient(w))
        step = 2.0 / (t + 1)
        w = (1.0 - step) * w + step * v
        yield w


def _reference_nesterov_1mem(objective, decision_set, w0, T, params):
    L = _require(params, "L", "nesterov_1mem")
    w, v = w0.copy(), w0.copy()
    for t in range(1, T + 1):
        beta = 2.0 / (t + 1)
        z = (1.0 - beta) * w + beta * v
        v = decision_set.project(v - (t / (4.0 * L)) * objective.gradient(z))
        w = (1.0 - beta) * w + beta * v
        yield w


def _reference_nesterov_infmem(objective, decision_set, w0, T, params):
    L = _require(params, "L", "nesterov_infmem")
    w, v = w0.copy(), w0.copy()
    grad_sum = np.zeros_like(w0)
    for t in range(1, T + 1):
        beta = 2.0 / (t + 1)
        z = (1.0 - beta) * w + beta * v
        grad_sum = grad_sum + (t / (4.0 * L)) * objective.gradient(z)
        v = decision_set.project(w0 - grad_sum)
        w = (1.0 - beta) * w + beta * v
        yield w


def _reference_nesterov_first(objective, decision_set, w0, T, params):
    L = _require(params, "L", "nesterov_first")
    w_prev, z = w0.copy(), w0.copy()
    for t in range(1, T + 1):
        w = z - (t / (2.0 * (t + 1) * L)) * objective.gradient(z)
        z = w + ((t - 1.0) / (t + 2.0)) * (w - w_prev)
        w_prev = w
        yield w


def _reference_heavy_ball(objective, decision_set, w0, T, params):
    L = _require(params, "L", "heavy_ball")
    w, w_prev = w0.copy(), w0.copy()
    for t in range(1, T + 1):
        step = t / (2.0 * (t + 1) * L)
        w_next = w - step * objective.gradient(w) + ((t - 2.0) / (t + 1.0)) * (w - w_prev)
        w_prev, w = w, w_next
        yield w


def _reference_accel_prox(objective, decision_set, w0, T, params):
    gamma = 1.0 / (4.0 * _require(params, "L", "accel_prox"))
    psi = L1Penalty(float(params.get("lam", 0.1)))
    w, v = w0.copy(), w0.copy()
    for t in range(1, T + 1):
        beta = 2.0 / (t + 1)
        z = (1.0 - beta) * w + beta * v
        v = decision_set.prox(v - t * gamma * objective.gradient(z), t * gamma, psi)
        w = (1.0 - beta) * w + beta * v
        yield w


_REFERENCES = {
    "frank_wolfe": _reference_frank_wolfe,
    "nesterov_1mem": _reference_nesterov_1mem,
    "nesterov_infmem": _reference_nesterov_infmem,
    "nesterov_first": _reference_nesterov_first,
    "heavy_ball": _reference_heavy_ball,
    "accel_prox": _reference_accel_prox,
}


def reference_iterative(
    name: str,
    params: Optional[Dict[str, Any]],
    objective: Objective,
    decision_set: FeasibleSet,
    T: int,
) -> Trace:
    """
    Run a method in its classical iterative form.

    Starts from ``params['x0']`` when given, otherwise from the same point the
    matching preset would use. ``trace.iterates`` holds w_1..w_T.

    Raises:
        ValueError: If the method has no iterative reference
    """
    if name not in _REFERENCES:
        raise ValueError(f"No iterative reference for '{name}'. Valid names: {', '.join(REFERENCE_METHODS)}")
    params = dict(params or {})
    start = "lmo_of_gradient" if name == "frank_wolfe" else "canonical"
    x0 = params.get("x0")
    w0 = _resolve_start(start, None if x0 is None else np.asarray(x0, dtype=np.float64), objective, decision_set)
    psi = L1Penalty(float(params.get("lam", 0.1))) if name == "accel_prox" else None

    trace = Trace(columns=["f_value", "grad_norm"], metadata={"reference": name, "T": T})
    for t, w in enumerate(_REFERENCES[name](objective, decision_set, w0, T, params), start=1):
        if not np.all(np.isfinite(w)):
            raise DivergenceError("non-finite iterate", t)
        value = objective.value(w) + (psi.value(w) if psi is not None else 0.0)
        trace.append(t, f_value=value, grad_norm=float(np.linalg.norm(objective.gradient(w))))
        trace.iterates.append(np.array(w, copy=True))
    return trace


def online_to_batch(learner: OnlineLearner, sample_losses: Sequence[LossDescriptor], T: int) -> Vector:
    """
    Online-to-batch conversion: feed T sample losses and average the iterates.

    Losses are consumed cyclically; prescient learners see each loss before acting.
    """
    if T < 1:
        raise ValueError(f"T must be at least 1, got {T}")
    if not sample_losses:
        raise ValueError("sample_losses is empty")
    points: List[Vector] = []
    for t in range(T):
        loss = sample_losses[t % len(sample_losses)]
        points.append(learner.act(current=loss if learner.prescient else None))
        learner.observe(loss)
    return np.mean(points, axis=0)
