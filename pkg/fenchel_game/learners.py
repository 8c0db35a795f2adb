"""
Weighted online learners with regret accounting.

Each strategy comes in two forms: a pure step function computing the next
action from a ``LossAggregate`` (running weighted sums of the losses seen so
far), and a stateful ``OnlineLearner`` that owns the history, records its
actions and reports weighted regret against a caller-supplied comparator.

Losses on the x side are linear or composite, <x, y_t> + psi(x), and are
minimized in closed form. Losses on the y side are Fenchel losses
f*(y) - <x_t, y>; their minimizers are gradients of f at averaged points, so
the conjugate is only evaluated for bookkeeping.
"""

import copy
import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Dict, List, Optional, Sequence

import numpy as np

from .oracles import (
    BregmanGeometry,
    CompositeTerm,
    FeasibleSet,
    FenchelGameError,
    L1Penalty,
    NegativeEntropy,
    Objective,
    QuadraticTerm,
    SeedLike,
    SquaredEuclidean,
    Vector,
)

logger = logging.getLogger(__name__)

LOSS_KINDS = ("linear", "fenchel_y", "composite_x")


@dataclass(frozen=True)
class LossDescriptor:
    """
    One weighted loss.

    ``linear``: l(z) = <vector, z>. ``fenchel_y``: l(y) = f*(y) - <vector, y>
    where vector is the x-player's point. ``composite_x``: l(x) = <vector, x> + psi(x)
    where vector is the y-player's point.
    """

    kind: str
    weight: float
    vector: Vector
    objective: Optional[Objective] = None
    psi: Optional[CompositeTerm] = None

    def __post_init__(self) -> None:
        if self.kind not in LOSS_KINDS:
            raise ValueError(f"Unknown loss kind '{self.kind}'. Valid kinds: {', '.join(LOSS_KINDS)}")
        if not self.weight > 0:
            raise ValueError(f"loss weight must be positive, got {self.weight}")
        if self.kind == "fenchel_y" and self.objective is None:
            raise ValueError("fenchel_y losses need the objective")

    def value(self, z: Vector, conj: Optional[float] = None) -> float:
        """Evaluate the loss at z; ``conj`` supplies f*(z) for Fenchel losses when already known."""
        inner = float(np.vdot(self.vector, z))
        if self.kind == "linear":
            return inner
        if self.kind == "composite_x":
            return inner + (self.psi.value(z) if self.psi is not None else 0.0)
        f_star = self.objective.conjugate(z) if conj is None else conj
        return f_star - inner

    def gradient(self, z: Vector) -> Vector:
        if self.kind == "linear":
            return np.asarray(self.vector, dtype=np.float64)
        if self.kind == "composite_x":
            extra = self.psi.subgradient(z) if self.psi is not None else 0.0
            return self.vector + extra
        raise FenchelGameError("gradients of Fenchel losses need grad f*, which is not exposed")


def linear_loss(theta: Any, weight: float = 1.0) -> LossDescriptor:
    return LossDescriptor("linear", float(weight), np.asarray(theta, dtype=np.float64))


def fenchel_loss(x: Any, weight: float, objective: Objective) -> LossDescriptor:
    return LossDescriptor("fenchel_y", float(weight), np.asarray(x, dtype=np.float64), objective=objective)


def composite_loss(y: Any, weight: float = 1.0, psi: Optional[CompositeTerm] = None) -> LossDescriptor:
    return LossDescriptor("composite_x", float(weight), np.asarray(y, dtype=np.float64), psi=psi)


@dataclass
class LossAggregate:
    """Running weighted sums of a loss history."""

    side: Optional[str] = None
    count: int = 0
    total_weight: float = 0.0
    linear_sum: Optional[Vector] = None
    quad_weight: float = 0.0
    quad_center_sum: Optional[Vector] = None
    l1_weight: float = 0.0
    fenchel_mean: Optional[Vector] = None
    objective: Optional[Objective] = None

    def add(self, loss: LossDescriptor) -> None:
        side = "y" if loss.kind == "fenchel_y" else "x"
        if self.side is not None and side != self.side:
            raise FenchelGameError(f"cannot mix {loss.kind} losses into a {self.side}-side history")
        self.side = side
        alpha = loss.weight
        self.count += 1
        self.total_weight += alpha
        if side == "y":
            self.objective = loss.objective
            if self.fenchel_mean is None:
                self.fenchel_mean = np.array(loss.vector, dtype=np.float64)
            else:
                self.fenchel_mean = self.fenchel_mean + (alpha / self.total_weight) * (loss.vector - self.fenchel_mean)
            return

        contribution = alpha * loss.vector
        self.linear_sum = contribution if self.linear_sum is None else self.linear_sum + contribution
        psi = loss.psi
        if isinstance(psi, QuadraticTerm):
            self.quad_weight += alpha * psi.mu
            center = psi.center if psi.center is not None else np.zeros_like(loss.vector)
            term = alpha * psi.mu * center
            self.quad_center_sum = term if self.quad_center_sum is None else self.quad_center_sum + term
        elif isinstance(psi, L1Penalty):
            self.l1_weight += alpha * psi.lam

    def with_loss(self, loss: LossDescriptor) -> "LossAggregate":
        extended = copy.copy(self)
        extended.add(loss)
        return extended


def solve_regularized(
    aggregate: LossAggregate,
    decision_set: FeasibleSet,
    regularizer: Optional[BregmanGeometry] = None,
    eta: Optional[float] = None,
) -> Vector:
    """
    Minimize the aggregated x-side losses plus (1/eta) R over the set.

    Quadratic and l1 parts are handled in closed form through the set's prox;
    with neither curvature nor regularizer the minimizer is the LMO answer,
    which requires a bounded set.
    """
    if aggregate.side == "y":
        raise FenchelGameError("solve_regularized handles x-side losses only")
    shape = decision_set.point_shape
    S = aggregate.linear_sum if aggregate.linear_sum is not None else np.zeros(shape)

    if regularizer is not None and not isinstance(regularizer, SquaredEuclidean):
        if aggregate.quad_weight > 0 or aggregate.l1_weight > 0:
            raise FenchelGameError(f"{type(regularizer).__name__} supports linear losses only")
        return regularizer.mirror(-eta * S, decision_set)

    Q = aggregate.quad_weight
    centers = aggregate.quad_center_sum if aggregate.quad_center_sum is not None else np.zeros(shape)
    if regularizer is not None:
        Q += 1.0 / eta
        if regularizer.center is not None:
            centers = centers + regularizer.center / eta

    if Q == 0.0:
        if aggregate.l1_weight > 0:
            raise FenchelGameError("an l1 term without curvature has no closed-form minimizer")
        if not decision_set.bounded:
            raise FenchelGameError(f"linear losses over the unbounded {decision_set.name} have no minimizer")
        return decision_set.lmo(S)

    p = (centers - S) / Q
    if aggregate.l1_weight > 0:
        return decision_set.prox(p, 1.0 / Q, L1Penalty(aggregate.l1_weight))
    return decision_set.project(p)


# ---------------------------------------------------------------------------
# Pure step functions
# ---------------------------------------------------------------------------


def ftl_step(
    aggregate: LossAggregate,
    decision_set: Optional[FeasibleSet],
    z_init: Optional[Vector] = None,
) -> Vector:
    """
    Follow the leader: exact minimizer of the weighted cumulative loss.

    Fenchel histories answer grad f at the weighted average of the x points.

    Raises:
        FenchelGameError: On an empty history without z_init, or linear losses
            over an unbounded set
    """
    if aggregate.count == 0:
        if z_init is None:
            raise FenchelGameError("empty history and no initial point")
        return np.array(z_init, dtype=np.float64)
    if aggregate.side == "y":
        return aggregate.objective.gradient(aggregate.fenchel_mean)
    return solve_regularized(aggregate, decision_set)


def optimistic_ftl_step(
    aggregate: LossAggregate,
    hint: Optional[LossDescriptor],
    decision_set: Optional[FeasibleSet],
) -> Vector:
    """Minimize the history plus the hint loss; a hint equal to the true loss gives FTL+."""
    if hint is None:
        if aggregate.count == 0:
            raise FenchelGameError("empty history and no hint")
        return ftl_step(aggregate, decision_set)
    return ftl_step(aggregate.with_loss(hint), decision_set)


def _check_eta(eta: float) -> None:
    if eta is None or not eta > 0:
        raise ValueError(f"eta must be positive, got {eta}")


def ftrl_step(
    aggregate: LossAggregate,
    decision_set: FeasibleSet,
    regularizer: BregmanGeometry,
    eta: float,
) -> Vector:
    """argmin sum_{s<t} alpha_s l_s(z) + (1/eta) R(z)."""
    _check_eta(eta)
    return solve_regularized(aggregate, decision_set, regularizer, eta)


def ftrl_plus_step(
    aggregate: LossAggregate,
    current: LossDescriptor,
    decision_set: FeasibleSet,
    regularizer: BregmanGeometry,
    eta: float,
) -> Vector:
    """Be-the-regularized-leader: the FTRL minimizer including the current loss."""
    _check_eta(eta)
    return solve_regularized(aggregate.with_loss(current), decision_set, regularizer, eta)


def optimistic_ftrl_step(
    aggregate: LossAggregate,
    hint: Optional[LossDescriptor],
    decision_set: FeasibleSet,
    regularizer: Optional[BregmanGeometry],
    eta: Optional[float],
) -> Vector:
    """
    FTRL with a hint loss.

    Without a regularizer this is optimistic FTL; without a hint it is FTRL.
    """
    if regularizer is None:
        return optimistic_ftl_step(aggregate, hint, decision_set)
    if hint is None:
        return ftrl_step(aggregate, decision_set, regularizer, eta)
    return ftrl_plus_step(aggregate, hint, decision_set, regularizer, eta)


def best_resp_step(current: LossDescriptor, decision_set: Optional[FeasibleSet]) -> Vector:
    """Minimize the current loss alone."""
    return ftl_step(LossAggregate().with_loss(current), decision_set)


def omd_plus_step(
    previous: Vector,
    current: LossDescriptor,
    decision_set: FeasibleSet,
    geometry: BregmanGeometry,
    gamma: float,
) -> Vector:
    """
    Prescient mirror descent: argmin alpha_t l_t(z) + (1/gamma) V_{previous}(z).

    Raises:
        ValueError: If gamma is not positive
        FenchelGameError: If the geometry is not differentiable
    """
    if not gamma > 0:
        raise ValueError(f"gamma must be positive, got {gamma}")
    if not geometry.differentiable:
        raise FenchelGameError(f"{type(geometry).__name__} is not differentiable; mirror steps need grad phi")
    if current.kind == "fenchel_y":
        raise FenchelGameError("mirror steps on Fenchel losses are not supported")
    scaled = replace(current, weight=gamma * current.weight)
    if isinstance(geometry, SquaredEuclidean):
        return solve_regularized(LossAggregate().with_loss(scaled), decision_set, SquaredEuclidean(previous), 1.0)
    if current.psi is not None:
        raise FenchelGameError("composite mirror steps need the Euclidean geometry")
    theta = geometry.grad_phi(previous) - scaled.weight * current.vector
    return geometry.mirror(theta, decision_set)


def _perturbed_points(aggregate: LossAggregate, noise: Vector) -> List[Vector]:
    # argmin sum alpha_s l_s(y) + <xi, y> = grad f(xbar - xi/A)
    return [aggregate.fenchel_mean - xi / aggregate.total_weight for xi in noise]


def _draw_noise(shape: Sequence[int], noise_scale: float, n_samples: int, seed: SeedLike) -> Vector:
    rng = np.random.default_rng(seed)
    return noise_scale * rng.standard_normal((n_samples, *shape))


def ftpl_step(
    aggregate: LossAggregate,
    decision_set: Optional[FeasibleSet],
    noise_scale: float,
    n_samples: int,
    seed: SeedLike,
    z_init: Optional[Vector] = None,
) -> Vector:
    """
    Follow the perturbed leader averaged over Gaussian perturbations.

    With ``noise_scale = 0`` this is exactly ``ftl_step``.
    """
    if n_samples < 1:
        raise ValueError(f"n_samples must be at least 1, got {n_samples}")
    if noise_scale < 0:
        raise ValueError(f"noise_scale must be nonnegative, got {noise_scale}")
    if noise_scale == 0.0 or aggregate.count == 0:
        return ftl_step(aggregate, decision_set, z_init)

    if aggregate.side == "y":
        shape = aggregate.fenchel_mean.shape
        noise = _draw_noise(shape, noise_scale, n_samples, seed)
        grads = [aggregate.objective.gradient(p) for p in _perturbed_points(aggregate, noise)]
        return np.mean(grads, axis=0)

    noise = _draw_noise(decision_set.point_shape, noise_scale, n_samples, seed)
    actions = []
    for xi in noise:
        perturbed = copy.copy(aggregate)
        perturbed.linear_sum = aggregate.linear_sum + xi
        actions.append(solve_regularized(perturbed, decision_set))
    return np.mean(actions, axis=0)


def weighted_regret(
    losses: Sequence[LossDescriptor],
    actions: Sequence[Vector],
    comparator: Vector,
    conj_values: Optional[Sequence[float]] = None,
) -> float:
    """
    Weighted regret sum_t alpha_t (l_t(z_t) - l_t(comparator)).

    ``conj_values`` supplies f*(z_t) for Fenchel losses so that the conjugate
    is only evaluated numerically at the comparator.
    """
    if len(losses) != len(actions):
        raise ValueError(f"{len(losses)} losses but {len(actions)} actions")
    comparator = np.asarray(comparator, dtype=np.float64)
    comp_conj = None
    if losses and losses[0].kind == "fenchel_y":
        comp_conj = losses[0].objective.conjugate(comparator)
    terms = []
    for idx, (loss, z) in enumerate(zip(losses, actions)):
        conj = conj_values[idx] if conj_values is not None else None
        terms.append(loss.weight * (loss.value(z, conj) - loss.value(comparator, comp_conj)))
    return math.fsum(terms)


# ---------------------------------------------------------------------------
# Stateful learners
# ---------------------------------------------------------------------------


class OnlineLearner:
    """
    Base class for a single-owner weighted online learner.

    x-side learners choose points of ``decision_set``. y-side learners play
    against Fenchel losses of ``objective``; their first action with an empty
    history is grad f(anchor).
    """

    strategy = "base"
    prescient = False
    optimistic = False

    def __init__(
        self,
        decision_set: Optional[FeasibleSet] = None,
        z_init: Optional[Vector] = None,
        objective: Optional[Objective] = None,
        anchor: Optional[Vector] = None,
    ):
        self.decision_set = decision_set
        self.objective = objective
        self.side = "y" if objective is not None and decision_set is None else "x"
        self.anchor = None if anchor is None else np.asarray(anchor, dtype=np.float64)
        if self.side == "y" and z_init is None and self.anchor is not None:
            z_init = objective.gradient(self.anchor)
        self.z_init = None if z_init is None else np.asarray(z_init, dtype=np.float64)
        self.aggregate = LossAggregate()
        self.losses: List[LossDescriptor] = []
        self.actions: List[Vector] = []
        self.conj_values: List[float] = []

    @property
    def t(self) -> int:
        return len(self.actions) + 1

    def act(self, current: Optional[LossDescriptor] = None, hint: Optional[LossDescriptor] = None) -> Vector:
        if self.prescient and current is None:
            raise FenchelGameError(f"{self.strategy} needs the current loss")
        action = self._choose(current, hint)
        self.actions.append(action)
        return action

    def observe(self, loss: LossDescriptor) -> None:
        if len(self.losses) >= len(self.actions):
            raise FenchelGameError("observe() called before act()")
        self.losses.append(loss)
        self.aggregate.add(loss)

    def _choose(self, current: Optional[LossDescriptor], hint: Optional[LossDescriptor]) -> Vector:
        raise NotImplementedError

    def _leader(self, aggregate: LossAggregate) -> Vector:
        action = ftl_step(aggregate, self.decision_set, self.z_init)
        if self.side == "y":
            point = aggregate.fenchel_mean if aggregate.count else self.anchor
            self._record_conj(point, action)
        return action

    def _record_conj(self, point: Optional[Vector], action: Vector) -> None:
        if point is None:
            self.conj_values.append(self.objective.conjugate(action))
        else:
            self.conj_values.append(self.objective.fenchel_young(point, action))

    @property
    def cumulative_weighted_loss(self) -> float:
        conj = self.conj_values if self.side == "y" else None
        return math.fsum(
            loss.weight * loss.value(z, conj[i] if conj else None)
            for i, (loss, z) in enumerate(zip(self.losses, self.actions))
        )

    def weighted_regret(self, comparator: Vector) -> float:
        conj = self.conj_values[: len(self.losses)] if self.side == "y" else None
        return weighted_regret(self.losses, self.actions[: len(self.losses)], comparator, conj)


class FTL(OnlineLearner):
    strategy = "ftl"

    def _choose(self, current, hint):
        return self._leader(self.aggregate)


class FTLPlus(OnlineLearner):
    strategy = "ftl_plus"
    prescient = True

    def _choose(self, current, hint):
        return self._leader(self.aggregate.with_loss(current))


class OptimisticFTL(OnlineLearner):
    strategy = "optimistic_ftl"
    optimistic = True

    def _choose(self, current, hint):
        if hint is None and self.aggregate.count == 0 and self.z_init is None:
            raise FenchelGameError("empty history and no hint")
        aggregate = self.aggregate if hint is None else self.aggregate.with_loss(hint)
        return self._leader(aggregate)


class _RegularizedLearner(OnlineLearner):
    def __init__(self, decision_set: FeasibleSet, regularizer: BregmanGeometry, eta: float, **kwargs: Any):
        super().__init__(decision_set, **kwargs)
        if self.side == "y":
            raise FenchelGameError(f"{self.strategy} is an x-side strategy")
        if regularizer is not None:
            _check_eta(eta)
        self.regularizer = regularizer
        self.eta = eta


class FTRL(_RegularizedLearner):
    strategy = "ftrl"

    def _choose(self, current, hint):
        return ftrl_step(self.aggregate, self.decision_set, self.regularizer, self.eta)


class FTRLPlus(_RegularizedLearner):
    strategy = "ftrl_plus"
    prescient = True

    def _choose(self, current, hint):
        return ftrl_plus_step(self.aggregate, current, self.decision_set, self.regularizer, self.eta)


class OptimisticFTRL(_RegularizedLearner):
    strategy = "optimistic_ftrl"
    optimistic = True

    def _choose(self, current, hint):
        if self.regularizer is None and hint is None and self.aggregate.count == 0:
            return ftl_step(self.aggregate, self.decision_set, self.z_init)
        return optimistic_ftrl_step(self.aggregate, hint, self.decision_set, self.regularizer, self.eta)


class BestResponse(OnlineLearner):
    strategy = "best_response"
    prescient = True

    def _choose(self, current, hint):
        action = best_resp_step(current, self.decision_set)
        if self.side == "y":
            self._record_conj(current.vector, action)
        return action


class OMDPlus(OnlineLearner):
    strategy = "omd_plus"
    prescient = True

    def __init__(self, decision_set: FeasibleSet, geometry: BregmanGeometry, gamma: float, **kwargs: Any):
        super().__init__(decision_set, **kwargs)
        if self.z_init is None:
            raise FenchelGameError("omd_plus needs an initial point")
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.geometry = geometry
        self.gamma = gamma

    def _choose(self, current, hint):
        previous = self.actions[-1] if self.actions else self.z_init
        return omd_plus_step(previous, current, self.decision_set, self.geometry, self.gamma)


class FTPL(OnlineLearner):
    """Follow the perturbed leader; round t draws from the seed (seed, t)."""

    strategy = "ftpl"

    def __init__(self, noise_scale: float = 1.0, n_samples: int = 64, seed: int = 0, **kwargs: Any):
        super().__init__(**kwargs)
        if n_samples < 1:
            raise ValueError(f"n_samples must be at least 1, got {n_samples}")
        self.noise_scale = float(noise_scale)
        self.n_samples = int(n_samples)
        self.seed = int(seed)

    def _choose(self, current, hint):
        round_seed = [self.seed, self.t]
        aggregate = self.aggregate
        if self.side == "x" or self.noise_scale == 0.0 or aggregate.count == 0:
            action = ftpl_step(aggregate, self.decision_set, self.noise_scale, self.n_samples, round_seed, self.z_init)
            if self.side == "y":
                self._record_conj(aggregate.fenchel_mean if aggregate.count else self.anchor, action)
            return action

        noise = _draw_noise(aggregate.fenchel_mean.shape, self.noise_scale, self.n_samples, round_seed)
        points = _perturbed_points(aggregate, noise)
        grads = [self.objective.gradient(p) for p in points]
        # Jensen: f*(mean g_j) <= mean f*(g_j), an upper bound for the gap estimate
        self.conj_values.append(float(np.mean([self.objective.fenchel_young(p, g) for p, g in zip(points, grads)])))
        return np.mean(grads, axis=0)


class OnlineGradientDescent(OnlineLearner):
    """Projected online gradient descent with step gamma/sqrt(t)."""

    strategy = "ogd"

    def __init__(self, decision_set: FeasibleSet, gamma: float, **kwargs: Any):
        super().__init__(decision_set, **kwargs)
        if self.z_init is None:
            raise FenchelGameError("ogd needs an initial point")
        if not gamma > 0:
            raise ValueError(f"gamma must be positive, got {gamma}")
        self.gamma = gamma

    def _choose(self, current, hint):
        if not self.actions:
            return self.z_init.copy()
        previous, loss = self.actions[-1], self.losses[-1]
        step = self.gamma / math.sqrt(len(self.actions))
        return self.decision_set.project(previous - step * loss.weight * loss.gradient(previous))


class IncrementalGradient(OnlineLearner):
    """
    y-side learner for finite sums f = (1/n) sum f_i.

    Keeps a table of scaled component gradients and refreshes entry
    (t-1) mod n at the current weighted average of the x points each round.
    """

    strategy = "incremental"

    def __init__(self, objective: Objective, anchor: Vector, **kwargs: Any):
        super().__init__(objective=objective, anchor=anchor, **kwargs)
        n = objective.n_components
        if n <= 0:
            raise FenchelGameError(f"objective '{objective.name}' is not a finite sum")
        self.table = [objective.component_gradient(i, self.anchor) / n for i in range(n)]

    def _choose(self, current, hint):
        n = len(self.table)
        point = self.aggregate.fenchel_mean if self.aggregate.count else self.anchor
        i = (self.t - 1) % n
        self.table[i] = self.objective.component_gradient(i, point) / n
        action = np.sum(np.stack(self.table), axis=0)
        self.conj_values.append(self.objective.conjugate(action))
        return action


# ---------------------------------------------------------------------------
# Factory
# ---------------------------------------------------------------------------


STRATEGIES = (
    "ftl",
    "ftl_plus",
    "optimistic_ftl",
    "ftrl",
    "ftrl_plus",
    "optimistic_ftrl",
    "best_response",
    "omd_plus",
    "ftpl",
    "ogd",
    "incremental",
)


@dataclass(frozen=True)
class LearnerSpec:
    """Strategy name plus its options (eta, gamma, regularizer, geometry, noise_scale, ...)."""

    strategy: str
    options: Dict[str, Any] = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.strategy not in STRATEGIES:
            raise ValueError(f"Unknown strategy '{self.strategy}'. Valid strategies: {', '.join(STRATEGIES)}")


def _geometry(value: Any, center: Optional[Vector] = None) -> Optional[BregmanGeometry]:
    if value is None or isinstance(value, BregmanGeometry):
        return value
    if value == "euclidean":
        return SquaredEuclidean(center)
    if value == "entropy":
        return NegativeEntropy()
    raise ValueError(f"Unknown regularizer '{value}'. Valid names: euclidean, entropy")


def build_learner(
    spec: LearnerSpec,
    decision_set: Optional[FeasibleSet],
    start: Optional[Vector],
    objective: Optional[Objective] = None,
    side: str = "x",
) -> OnlineLearner:
    """
    Instantiate a learner.

    Args:
        spec: Strategy and options
        decision_set: The x-player's set (ignored for y-side learners)
        start: x-side initial point, or the y-side anchor w0 (first action grad f(w0))
        objective: The payoff objective (y side only)
        side: "x" or "y"

    Returns:
        A fresh learner
    """
    opts = dict(spec.options)
    if side == "y":
        base: Dict[str, Any] = {"objective": objective, "anchor": start}
        if spec.strategy == "incremental":
            return IncrementalGradient(objective=objective, anchor=start)
    else:
        base = {"decision_set": decision_set, "z_init": start}

    strategy = spec.strategy
    logger.debug("building %s-player learner %s", side, strategy)
    if strategy == "ftl":
        return FTL(**base)
    if strategy == "ftl_plus":
        return FTLPlus(**base)
    if strategy == "optimistic_ftl":
        return OptimisticFTL(**base)
    if strategy == "best_response":
        return BestResponse(**base)
    if strategy == "ftpl":
        return FTPL(opts.get("noise_scale", 1.0), opts.get("n_samples", 64), opts.get("seed", 0), **base)
    if side == "y":
        raise FenchelGameError(f"strategy '{strategy}' is not available to the y-player")

    center = start if opts.get("center_at_start") else None
    if strategy in ("ftrl", "ftrl_plus", "optimistic_ftrl"):
        regularizer = _geometry(opts.get("regularizer", "euclidean"), center)
        cls = {"ftrl": FTRL, "ftrl_plus": FTRLPlus, "optimistic_ftrl": OptimisticFTRL}[strategy]
        return cls(decision_set, regularizer, opts.get("eta"), z_init=start)
    if strategy == "omd_plus":
        return OMDPlus(decision_set, _geometry(opts.get("geometry", "euclidean")), opts.get("gamma"), z_init=start)
    if strategy == "ogd":
        return OnlineGradientDescent(decision_set, opts.get("gamma", 1.0), z_init=start)
    raise FenchelGameError(f"strategy '{strategy}' is not available to the x-player")
