"""
Polyak heavy-ball momentum: solvers, non-asymptotic rate certificates and
the acceleration experiments (quadratics, a wide one-hidden-layer ReLU
network, a deep linear network, cubic-regularized problems).
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
import scipy.linalg

from .oracles import DivergenceError, Objective, Trace, Vector

logger = logging.getLogger(__name__)

VERSIONS = ("hb1", "hb2")
PROBLEM_KINDS = ("quadratic", "relu", "deep_linear")
RESIDUAL_FLOOR = 1e-10


@dataclass(frozen=True)
class MomentumConfig:
    """
    Heavy-ball parameters.

    ``hb1``: M_t = beta M_{t-1} + grad(w_t), w_{t+1} = w_t - eta M_t.
    ``hb2``: w_{t+1} = w_t - eta grad(w_t) + beta (w_t - w_{t-1}).
    Both start from w_{-1} = w_0 (M_{-1} = 0).
    """

    eta: float
    beta: float = 0.0
    w0: Optional[Vector] = None
    version: str = "hb2"

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if self.version not in VERSIONS:
            raise ValueError(f"Unknown version '{self.version}'. Valid versions: {', '.join(VERSIONS)}")


class HeavyBall:
    """Single-owner heavy-ball stepper over arbitrary array shapes."""

    def __init__(self, config: MomentumConfig, w0: Vector):
        self.config = config
        self.w = np.array(w0, dtype=np.float64)
        self.w_prev = self.w.copy()
        self.buffer = np.zeros_like(self.w)

    def step(self, grad: Vector) -> Vector:
        eta, beta = self.config.eta, self.config.beta
        if self.config.version == "hb1":
            self.buffer = beta * self.buffer + grad
            w_next = self.w - eta * self.buffer
        else:
            w_next = self.w - eta * grad + beta * (self.w - self.w_prev)
        self.w_prev, self.w = self.w, w_next
        return self.w


def _stacked(a: Vector, b: Vector) -> float:
    return math.sqrt(float(np.vdot(a, a)) + float(np.vdot(b, b)))


def heavy_ball_run(
    config: MomentumConfig,
    objective: Objective,
    T: int,
    w_star: Optional[Vector] = None,
    record_every: int = 1,
    stop_below: Optional[float] = None,
) -> Trace:
    """
    Run heavy-ball momentum for T steps.

    Rows t = 0..T (every ``record_every`` steps plus the last) hold f(w_t),
    ||grad f(w_t)|| and, with ``w_star``, the stacked residual
    ||(w_t - w*, w_{t-1} - w*)||. ``trace.iterates`` keeps every w_t.
    The run stops early once the residual drops below ``stop_below``.

    Raises:
        ValueError: If no start point is available
        DivergenceError: If an iterate becomes non-finite
    """
    if config.w0 is None:
        raise ValueError("heavy_ball_run needs config.w0")
    if record_every < 1:
        raise ValueError(f"record_every must be at least 1, got {record_every}")
    logger.info("heavy ball %s: eta=%g beta=%g T=%d", config.version, config.eta, config.beta, T)
    hb = HeavyBall(config, config.w0)
    star = None if w_star is None else np.asarray(w_star, dtype=np.float64)
    trace = Trace(
        columns=["f_value", "grad_norm"] + (["residual"] if star is not None else []),
        metadata={"eta": config.eta, "beta": config.beta, "version": config.version},
    )

    grad = objective.gradient(hb.w)
    for t in range(T + 1):
        residual = None if star is None else _stacked(hb.w - star, hb.w_prev - star)
        trace.iterates.append(hb.w.copy())
        done = t == T or (stop_below is not None and residual is not None and residual < stop_below)
        if t % record_every == 0 or done:
            row: Dict[str, Any] = {"f_value": objective.value(hb.w), "grad_norm": float(np.linalg.norm(grad))}
            if star is not None:
                row["residual"] = residual
            trace.append(t, **row)
        if done:
            break
        w = hb.step(grad)
        if not np.all(np.isfinite(w)):
            raise DivergenceError("non-finite iterate", t + 1)
        grad = objective.gradient(w)
    return trace


# ---------------------------------------------------------------------------
# Rate machinery
# ---------------------------------------------------------------------------


def _h(beta: float, z: float) -> float:
    return -(beta - (1.0 - math.sqrt(z)) ** 2) * (beta - (1.0 + math.sqrt(z)) ** 2)


def admissibility_thresholds(eta_lambda_min: float, eta_lambda_max: float) -> Tuple[float, float]:
    """Return ((1 - sqrt(eta lambda_min))^2, (1 - sqrt(eta lambda_max))^2)."""
    return (1.0 - math.sqrt(eta_lambda_min)) ** 2, (1.0 - math.sqrt(eta_lambda_max)) ** 2


def c0_constant(beta: float, eta_lambda_min: float, eta_lambda_max: float) -> float:
    """
    C_0 = sqrt(2) (beta + 1) / sqrt(min(h(beta, eta lambda_min), h(beta, eta lambda_max)))
    with h(beta, z) = -(beta - (1 - sqrt z)^2)(beta - (1 + sqrt z)^2).

    Raises:
        ValueError: If beta is not admissible for the given spectrum
    """
    if not 0 < eta_lambda_min <= eta_lambda_max:
        raise ValueError(f"need 0 < eta*lambda_min <= eta*lambda_max, got {eta_lambda_min}, {eta_lambda_max}")
    low, high = admissibility_thresholds(eta_lambda_min, eta_lambda_max)
    if not beta > max(low, high):
        raise ValueError(
            f"beta={beta} is not admissible: needs beta > (1-sqrt(eta*lambda_min))^2 = {low:.6g} "
            f"and beta > (1-sqrt(eta*lambda_max))^2 = {high:.6g}"
        )
    h_min = min(_h(beta, eta_lambda_min), _h(beta, eta_lambda_max))
    if not h_min > 0:
        raise ValueError(f"beta={beta} is not admissible: h(beta, z) = {h_min:.6g} <= 0")
    return math.sqrt(2.0) * (beta + 1.0) / math.sqrt(h_min)


@dataclass(frozen=True)
class ResidualBoundCert:
    """Certificate ||v_t|| <= C0 rate^t ||v_0|| for the stacked residual v_t."""

    kappa: float
    beta: float
    eta: float
    C0: float
    rate: float

    def __post_init__(self) -> None:
        if self.C0 < 1.0 - 1e-12:
            raise ValueError(f"C0 must be at least 1, got {self.C0}")

    def bound(self, t: int, initial: float, constant: Optional[float] = None) -> float:
        c = self.C0 if constant is None else constant
        return self.rate**t * c * initial


def quadratic_certificate(lambda_min: float, lambda_max: float) -> ResidualBoundCert:
    """Certificate at eta = 1/lambda_max, beta = (1 - 1/(2 sqrt kappa))^2; its C0 is at most 4 sqrt(kappa)."""
    params = tuned_params("quadratic", {"lambda_min": lambda_min, "lambda_max": lambda_max})
    kappa = lambda_max / lambda_min
    C0 = c0_constant(params.beta, params.eta * lambda_min, params.eta * lambda_max)
    return ResidualBoundCert(kappa=kappa, beta=params.beta, eta=params.eta, C0=C0, rate=math.sqrt(params.beta))


def momentum_matrix(H: Any, eta: float, beta: float) -> Vector:
    """A = [[(1 + beta) I - eta H, -beta I], [I, 0]]."""
    H = np.asarray(H, dtype=np.float64)
    d = H.shape[0]
    eye = np.eye(d)
    return np.block([[(1.0 + beta) * eye - eta * H, -beta * eye], [eye, np.zeros((d, d))]])


def akv_bound_check(H: Any, v0: Any, eta: float, beta: float, K: int) -> Tuple[bool, float]:
    """
    Check ||A^k v|| <= sqrt(beta)^k C ||v|| for k = 0..K by repeated multiplication.

    A length-n ``v0`` is the residual u of a momentum run started with
    w_{-1} = w_0 and is stacked as v = (u, u); the constant is C = C0, valid
    while eta * lambda_max <= 1 + beta. A length-2n ``v0`` is used as given
    with C = sqrt(2) C0, the constant that holds for arbitrary vectors.

    Returns:
        Tuple of (bound held for every k, worst ratio ||A^k v|| / bound)
    """
    H = np.asarray(H, dtype=np.float64)
    v = np.asarray(v0, dtype=np.float64)
    n = H.shape[0]
    evals = scipy.linalg.eigvalsh(H)
    C0 = c0_constant(beta, eta * float(evals[0]), eta * float(evals[-1]))
    if v.shape == (n,):
        v = np.concatenate([v, v])
        if eta * float(evals[-1]) > 1.0 + beta:
            C0 *= math.sqrt(2.0)
    elif v.shape == (2 * n,):
        C0 *= math.sqrt(2.0)
    else:
        raise ValueError(f"v0 must have length {n} or {2 * n}, got shape {v.shape}")
    A = momentum_matrix(H, eta, beta)
    norm0 = float(np.linalg.norm(v))
    if norm0 == 0.0:
        return True, 0.0
    worst = 0.0
    for k in range(K + 1):
        ratio = float(np.linalg.norm(v)) / (math.sqrt(beta) ** k * C0 * norm0)
        worst = max(worst, ratio)
        v = A @ v
    return worst <= 1.0 + 1e-9, worst


def tuned_params(problem_kind: str, constants: Dict[str, Any]) -> MomentumConfig:
    """
    Step size and momentum prescribed for each problem class.

    quadratic: eta = 1/lambda_max, beta = (1 - 1/(2 sqrt kappa))^2 (constants lambda_min, lambda_max).
    relu: the same formulas on the spectrum of the initial Gram matrix.
    deep_linear: eta = d_y / (L sigma_max^2), kappa = sigma_max^2 / sigma_min^2
    (constants d_y, L, sigma_max_sq, sigma_min_sq).

    Raises:
        ValueError: On an unknown kind, missing constants or kappa < 1
    """
    if problem_kind not in PROBLEM_KINDS:
        raise ValueError(f"Unknown problem kind '{problem_kind}'. Valid kinds: {', '.join(PROBLEM_KINDS)}")
    try:
        if problem_kind == "deep_linear":
            eta = float(constants["d_y"]) / (float(constants["L"]) * float(constants["sigma_max_sq"]))
            kappa = float(constants["sigma_max_sq"]) / float(constants["sigma_min_sq"])
        else:
            eta = 1.0 / float(constants["lambda_max"])
            kappa = float(constants["lambda_max"]) / float(constants["lambda_min"])
    except KeyError as e:
        raise ValueError(f"tuned_params('{problem_kind}') needs constant {e}") from e
    if not kappa >= 1.0:
        raise ValueError(f"condition number must be at least 1, got {kappa}")
    beta = (1.0 - 1.0 / (2.0 * math.sqrt(kappa))) ** 2
    return MomentumConfig(eta=eta, beta=beta, w0=constants.get("w0"))


# ---------------------------------------------------------------------------
# One-hidden-layer ReLU network
# ---------------------------------------------------------------------------


RELU_INITS = ("gaussian", "symmetric")
RELU_REDUCTIONS = ("sum", "mean")


@dataclass
class ReluNet:
    """
    N_W(x) = (1/sqrt(m)) sum_r a_r relu(<w_r, x>); only the first layer W (m x d) trains.

    The loss is 1/2 sum_i xi_i^2 with ``reduction="sum"`` and the empirical
    risk 1/(2n) sum_i xi_i^2 with ``reduction="mean"``. The ReLU indicator
    counts 0 as active.
    """

    W: Vector
    a: Vector
    X: Vector
    y: Vector
    reduction: str = "sum"

    def __post_init__(self) -> None:
        m, d = self.W.shape
        if self.a.shape != (m,):
            raise ValueError(f"a must have shape ({m},), got {self.a.shape}")
        if self.X.ndim != 2 or self.X.shape[1] != d:
            raise ValueError(f"X must have {d} columns, got shape {self.X.shape}")
        if self.y.shape != (self.X.shape[0],):
            raise ValueError("y must have one label per sample")
        if np.max(np.linalg.norm(self.X, axis=1)) > 1.0 + 1e-12:
            raise ValueError("samples must satisfy ||x_i|| <= 1")
        if self.reduction not in RELU_REDUCTIONS:
            raise ValueError(f"Unknown reduction '{self.reduction}'. Valid options: {', '.join(RELU_REDUCTIONS)}")

    @property
    def m(self) -> int:
        return self.W.shape[0]

    @property
    def loss_weight(self) -> float:
        return 1.0 if self.reduction == "sum" else 1.0 / self.X.shape[0]

    def activations(self, W: Optional[Vector] = None) -> Vector:
        W = self.W if W is None else W
        return (self.X @ W.T >= 0.0).astype(np.float64)

    def forward(self, W: Optional[Vector] = None) -> Vector:
        W = self.W if W is None else W
        pre = self.X @ W.T
        return (np.maximum(pre, 0.0) @ self.a) / math.sqrt(self.m)

    def loss(self, W: Optional[Vector] = None) -> float:
        xi = self.forward(W) - self.y
        return 0.5 * self.loss_weight * float(xi @ xi)

    def gradient(self, W: Optional[Vector] = None) -> Vector:
        W = self.W if W is None else W
        xi = self.loss_weight * (self.forward(W) - self.y)
        act = self.activations(W)
        return ((act * xi[:, None]).T @ self.X) * self.a[:, None] / math.sqrt(self.m)


def relu_gram(net: ReluNet, W: Optional[Vector] = None) -> Vector:
    """H_ij = x_i'x_j / m * #{r : both <w_r, x_i> >= 0 and <w_r, x_j> >= 0}."""
    act = net.activations(W)
    return (net.X @ net.X.T) * (act @ act.T) / net.m


def make_relu_problem(
    n: int = 5,
    m: int = 1000,
    d: int = 10,
    seed: int = 0,
    input_shift: float = 0.0,
    init: str = "gaussian",
    reduction: str = "sum",
) -> ReluNet:
    """
    Gaussian inputs scaled to unit norm, labels uniform on {-1, +1}, w_r ~ N(0, I), a_r uniform on {-1, +1}.

    ``input_shift`` adds a common offset to the first coordinate before
    normalizing, which correlates the inputs and raises the Gram condition number.
    ``init="symmetric"`` draws m/2 neurons and pairs each (w, a) with (w, -a):
    the marginals are unchanged and the network outputs 0 at initialization.

    Raises:
        ValueError: If ``init`` is unknown, or symmetric with odd m
    """
    if init not in RELU_INITS:
        raise ValueError(f"Unknown init '{init}'. Valid options: {', '.join(RELU_INITS)}")
    if init == "symmetric" and m % 2:
        raise ValueError(f"symmetric init needs an even width, got m={m}")
    rng = np.random.default_rng(seed)
    X = rng.standard_normal((n, d))
    X[:, 0] += input_shift
    X /= np.linalg.norm(X, axis=1, keepdims=True)
    y = rng.choice([-1.0, 1.0], size=n)
    if init == "symmetric":
        W = np.repeat(rng.standard_normal((m // 2, d)), 2, axis=0)
        a = np.repeat(rng.choice([-1.0, 1.0], size=m // 2), 2) * np.tile([1.0, -1.0], m // 2)
    else:
        W = rng.standard_normal((m, d))
        a = rng.choice([-1.0, 1.0], size=m)
    return ReluNet(W=W, a=a, X=X, y=y, reduction=reduction)


def relu_train(net: ReluNet, config: MomentumConfig, T: int) -> Trace:
    """
    Heavy-ball training of the first layer on the network's loss.

    Rows t = 0..T hold the loss, the residual norm ||xi_t|| and the fraction
    of (sample, neuron) activation patterns that differ from initialization.
    """
    hb = HeavyBall(config, net.W)
    initial_signs = net.X @ net.W.T >= 0.0
    trace = Trace(columns=["loss", "residual", "pattern_change"], metadata={"eta": config.eta, "beta": config.beta})
    for t in range(T + 1):
        W = hb.w
        xi = net.forward(W) - net.y
        changed = float(np.mean((net.X @ W.T >= 0.0) != initial_signs))
        loss = 0.5 * net.loss_weight * float(xi @ xi)
        trace.append(t, loss=loss, residual=float(np.linalg.norm(xi)), pattern_change=changed)
        if t == T:
            break
        W_next = hb.step(net.gradient(W))
        if not np.all(np.isfinite(W_next)):
            raise DivergenceError("non-finite weights", t + 1)
    trace.metadata["W_final"] = hb.w.copy()
    return trace


# ---------------------------------------------------------------------------
# Deep linear network
# ---------------------------------------------------------------------------


def _orthonormal(rng: np.random.Generator, rows: int, cols: int) -> Vector:
    # QR with R's diagonal made positive so the draw is deterministic
    tall = rows >= cols
    G = rng.standard_normal((rows, cols) if tall else (cols, rows))
    Q, R = np.linalg.qr(G)
    Q = Q * np.sign(np.where(np.diag(R) == 0, 1.0, np.diag(R)))
    return Q if tall else Q.T


@dataclass
class DeepLinearNet:
    """
    N(x) = (1/sqrt(m^{L-1} d_y)) W_L ... W_1 x with W_1 (m x d), W_l (m x m), W_L (d_y x m).
    """

    layers: List[Vector] = field(default_factory=list)

    @classmethod
    def orthogonal(cls, d: int, d_y: int, m: int, depth: int, seed: int = 0) -> "DeepLinearNet":
        """Orthogonal initialization scaled by sqrt(m) (W_1'W_1 = m I, W_L W_L' = m I)."""
        if depth < 2:
            raise ValueError(f"depth must be at least 2, got {depth}")
        if m < max(d, d_y):
            raise ValueError(f"width m={m} must be at least max(d, d_y)={max(d, d_y)}")
        rng = np.random.default_rng(seed)
        scale = math.sqrt(m)
        layers = [scale * _orthonormal(rng, m, d)]
        layers += [scale * _orthonormal(rng, m, m) for _ in range(depth - 2)]
        layers.append(scale * _orthonormal(rng, d_y, m))
        return cls(layers)

    @property
    def depth(self) -> int:
        return len(self.layers)

    @property
    def width(self) -> int:
        return self.layers[0].shape[0]

    @property
    def scale(self) -> float:
        d_y = self.layers[-1].shape[0]
        return 1.0 / math.sqrt(float(self.width) ** (self.depth - 1) * d_y)

    def end_to_end(self, layers: Optional[List[Vector]] = None) -> Vector:
        layers = self.layers if layers is None else layers
        P = layers[0]
        for W in layers[1:]:
            P = W @ P
        return self.scale * P

    def output(self, X: Vector, layers: Optional[List[Vector]] = None) -> Vector:
        return self.end_to_end(layers) @ X

    def gradients(self, X: Vector, Y: Vector, layers: Optional[List[Vector]] = None) -> Tuple[List[Vector], Vector]:
        """Layer gradients of 1/2 ||U - Y||_F^2 and the residual U - Y."""
        layers = self.layers if layers is None else layers
        prefix = [X]
        for W in layers:
            prefix.append(W @ prefix[-1])
        xi = self.scale * prefix[-1] - Y
        grads: List[Vector] = [np.empty(0)] * len(layers)
        back = self.scale * xi
        for l in range(len(layers) - 1, -1, -1):
            grads[l] = back @ prefix[l].T
            back = layers[l].T @ back
        return grads, xi


DEEP_LINEAR_TARGETS = ("initial", "identity")
DEEP_LINEAR_INPUTS = ("spectrum", "gaussian")


def make_deep_linear_problem(
    d: int = 4,
    d_y: int = 4,
    m: int = 16,
    depth: int = 10,
    n: int = 8,
    kappa_x: float = 12.0,
    target_noise: float = 0.1,
    seed: int = 0,
    inputs: str = "spectrum",
    target: str = "initial",
) -> Tuple[DeepLinearNet, Vector, Vector]:
    """
    Build (net, X, Y) with Y = W* X.

    Inputs X (d x n):
        spectrum: squared singular values spread evenly over [1, kappa_x]
        gaussian: i.i.d. N(0, 1) entries (``kappa_x`` is ignored)

    Target W* (``target_noise`` times a Gaussian matrix added to):
        initial: the network's initial end-to-end map, so training starts close to a global minimizer
        identity: I_d, which needs d == d_y

    Raises:
        ValueError: If an option is unknown or the identity target has d != d_y
    """
    if inputs not in DEEP_LINEAR_INPUTS:
        raise ValueError(f"Unknown inputs '{inputs}'. Valid options: {', '.join(DEEP_LINEAR_INPUTS)}")
    if target not in DEEP_LINEAR_TARGETS:
        raise ValueError(f"Unknown target '{target}'. Valid options: {', '.join(DEEP_LINEAR_TARGETS)}")
    if target == "identity" and d != d_y:
        raise ValueError(f"identity target needs d == d_y, got d={d}, d_y={d_y}")
    rng = np.random.default_rng([seed, 1])
    net = DeepLinearNet.orthogonal(d, d_y, m, depth, seed)
    if inputs == "gaussian":
        X = rng.standard_normal((d, n))
    else:
        k = min(d, n)
        U = _orthonormal(rng, d, k)
        V = _orthonormal(rng, n, k)
        s = np.sqrt(np.linspace(kappa_x, 1.0, k))
        X = (U * s) @ V.T
    base = net.end_to_end() if target == "initial" else np.eye(d)
    W_star = base + target_noise * rng.standard_normal((d_y, d))
    return net, X, W_star @ X


def _sigma_sq(X: Vector) -> Tuple[float, float]:
    s = scipy.linalg.svdvals(X)
    s = s[s > 1e-12 * s[0]]
    return float(s[0] ** 2), float(s[-1] ** 2)


def deep_linear_train(
    net: DeepLinearNet,
    config: MomentumConfig,
    X: Any,
    Y: Any,
    T: int,
    floor: float = RESIDUAL_FLOOR,
) -> Trace:
    """
    Heavy-ball training of every layer on 1/2 ||U - Y||_F^2.

    Rows hold ||xi_t||_F, the stacked residual ||(xi_t, xi_{t-1})|| and the
    bound (1 - 1/(4 sqrt kappa))^t 8 sqrt(kappa) ||(xi_0, xi_{-1})||; ``ratio``
    is reported while the bound stays above ``floor`` times the initial value.
    """
    X = np.asarray(X, dtype=np.float64)
    Y = np.asarray(Y, dtype=np.float64)
    sigma_max_sq, sigma_min_sq = _sigma_sq(X)
    kappa = sigma_max_sq / sigma_min_sq
    steppers = [HeavyBall(config, W) for W in net.layers]
    trace = Trace(
        columns=["residual", "stacked", "bound", "ratio"],
        metadata={"kappa": kappa, "eta": config.eta, "beta": config.beta},
    )
    grads, xi = net.gradients(X, Y, [s.w for s in steppers])
    xi_prev = xi
    initial = _stacked(xi, xi)
    for t in range(T + 1):
        stacked = _stacked(xi, xi_prev)
        bound = (1.0 - 1.0 / (4.0 * math.sqrt(kappa))) ** t * 8.0 * math.sqrt(kappa) * initial
        ratio = stacked / bound if bound > floor * initial else None
        trace.append(t, residual=float(np.linalg.norm(xi)), stacked=stacked, bound=bound, ratio=ratio)
        if t == T:
            break
        for stepper, g in zip(steppers, grads):
            stepper.step(g)
        xi_prev = xi
        grads, xi = net.gradients(X, Y, [s.w for s in steppers])
        if not np.all(np.isfinite(xi)):
            raise DivergenceError("non-finite residual", t + 1)
    return trace


# ---------------------------------------------------------------------------
# Cubic-regularized problems
# ---------------------------------------------------------------------------


def make_cubic_objective(A: Any, b: Any, rho: float) -> Objective:
    """f(w) = 1/2 w'Aw + b'w + (rho/3) ||w||^3."""
    A = np.asarray(A, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)

    def hessian(w: Vector) -> Vector:
        norm = float(np.linalg.norm(w))
        extra = norm * np.eye(len(w)) + (np.outer(w, w) / norm if norm > 0 else 0.0)
        return A + rho * extra

    return Objective(
        dim=len(b),
        value_fn=lambda w: 0.5 * float(w @ A @ w) + float(b @ w) + rho / 3.0 * float(np.linalg.norm(w)) ** 3,
        gradient_fn=lambda w: A @ w + b + rho * float(np.linalg.norm(w)) * w,
        hessian_fn=hessian,
        hessian_lipschitz_rho=2.0 * rho,
        name="cubic_regularized",
    )


def make_cubic_problem(
    d: int = 4,
    rho: float = 1.0,
    lam_min: float = -0.2,
    gap: float = 5e-3,
    w_star_norm: float = 1.0,
    seed: int = 0,
) -> Tuple[Vector, Vector, Vector]:
    """
    Random instance (A, b, w*) with w* the global minimizer.

    A = diag(lam_min, lam_min + gap, a_3, ..., a_{d-1}, 1) with the middle
    entries uniform on [lam_min + gap, 1]; w~ = (A + rho ||w*|| I)^(-xi) theta
    with theta ~ N(0, I) and log2(xi) uniform on [-1, 1]; w* = ||w*|| w~/||w~||
    and b = -(A + rho ||w*|| I) w*.
    """
    if d < 3:
        raise ValueError(f"d must be at least 3, got {d}")
    rng = np.random.default_rng(seed)
    middle = rng.uniform(lam_min + gap, 1.0, size=d - 3)
    diag = np.concatenate([[lam_min, lam_min + gap], middle, [1.0]])
    A = np.diag(diag)
    theta = rng.standard_normal(d)
    xi = 2.0 ** rng.uniform(-1.0, 1.0)
    shifted = diag + rho * w_star_norm
    w_tilde = shifted ** (-xi) * theta
    w_star = w_star_norm * w_tilde / np.linalg.norm(w_tilde)
    b = -shifted * w_star
    return A, b, w_star


def cubic_regularized_experiment(
    A: Any,
    b: Any,
    rho: float,
    config: MomentumConfig,
    T: int,
    w_star: Optional[Vector] = None,
) -> Trace:
    """Heavy ball on the cubic-regularized objective; rows add the gap f(w_t) - f(w*) when w* is given."""
    objective = make_cubic_objective(A, b, rho)
    if config.w0 is None:
        config = MomentumConfig(eta=config.eta, beta=config.beta, w0=np.zeros(objective.dim), version=config.version)
    trace = heavy_ball_run(config, objective, T)
    if w_star is not None:
        f_star = objective.value(w_star)
        for row in trace.rows:
            row["gap"] = row["f_value"] - f_star
        trace.columns.append("gap")
        trace.metadata["f_star"] = f_star
    return trace
