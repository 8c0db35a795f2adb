"""
Escaping saddle points with stochastic heavy-ball momentum.

SGD keeps a momentum buffer m_t = beta m_{t-1} + g_t and steps by
eta m_t, except every ``T_thred`` iterations where the step becomes the
boost size r. The module also ships the benchmark objectives (a
two-dimensional toy saddle, phase retrieval and its over-parametrized
variant) and per-iteration diagnostics of how the momentum vector aligns
with gradients and negative curvature.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg

from .oracles import DivergenceError, FenchelGameError, Objective, Trace, Vector

logger = logging.getLogger(__name__)

DEFAULT_T_THRED = 1000
DEFAULT_EPS = 0.02
PARAMETER_C0 = 1.0 / 1152.0


@dataclass(frozen=True)
class SaddleConfig:
    """
    Parameters of SGD with stochastic momentum and periodic step boosts.

    Attributes:
        eta: Regular step size
        beta: Momentum parameter in [0, 1)
        r: Boost step used when t mod T_thred == 0 (default 10 eta); must satisfy r >= eta
        T_thred: Boost period
        T: Last iteration index; steps t = 0..T are taken
        seed: Seed of the component-index stream
        record_every: Trace thinning (the last row is always kept)
        stop_below: Stop once the tracked quantity (distance when given, else f) is at or below this value
        thresholds: Record the first iteration the tracked quantity reaches each value
    """

    eta: float
    beta: float = 0.0
    r: Optional[float] = None
    T_thred: int = DEFAULT_T_THRED
    T: int = 1000
    seed: int = 0
    record_every: int = 1
    stop_below: Optional[float] = None
    thresholds: Tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not self.eta > 0:
            raise ValueError(f"eta must be positive, got {self.eta}")
        if not 0.0 <= self.beta < 1.0:
            raise ValueError(f"beta must lie in [0, 1), got {self.beta}")
        if self.r is not None and self.r < self.eta:
            raise ValueError(f"boost step r={self.r} must be at least eta={self.eta}")
        if self.T_thred < 1:
            raise ValueError(f"T_thred must be at least 1, got {self.T_thred}")
        if self.T < 0:
            raise ValueError(f"T must be nonnegative, got {self.T}")
        if self.record_every < 1:
            raise ValueError(f"record_every must be at least 1, got {self.record_every}")

    @property
    def boost_step(self) -> float:
        return 10.0 * self.eta if self.r is None else self.r

    def step_size(self, t: int) -> float:
        return self.boost_step if t % self.T_thred == 0 else self.eta

    def boosted_steps(self) -> int:
        return self.T // self.T_thred + 1


@dataclass(frozen=True)
class DiagnosticsConfig:
    """
    Settings for the momentum diagnostics.

    ``tau`` and ``k`` select M_t = (prod_{s=1}^{tau-1} G_s)(prod_{s=k}^{tau-1} G_s).
    """

    eps: float = DEFAULT_EPS
    tau: int = 500
    k: int = 1

    def __post_init__(self) -> None:
        if not self.eps > 0:
            raise ValueError(f"eps must be positive, got {self.eps}")
        if self.tau < 2 or not 1 <= self.k <= self.tau - 1:
            raise ValueError(f"need tau >= 2 and 1 <= k <= tau - 1, got tau={self.tau}, k={self.k}")


@dataclass
class DiagnosticsRow:
    """One diagnostics record; ratios are None outside their regime."""

    t: int
    apag_ratio: Optional[float]
    apcg_ratio: Optional[float]
    grace_value: float
    cnc_proxy: float
    apcg_suppressed: bool = False

    def as_dict(self) -> Dict[str, Any]:
        return {
            "apag_ratio": self.apag_ratio,
            "apcg_ratio": self.apcg_ratio,
            "grace_value": self.grace_value,
            "cnc_proxy": self.cnc_proxy,
            "apcg_suppressed": self.apcg_suppressed,
        }


# ---------------------------------------------------------------------------
# Diagnostics
# ---------------------------------------------------------------------------


def _log_factor_sums(evals: Vector, eta: float, beta: float, start: int, stop: int) -> Vector:
    """Sum over s in [start, stop] of log(1 - eta c_s lambda) with c_s = (1 - beta^s)/(1 - beta)."""
    if stop < start:
        return np.zeros_like(evals)
    limit = 1.0 / (1.0 - beta)
    # c_s equals its limit in floating point once beta^s drops below 1e-17
    if beta > 0:
        exact_until = min(stop, max(start, int(math.ceil(math.log(1e-17) / math.log(beta)))))
    else:
        exact_until = start
    s = np.arange(start, exact_until + 1, dtype=np.float64)
    c = (1.0 - beta**s) / (1.0 - beta)
    with np.errstate(divide="ignore"):
        head = np.log(np.maximum(1.0 - eta * np.outer(evals, c), 0.0)).sum(axis=1)
        tail = (stop - exact_until) * np.log(np.maximum(1.0 - eta * limit * evals, 0.0))
    return head + tail


def apcg_psd(evals: Vector, eta: float, beta: float, tau: int) -> bool:
    """True when every G_s = I - eta c_s H for s < tau is PSD."""
    c_max = (1.0 - beta ** (tau - 1)) / (1.0 - beta)
    return bool(1.0 - eta * c_max * float(np.max(evals)) >= -1e-12)


def apcg_matrix(hessian: Any, eta: float, beta: float, tau: int, k: int = 1, normalized: bool = False) -> Vector:
    """
    M = (prod_{s=1}^{tau-1} G_s)(prod_{s=k}^{tau-1} G_s) through the eigendecomposition of the Hessian.

    With ``normalized`` the result is divided by its largest eigenvalue.

    Raises:
        FenchelGameError: If some G_s is not PSD
    """
    evals, evecs = scipy.linalg.eigh(np.asarray(hessian, dtype=np.float64))
    if not apcg_psd(evals, eta, beta, tau):
        raise FenchelGameError(f"G_s is not PSD for eta={eta}, beta={beta}, tau={tau}")
    logs = _log_factor_sums(evals, eta, beta, 1, tau - 1) + _log_factor_sums(evals, eta, beta, k, tau - 1)
    if normalized:
        logs = logs - np.max(logs)
    return (evecs * np.exp(logs)) @ evecs.T


def min_eigenvector(hessian: Any) -> Tuple[float, Vector]:
    """Smallest eigenpair; the vector's first nonzero entry is made positive."""
    evals, evecs = scipy.linalg.eigh(np.asarray(hessian, dtype=np.float64))
    v = evecs[:, 0]
    nonzero = np.flatnonzero(np.abs(v) > 1e-12)
    if len(nonzero) and v[nonzero[0]] < 0:
        v = -v
    return float(evals[0]), v


def diagnostics(
    objective: Objective,
    t: int,
    w: Vector,
    g: Vector,
    m: Vector,
    eta: float,
    beta: float,
    config: Optional[DiagnosticsConfig] = None,
) -> DiagnosticsRow:
    """
    Alignment and curvature measurements of the momentum vector m_t at w_t.

    apag_ratio = <grad, m - g> / ||grad||^2 when ||grad|| >= eps;
    apcg_ratio = <grad, M m> / (eta sigma_max(M) ||grad||^2) when ||grad|| <= eps
    and lambda_min <= -eps; grace_value = (eta <grad, g - m> + eta^2/2 m'Hm) / eta^2;
    cnc_proxy = <m, v_min>^2.
    """
    config = config or DiagnosticsConfig()
    grad = objective.gradient(w)
    H = objective.hessian(w)
    grad_sq = float(grad @ grad)
    grad_norm = math.sqrt(grad_sq)
    lam_min, v_min = min_eigenvector(H)

    apag = float(grad @ (m - g)) / grad_sq if grad_norm >= config.eps and grad_sq > 0 else None

    apcg = None
    suppressed = False
    if grad_norm <= config.eps and lam_min <= -config.eps and grad_sq > 0:
        try:
            M = apcg_matrix(H, eta, beta, config.tau, config.k, normalized=True)
            apcg = float(grad @ M @ m) / (eta * grad_sq)
        except FenchelGameError:
            logger.warning("APCG suppressed at t=%d: step size too large for a PSD product", t)
            suppressed = True

    grace = (eta * float(grad @ (g - m)) + 0.5 * eta**2 * float(m @ H @ m)) / eta**2
    return DiagnosticsRow(
        t=t,
        apag_ratio=apag,
        apcg_ratio=apcg,
        grace_value=grace,
        cnc_proxy=float(m @ v_min) ** 2,
        apcg_suppressed=suppressed,
    )


# ---------------------------------------------------------------------------
# SGD with stochastic momentum
# ---------------------------------------------------------------------------


def sample_indices(seed: int, n: int, count: int) -> Vector:
    """Component indices drawn uniformly with replacement from a Philox stream keyed by ``seed``."""
    rng = np.random.Generator(np.random.Philox(key=seed))
    return rng.integers(n, size=count)


def _gradient_sampler(objective: Objective, config: SaddleConfig) -> Callable[[int, Vector], Vector]:
    if objective.n_components > 0:
        indices = sample_indices(config.seed, objective.n_components, config.T + 1)
        return lambda t, w: objective.component_gradient(int(indices[t]), w)
    if objective.stochastic_gradient_fn is not None:
        return lambda t, w: objective.stochastic_gradient(w, [config.seed, t])
    return lambda t, w: objective.gradient(w)


def _run_row(
    objective: Objective,
    config: SaddleConfig,
    t: int,
    w: Vector,
    g: Vector,
    m: Vector,
    tracked: Optional[float],
    distance: Optional[Callable[[Vector], float]],
    diagnostics_config: Optional[DiagnosticsConfig],
) -> Dict[str, Any]:
    row: Dict[str, Any] = {
        "f_value": objective.value(w),
        "grad_norm": float(np.linalg.norm(objective.gradient(w))),
        "boosted": t % config.T_thred == 0,
    }
    if distance is not None:
        row["dist"] = tracked if tracked is not None else distance(w)
    if diagnostics_config is not None:
        row.update(diagnostics(objective, t, w, g, m, config.eta, config.beta, diagnostics_config).as_dict())
    return row


def cnc_sgd_run(
    objective: Objective,
    config: SaddleConfig,
    w0: Optional[Any] = None,
    distance: Optional[Callable[[Vector], float]] = None,
    diagnostics_config: Optional[DiagnosticsConfig] = None,
    keep_history: bool = False,
) -> Trace:
    """
    Run SGD with stochastic heavy-ball momentum and periodic boosts.

    Rows (every ``record_every`` iterations and the last) hold the
    full-batch f(w_t), ||grad f(w_t)||, whether step t was boosted and,
    with ``distance``, a ``dist`` column. ``diagnostics_config`` adds the
    diagnostics columns. With ``keep_history`` the trace keeps every w_t in
    ``iterates`` and every m_t in ``actions``.

    Steps t = 0..T are all taken, so ``w_final`` is w_{T+1} and
    ``boosted_steps`` is T // T_thred + 1. A run stopped by ``stop_below``
    at iteration t keeps w_t and does not take step t.

    Raises:
        DivergenceError: If an iterate becomes non-finite
    """
    w = np.zeros(objective.point_shape) if w0 is None else np.array(w0, dtype=np.float64)
    m = np.zeros_like(w)
    sampler = _gradient_sampler(objective, config)
    pending = sorted(config.thresholds, reverse=True)
    first_below: Dict[float, int] = {}
    trace = Trace(
        columns=["f_value", "grad_norm", "boosted"] + (["dist"] if distance is not None else []),
        metadata={"eta": config.eta, "beta": config.beta, "r": config.boost_step, "T_thred": config.T_thred},
    )
    logger.info("momentum SGD: eta=%g beta=%g r=%g T=%d", config.eta, config.beta, config.boost_step, config.T)

    tracking = config.stop_below is not None or bool(pending)
    stopped_at = None
    boosts = 0
    for t in range(config.T + 1):
        tracked = None
        if tracking:
            tracked = distance(w) if distance is not None else objective.value(w)
            while pending and tracked <= pending[0]:
                first_below[pending.pop(0)] = t
        stopping = config.stop_below is not None and tracked <= config.stop_below

        g = sampler(t, w)
        m = config.beta * m + g
        if keep_history:
            trace.iterates.append(w.copy())
            trace.actions.append(m.copy())
        if t % config.record_every == 0 or stopping or t == config.T:
            row = _run_row(objective, config, t, w, g, m, tracked, distance, diagnostics_config)
            row["boosted"] = not stopping and row["boosted"]
            trace.append(t, **row)
        if stopping:
            stopped_at = t
            break
        w = w - config.step_size(t) * m
        boosts += int(t % config.T_thred == 0)
        if not np.all(np.isfinite(w)):
            raise DivergenceError("non-finite iterate", t + 1)
        if t == config.T:
            stopped_at = t

    trace.metadata["stopped_at"] = stopped_at
    trace.metadata["boosted_steps"] = boosts
    trace.metadata["first_below"] = first_below
    trace.metadata["w_final"] = w
    return trace


def beta_sweep(
    objective: Objective,
    config: SaddleConfig,
    betas: Sequence[float],
    w0: Optional[Any] = None,
    distance: Optional[Callable[[Vector], float]] = None,
    seeds: Optional[Dict[float, int]] = None,
    max_workers: Optional[int] = None,
) -> Dict[float, Trace]:
    """
    Run ``cnc_sgd_run`` once per momentum value on a worker pool.

    ``seeds`` maps each beta to its index-stream seed (``config.seed`` for
    all when omitted). Results are keyed by beta in input order.
    """

    def run(beta: float) -> Tuple[float, Trace]:
        seed = config.seed if seeds is None else seeds[beta]
        return beta, cnc_sgd_run(objective, replace(config, beta=beta, seed=seed), w0, distance)

    with ThreadPoolExecutor(max_workers=max_workers or max(len(betas), 1)) as pool:
        return dict(pool.map(run, betas))


def sgd_momentum_reference(objective: Objective, config: SaddleConfig, w0: Optional[Any] = None) -> List[Vector]:
    """Plain loop over the same index stream, kept for cross-checks: returns w_0..w_{T+1}."""
    w = np.zeros(objective.point_shape) if w0 is None else np.array(w0, dtype=np.float64)
    m = np.zeros_like(w)
    sampler = _gradient_sampler(objective, config)
    path = [w.copy()]
    for t in range(config.T + 1):
        m = config.beta * m + sampler(t, w)
        w = w - config.step_size(t) * m
        path.append(w.copy())
    return path


# ---------------------------------------------------------------------------
# Benchmark objectives
# ---------------------------------------------------------------------------


def toy_saddle_objective(n: int = 10, seed: int = 0) -> Objective:
    """
    f(w) = (1/n) sum_i 1/2 w'Hw + b_i'w + ||w||_10^10 on R^2.

    H = diag(1, -0.1) and b_i ~ N(0, diag(0.1, 0.001)). The origin sits next
    to the saddle point with f(0) = 0.
    """
    if n < 1:
        raise ValueError(f"n must be at least 1, got {n}")
    rng = np.random.default_rng(seed)
    H = np.diag([1.0, -0.1])
    b = rng.standard_normal((n, 2)) * np.sqrt([0.1, 0.001])
    b_bar = b.mean(axis=0)

    def value(w: Vector) -> float:
        return 0.5 * float(w @ H @ w) + float(b_bar @ w) + float(np.sum(w**10))

    def penalty_grad(w: Vector) -> Vector:
        return 10.0 * w**9

    return Objective(
        dim=2,
        value_fn=value,
        gradient_fn=lambda w: H @ w + b_bar + penalty_grad(w),
        hessian_fn=lambda w: H + np.diag(90.0 * w**8),
        n_components=n,
        component_gradient_fn=lambda i, w: H @ w + b[i] + penalty_grad(w),
        name="toy_saddle",
    )


def _phase_data(n: int, d: int, rng: np.random.Generator) -> Vector:
    return rng.standard_normal((n, d))


def relative_distance(w: Any, w_star: Any) -> float:
    """min(||w - w*||, ||w + w*||) / ||w*||."""
    w = np.asarray(w, dtype=np.float64)
    w_star = np.asarray(w_star, dtype=np.float64)
    return min(float(np.linalg.norm(w - w_star)), float(np.linalg.norm(w + w_star))) / float(np.linalg.norm(w_star))


def phase_retrieval_objective(
    n: int = 200,
    d: int = 10,
    seed: int = 0,
    w_star: Optional[Any] = None,
) -> Tuple[Objective, Vector]:
    """
    f(w) = (1/n) sum_i ((a_i'w)^2 - y_i)^2 with y_i = (a_i'w*)^2.

    a_i ~ N(0, I_d); w* ~ N(0, I_d/d) unless given.

    Returns:
        Tuple of (objective, w*)
    """
    rng = np.random.default_rng(seed)
    A = _phase_data(n, d, rng)
    w_star = rng.standard_normal(d) / math.sqrt(d) if w_star is None else np.asarray(w_star, dtype=np.float64)
    y = (A @ w_star) ** 2

    def value(w: Vector) -> float:
        residual = (A @ w) ** 2 - y
        return float(residual @ residual) / n

    def gradient(w: Vector) -> Vector:
        z = A @ w
        return 4.0 / n * (A.T @ ((z**2 - y) * z))

    def hessian(w: Vector) -> Vector:
        z = A @ w
        return 4.0 / n * (A.T * (3.0 * z**2 - y)) @ A

    def component(i: int, w: Vector) -> Vector:
        z = float(A[i] @ w)
        return 4.0 * (z**2 - y[i]) * z * A[i]

    objective = Objective(
        dim=d,
        value_fn=value,
        gradient_fn=gradient,
        hessian_fn=hessian,
        n_components=n,
        component_gradient_fn=component,
        name="phase_retrieval",
    )
    return objective, w_star


def overparam_distance(W: Any, w_star: Any) -> float:
    """
    ||W - w* q*'|| with q* = W'w* / ||W'w*||.

    q* = 0 when W'w* = 0, so the distance at W = 0 is ||w*||.
    """
    W = np.asarray(W, dtype=np.float64)
    w_star = np.asarray(w_star, dtype=np.float64)
    proj = W.T @ w_star
    norm = float(np.linalg.norm(proj))
    q = proj / norm if norm > 0 else np.zeros_like(proj)
    return float(np.linalg.norm(W - np.outer(w_star, q)))


def overparam_phase_objective(
    K: int,
    d: int = 10,
    n: int = 200,
    seed: int = 0,
    w_star: Optional[Any] = None,
) -> Tuple[Objective, Vector]:
    """
    Over-parametrized phase retrieval over W = [w^(1), ..., w^(K)] (d x K).

    f(W) = (1/(4n)) sum_i (||W'x_i||^2 - y_i)^2 with y_i = (x_i'w*)^2, x_i ~ N(0, I_d)
    and w* = e_1 unless given. For K = 1 this is one quarter of the phase
    retrieval objective built from the same seed and w*.

    Returns:
        Tuple of (objective over d x K matrices, w*)
    """
    if K < 1:
        raise ValueError(f"K must be at least 1, got {K}")
    rng = np.random.default_rng(seed)
    X = _phase_data(n, d, rng)
    if w_star is None:
        w_star = np.zeros(d)
        w_star[0] = 1.0
    w_star = np.asarray(w_star, dtype=np.float64)
    y = (X @ w_star) ** 2

    def residual(W: Vector) -> Vector:
        return np.sum((X @ W) ** 2, axis=1) - y

    def gradient(W: Vector) -> Vector:
        return X.T @ (residual(W)[:, None] * (X @ W)) / n

    return (
        Objective(
            dim=d * K,
            value_fn=lambda W: float(residual(W) @ residual(W)) / (4.0 * n),
            gradient_fn=gradient,
            shape=(d, K),
            name=f"overparam_phase_K{K}",
        ),
        w_star,
    )


def gd_run(
    objective: Objective,
    w0: Any,
    eta: float,
    T: int,
    distance: Optional[Callable[[Vector], float]] = None,
    record_every: int = 1,
) -> Trace:
    """Full-batch gradient descent with rows f_value, grad_norm and optional dist."""
    w = np.array(w0, dtype=np.float64)
    trace = Trace(columns=["f_value", "grad_norm"] + (["dist"] if distance is not None else []))
    for t in range(T + 1):
        grad = objective.gradient(w)
        if t % record_every == 0 or t == T:
            row: Dict[str, Any] = {"f_value": objective.value(w), "grad_norm": float(np.linalg.norm(grad))}
            if distance is not None:
                row["dist"] = distance(w)
            trace.append(t, **row)
        if t == T:
            break
        w = w - eta * grad
        if not np.all(np.isfinite(w)):
            raise DivergenceError("non-finite iterate", t + 1)
    trace.metadata["w_final"] = w
    return trace


def overparam_sweep(
    Ks: Sequence[int] = (1, 2, 3, 5, 10),
    d: int = 10,
    n: int = 200,
    eta: float = 0.01,
    T: int = 2000,
    seed: int = 0,
    init_scale: float = 0.01,
    record_every: int = 10,
) -> Dict[int, Trace]:
    """Full-batch GD on the over-parametrized objective for each width K from W_0 = init_scale N(0, I/d)."""
    traces = {}
    for K in Ks:
        objective, w_star = overparam_phase_objective(K, d, n, seed)
        rng = np.random.default_rng([seed, K])
        W0 = init_scale * rng.standard_normal((d, K)) / math.sqrt(d)
        traces[K] = gd_run(objective, W0, eta, T, lambda W: overparam_distance(W, w_star), record_every)
    return traces


# ---------------------------------------------------------------------------
# Parameter table
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class SaddleParameters:
    """Parameter choices of the escape analysis, evaluated for display."""

    r: float
    eta: float
    F_thred: float
    T_thred: float
    constraints: Dict[str, bool]


def saddle_parameter_table(
    eps: float,
    beta: float,
    delta: float = 0.1,
    gamma: float = 1.0,
    L: float = 1.0,
    c_m: float = 1.0,
    sigma_sq: float = 1.0,
    rho: float = 1.0,
    c_prime: float = 1.0,
    c_h: float = 1.0,
    c: float = 1.0,
) -> SaddleParameters:
    """
    Evaluate r = delta gamma eps^2 c_r, eta = delta^2 gamma^2 eps^5 c_eta,
    F_thred = delta gamma^2 eps^4 c_F and
    T_thred = c (1 - beta)/(eta eps) log(L c_m sigma^2 rho c' c_h / ((1 - beta) delta gamma eps))
    at the largest admissible constants, together with the constraints on beta.
    """
    if not 0 < eps <= 1:
        raise ValueError(f"eps must lie in (0, 1], got {eps}")
    if not 0 <= beta < 1:
        raise ValueError(f"beta must lie in [0, 1), got {beta}")
    c_r = PARAMETER_C0 / (c_m**3 * rho * L * sigma_sq * c_h)
    c_eta = (PARAMETER_C0 / 24.0) / (c_m**5 * rho * L**2 * sigma_sq * c_prime * c_h)
    c_F = (PARAMETER_C0 / 576.0) / (c_m**4 * rho**2 * L * sigma_sq**2 * c_h)
    r = delta * gamma * eps**2 * c_r
    eta = delta**2 * gamma**2 * eps**5 * c_eta
    F_thred = delta * gamma**2 * eps**4 * c_F
    log_arg = L * c_m * sigma_sq * rho * c_prime * c_h / ((1.0 - beta) * delta * gamma * eps)
    T_thred = c * (1.0 - beta) / (eta * eps) * math.log(log_arg)
    one_minus = 1.0 - beta
    constraints = {
        "L(1-beta)^3 > 1": L * one_minus**3 > 1,
        "sigma^2(1-beta)^3 > 1": sigma_sq * one_minus**3 > 1,
        "c'(1-beta)^2 > 1": c_prime * one_minus**2 > 1,
        "eta <= (1-beta)/L": eta <= one_minus / L,
        "eta <= (1-beta)/eps": eta <= one_minus / eps,
        "T_thred >= 1 + 2beta/(1-beta)": T_thred >= 1 + 2 * beta / one_minus,
        "eta <= r/sqrt(T_thred)": eta <= r / math.sqrt(T_thred),
        "F_thred <= eps^2 r/4": F_thred <= eps**2 * r / 4,
    }
    return SaddleParameters(r=r, eta=eta, F_thred=F_thred, T_thred=T_thred, constraints=constraints)
