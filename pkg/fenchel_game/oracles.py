"""
Objective oracles, feasible sets, Bregman geometries and weight schedules.

Everything else in the package is written against the types defined here:
an ``Objective`` exposes value/gradient access together with its declared
constants, a ``FeasibleSet`` exposes a linear minimization oracle and
(optionally) projection and gauge data, and a ``Trace`` collects the
per-iteration records that the experiment harness writes to disk.
"""

import logging
import math
from dataclasses import dataclass, field, replace
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import scipy.linalg
import scipy.optimize
import scipy.special
from numpy.typing import NDArray

logger = logging.getLogger(__name__)

Vector = NDArray[np.float64]
SeedLike = Union[int, Sequence[int]]

FEASIBILITY_TOL = 1e-9
ADAPTIVE_WEIGHT_CAP = 1e12
ADAPTIVE_NORM_FLOOR = 1e-6


class FenchelGameError(Exception):
    """Exception raised when an optimization routine cannot produce a well-defined result."""


class DivergenceError(FenchelGameError):
    """Exception raised when an iterate becomes non-finite or an inner solve fails."""

    def __init__(self, message: str, iteration: int):
        super().__init__(f"{message} (iteration {iteration})")
        self.iteration = iteration


def _as_array(x: Any) -> Vector:
    return np.asarray(x, dtype=np.float64)


def _inner(a: Vector, b: Vector) -> float:
    return float(np.vdot(a, b))


# ---------------------------------------------------------------------------
# Objectives
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class QuadraticData:
    """Coefficients of f(w) = 1/2 w'Gw + b'w + offset."""

    Gamma: Vector
    b: Vector
    offset: float = 0.0


@dataclass
class Objective:
    """
    Value and gradient access to a function together with its declared constants.

    Attributes:
        dim: Number of scalar variables (``d1 * d2`` for matrix objectives)
        value_fn: Callable returning f(w)
        gradient_fn: Callable returning a gradient (subgradient for non-smooth f)
        smoothness_L: Lipschitz constant of the gradient, None when f is non-smooth
        strong_convexity_mu: Strong convexity modulus (0 when not strongly convex)
        hessian_lipschitz_rho: Lipschitz constant of the Hessian, when known
        hessian_fn: Callable returning the Hessian matrix (diagnostics only)
        stochastic_gradient_fn: Callable ``(w, seed) -> gradient sample``
        n_components: Number of summands for finite-sum objectives f = (1/n) sum f_i
        component_gradient_fn: Callable ``(i, w) -> grad f_i(w)``
        lipschitz_M: Bound on the (sub)gradient norm over the region of interest
        shape: Matrix shape for objectives over matrices
        quadratic: Coefficients when f is a quadratic (enables closed-form conjugates)
        conjugate_fn: Closed-form Fenchel conjugate, when available
        name: Label used in traces and logs
    """

    dim: int
    value_fn: Callable[[Vector], float]
    gradient_fn: Callable[[Vector], Vector]
    smoothness_L: Optional[float] = None
    strong_convexity_mu: float = 0.0
    hessian_lipschitz_rho: Optional[float] = None
    hessian_fn: Optional[Callable[[Vector], Vector]] = None
    stochastic_gradient_fn: Optional[Callable[[Vector, SeedLike], Vector]] = None
    n_components: int = 0
    component_gradient_fn: Optional[Callable[[int, Vector], Vector]] = None
    lipschitz_M: Optional[float] = None
    shape: Optional[Tuple[int, int]] = None
    quadratic: Optional[QuadraticData] = None
    conjugate_fn: Optional[Callable[[Vector], float]] = None
    name: str = "objective"

    def __post_init__(self) -> None:
        if self.dim <= 0:
            raise ValueError(f"dim must be positive, got {self.dim}")
        if self.strong_convexity_mu < 0:
            raise ValueError(f"strong_convexity_mu must be nonnegative, got {self.strong_convexity_mu}")

    @property
    def smooth(self) -> bool:
        return self.smoothness_L is not None

    @property
    def point_shape(self) -> Tuple[int, ...]:
        return self.shape if self.shape is not None else (self.dim,)

    def value(self, w: Vector) -> float:
        return float(self.value_fn(_as_array(w)))

    def gradient(self, w: Vector) -> Vector:
        return _as_array(self.gradient_fn(_as_array(w)))

    def hessian(self, w: Vector) -> Vector:
        if self.hessian_fn is None:
            raise FenchelGameError(f"objective '{self.name}' does not expose a Hessian")
        return _as_array(self.hessian_fn(_as_array(w)))

    def component_gradient(self, i: int, w: Vector) -> Vector:
        if self.component_gradient_fn is None:
            raise FenchelGameError(f"objective '{self.name}' is not a finite sum")
        return _as_array(self.component_gradient_fn(i, _as_array(w)))

    def stochastic_gradient(self, w: Vector, seed: SeedLike) -> Vector:
        """
        Draw a stochastic gradient at w.

        The draw is a pure function of ``seed``; finite sums sample one
        component uniformly.
        """
        if self.stochastic_gradient_fn is not None:
            return _as_array(self.stochastic_gradient_fn(_as_array(w), seed))
        if self.n_components > 0:
            i = int(np.random.default_rng(seed).integers(self.n_components))
            return self.component_gradient(i, w)
        raise FenchelGameError(f"objective '{self.name}' has no stochastic gradient oracle")

    def fenchel_young(self, point: Vector, grad: Optional[Vector] = None) -> float:
        """Return f*(g) at g = grad f(point) through the Fenchel-Young equality."""
        g = self.gradient(point) if grad is None else grad
        return _inner(point, g) - self.value(point)

    def conjugate(self, y: Vector) -> float:
        """
        Evaluate the Fenchel conjugate f*(y) = sup_w <w, y> - f(w).

        Uses the quadratic closed form when available, a declared closed form
        otherwise, and an L-BFGS-B inner maximization as the last resort.
        Returns ``inf`` outside the domain of f*.
        """
        y = _as_array(y)
        if self.quadratic is not None:
            return _quadratic_conjugate(self.quadratic, y)
        if self.conjugate_fn is not None:
            return float(self.conjugate_fn(y))

        shape = self.point_shape

        def neg_objective(w_flat: Vector) -> Tuple[float, Vector]:
            w = w_flat.reshape(shape)
            val = self.value(w) - _inner(w, y)
            grad = (self.gradient(w) - y).ravel()
            return val, grad

        result = scipy.optimize.minimize(
            neg_objective,
            np.zeros(self.dim),
            jac=True,
            method="L-BFGS-B",
            options={"gtol": 1e-10, "maxiter": 10_000},
        )
        if not np.isfinite(result.fun) or result.fun < -1e12:
            return math.inf
        if not result.success:
            logger.warning("numeric conjugate of '%s' did not converge: %s", self.name, result.message)
        return float(-result.fun)

    def shifted(self, mu: float, center: Vector) -> "Objective":
        """Return f(w) - (mu/2)||w - center||^2 with constants adjusted."""
        center = _as_array(center)
        if self.smoothness_L is not None and mu > self.smoothness_L + 1e-12:
            raise ValueError(f"shift mu={mu} exceeds smoothness L={self.smoothness_L}")
        quadratic = None
        if self.quadratic is not None:
            q = self.quadratic
            quadratic = QuadraticData(
                Gamma=q.Gamma - mu * np.eye(q.Gamma.shape[0]),
                b=q.b + mu * center,
                offset=q.offset - 0.5 * mu * _inner(center, center),
            )
        base = self
        return replace(
            self,
            value_fn=lambda w: base.value(w) - 0.5 * mu * _inner(w - center, w - center),
            gradient_fn=lambda w: base.gradient(w) - mu * (w - center),
            smoothness_L=None if self.smoothness_L is None else max(self.smoothness_L - mu, 0.0),
            strong_convexity_mu=max(self.strong_convexity_mu - mu, 0.0),
            hessian_fn=None,
            stochastic_gradient_fn=None,
            n_components=0,
            component_gradient_fn=None,
            quadratic=quadratic,
            conjugate_fn=None,
            name=f"{self.name}-shifted",
        )


def _quadratic_conjugate(q: QuadraticData, y: Vector) -> float:
    # f*(y) = 1/2 (y-b)' G^+ (y-b) - offset when y-b lies in range(G), else +inf
    r = y - q.b
    pinv = np.linalg.pinv(q.Gamma, rcond=1e-12, hermitian=True)
    w = pinv @ r
    residual = q.Gamma @ w - r
    if np.linalg.norm(residual) > 1e-8 * (1.0 + np.linalg.norm(r)):
        return math.inf
    if np.min(np.linalg.eigvalsh(q.Gamma)) < -1e-12:
        return math.inf
    return 0.5 * float(r @ w) - q.offset


def make_quadratic(Gamma: Any, b: Any = None, offset: float = 0.0, name: str = "quadratic") -> Objective:
    """
    Build f(w) = 1/2 w'Gw + b'w + offset.

    Args:
        Gamma: Symmetric square matrix
        b: Linear term (zeros when omitted)
        offset: Constant term
        name: Label for the objective

    Returns:
        Objective with mu = max(lambda_min, 0) and L = spectral norm of Gamma

    Raises:
        ValueError: If Gamma is not square or is asymmetric beyond 1e-10
    """
    Gamma = _as_array(Gamma)
    if Gamma.ndim != 2 or Gamma.shape[0] != Gamma.shape[1]:
        raise ValueError(f"Gamma must be a square matrix, got shape {Gamma.shape}")
    asymmetry = float(np.max(np.abs(Gamma - Gamma.T))) if Gamma.size else 0.0
    if asymmetry > 1e-10:
        raise ValueError(f"Gamma must be symmetric, max asymmetry {asymmetry:.3e}")
    d = Gamma.shape[0]
    b = np.zeros(d) if b is None else _as_array(b)
    if b.shape != (d,):
        raise ValueError(f"b must have shape ({d},), got {b.shape}")

    eigvals = np.linalg.eigvalsh(Gamma)
    data = QuadraticData(Gamma=Gamma.copy(), b=b.copy(), offset=float(offset))
    return Objective(
        dim=d,
        value_fn=lambda w: 0.5 * float(w @ Gamma @ w) + float(b @ w) + offset,
        gradient_fn=lambda w: Gamma @ w + b,
        smoothness_L=float(np.max(np.abs(eigvals))),
        strong_convexity_mu=max(float(eigvals[0]), 0.0),
        hessian_lipschitz_rho=0.0,
        hessian_fn=lambda w: Gamma,
        quadratic=data,
        name=name,
    )


def make_linear(c: Any, name: str = "linear") -> Objective:
    """Build f(w) = <c, w>."""
    c = _as_array(c)

    def conjugate(y: Vector) -> float:
        return 0.0 if np.allclose(y, c, rtol=0.0, atol=1e-12) else math.inf

    return Objective(
        dim=c.size,
        value_fn=lambda w: _inner(c, w),
        gradient_fn=lambda w: c.copy(),
        smoothness_L=0.0,
        lipschitz_M=float(np.linalg.norm(c)),
        conjugate_fn=conjugate,
        name=name,
    )


def make_l1_distance(c: Any, name: str = "l1_distance") -> Objective:
    """Build the non-smooth f(w) = ||w - c||_1 with subgradient sign(w - c), sign(0) = 0."""
    c = _as_array(c)

    def conjugate(y: Vector) -> float:
        return _inner(c, y) if np.max(np.abs(y)) <= 1.0 + 1e-12 else math.inf

    return Objective(
        dim=c.size,
        value_fn=lambda w: float(np.sum(np.abs(w - c))),
        gradient_fn=lambda w: np.sign(w - c),
        lipschitz_M=math.sqrt(c.size),
        conjugate_fn=conjugate,
        name=name,
    )


def make_l2_distance(c: Any, name: str = "l2_distance") -> Objective:
    """Build the non-smooth f(w) = ||w - c||_2 (subgradient 0 at w = c)."""
    c = _as_array(c)

    def gradient(w: Vector) -> Vector:
        diff = w - c
        norm = np.linalg.norm(diff)
        return diff / norm if norm > 0 else np.zeros_like(diff)

    def conjugate(y: Vector) -> float:
        return _inner(c, y) if np.linalg.norm(y) <= 1.0 + 1e-12 else math.inf

    return Objective(
        dim=c.size,
        value_fn=lambda w: float(np.linalg.norm(w - c)),
        gradient_fn=gradient,
        lipschitz_M=1.0,
        conjugate_fn=conjugate,
        name=name,
    )


def make_least_squares(A: Any, y: Any, name: str = "least_squares") -> Objective:
    """
    Build the finite sum f(w) = (1/n) sum_i 1/2 (a_i'w - y_i)^2.

    Component gradients are grad f_i(w) = a_i (a_i'w - y_i).
    """
    A = _as_array(A)
    y = _as_array(y)
    n = A.shape[0]
    if y.shape != (n,):
        raise ValueError(f"y must have shape ({n},), got {y.shape}")
    base = make_quadratic(A.T @ A / n, -A.T @ y / n, float(y @ y) / (2 * n), name=name)
    return replace(
        base,
        n_components=n,
        component_gradient_fn=lambda i, w: A[i] * (A[i] @ w - y[i]),
    )


def make_matrix_completion(target: Any, mask: Any, name: str = "matrix_completion") -> Objective:
    """Build f(W) = 1/2 ||P_mask(W - target)||_F^2 over d1 x d2 matrices (L = 1)."""
    target = _as_array(target)
    mask = np.asarray(mask, dtype=bool)
    if target.ndim != 2 or mask.shape != target.shape:
        raise ValueError(f"target and mask must be matching matrices, got {target.shape} and {mask.shape}")
    weights = mask.astype(np.float64)

    def gradient(W: Vector) -> Vector:
        return weights * (W - target)

    return Objective(
        dim=target.size,
        value_fn=lambda W: 0.5 * float(np.sum((weights * (W - target)) ** 2)),
        gradient_fn=gradient,
        smoothness_L=1.0,
        shape=target.shape,
        name=name,
    )


def gradient_check(
    objective: Objective,
    n_points: int = 100,
    seed: SeedLike = 0,
    rtol: float = 1e-5,
    scale: float = 1.0,
    step: float = 1e-6,
) -> Tuple[bool, float]:
    """
    Compare the gradient oracle against central finite differences.

    Args:
        objective: Objective to check
        n_points: Number of random Gaussian points
        seed: Seed for the point generator
        rtol: Relative tolerance on the gradient norm
        scale: Standard deviation of the random points
        step: Finite-difference step

    Returns:
        Tuple of (all points passed, worst relative error)
    """
    rng = np.random.default_rng(seed)
    shape = objective.point_shape
    worst = 0.0
    for _ in range(n_points):
        w = scale * rng.standard_normal(shape)
        grad = objective.gradient(w).ravel()
        fd = np.empty(objective.dim)
        for k in range(objective.dim):
            e = np.zeros(objective.dim)
            e[k] = step
            e = e.reshape(shape)
            fd[k] = (objective.value(w + e) - objective.value(w - e)) / (2 * step)
        err = float(np.linalg.norm(grad - fd)) / max(float(np.linalg.norm(grad)), 1.0)
        worst = max(worst, err)
    return worst <= rtol, worst


# ---------------------------------------------------------------------------
# Composite terms
# ---------------------------------------------------------------------------


def prox_l1(v: Any, lam: float) -> Vector:
    """
    Soft-threshold v componentwise: sign(v_i) * max(|v_i| - lam, 0).

    Raises:
        ValueError: If lam is negative
    """
    if lam < 0:
        raise ValueError(f"lam must be nonnegative, got {lam}")
    v = _as_array(v)
    return np.sign(v) * np.maximum(np.abs(v) - lam, 0.0)


@dataclass(frozen=True)
class L1Penalty:
    """psi(x) = lam * ||x||_1."""

    lam: float

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError(f"lam must be nonnegative, got {self.lam}")

    def value(self, x: Vector) -> float:
        return self.lam * float(np.sum(np.abs(x)))

    def prox(self, v: Vector, step: float) -> Vector:
        return prox_l1(v, step * self.lam)

    def subgradient(self, x: Vector) -> Vector:
        return self.lam * np.sign(x)


@dataclass(frozen=True)
class QuadraticTerm:
    """psi(x) = (mu/2) ||x - center||^2; a zero center when omitted."""

    mu: float
    center: Optional[Vector] = None

    def __post_init__(self) -> None:
        if self.mu < 0:
            raise ValueError(f"mu must be nonnegative, got {self.mu}")

    def _center(self, x: Vector) -> Vector:
        return np.zeros_like(x) if self.center is None else _as_array(self.center)

    def value(self, x: Vector) -> float:
        diff = x - self._center(x)
        return 0.5 * self.mu * _inner(diff, diff)

    def prox(self, v: Vector, step: float) -> Vector:
        return (v + step * self.mu * self._center(v)) / (1.0 + step * self.mu)

    def subgradient(self, x: Vector) -> Vector:
        return self.mu * (x - self._center(x))


CompositeTerm = Union[L1Penalty, QuadraticTerm]


# ---------------------------------------------------------------------------
# Feasible sets
# ---------------------------------------------------------------------------


class FeasibleSet:
    """
    Base class for feasible sets.

    Subclasses implement ``lmo`` and ``contains``; projection and gauge data
    are optional and raise ``FenchelGameError`` when a set does not expose them.
    """

    name = "set"
    bounded = True
    has_gauge = False
    # prox of an l1 penalty followed by projection is exact for radial sets
    radial = False
    set_strong_convexity_lambda = 0.0
    gauge_sq_strong_convexity = 0.0

    def __init__(self, dim: int):
        if dim <= 0:
            raise ValueError(f"dim must be positive, got {dim}")
        self.dim = dim

    @property
    def point_shape(self) -> Tuple[int, ...]:
        return (self.dim,)

    @property
    def diameter_sq_D(self) -> float:
        raise NotImplementedError

    def lmo(self, v: Vector) -> Vector:
        raise NotImplementedError

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        raise NotImplementedError

    def project(self, x: Vector) -> Vector:
        raise FenchelGameError(f"{self.name} does not expose a projection")

    def gauge(self, x: Vector) -> float:
        raise FenchelGameError(f"{self.name} does not expose a gauge")

    def canonical_point(self) -> Vector:
        return np.zeros(self.point_shape)

    def prox(self, v: Vector, lam: float, psi: Optional[CompositeTerm] = None) -> Vector:
        """
        Return argmin_{x in K} psi(x) + (1/(2 lam)) ||x - v||^2.

        Exact for isotropic quadratic psi on any projectable set and for an
        l1 penalty on radial sets (Euclidean balls, the whole space).
        """
        v = _as_array(v)
        if psi is None or lam == 0:
            return self.project(v)
        if isinstance(psi, QuadraticTerm) or self.radial:
            return self.project(psi.prox(v, lam))
        raise FenchelGameError(f"{self.name} has no closed-form prox for {type(psi).__name__}")

    def random_point(self, rng: np.random.Generator) -> Vector:
        """Sample a feasible point (used by property checks)."""
        raise NotImplementedError


def _check_radius(radius: float) -> float:
    if radius <= 0:
        raise ValueError(f"radius must be positive, got {radius}")
    return float(radius)


def _first_axis_point(shape: Tuple[int, ...], value: float) -> Vector:
    point = np.zeros(shape)
    point.flat[0] = value
    return point


class L2Ball(FeasibleSet):
    """Euclidean ball {x : ||x||_2 <= radius}; a (1/radius)-strongly convex set."""

    name = "l2_ball"
    has_gauge = True
    radial = True

    def __init__(self, dim: int, radius: float = 1.0):
        super().__init__(dim)
        self.radius = _check_radius(radius)
        self.set_strong_convexity_lambda = 1.0 / self.radius
        self.gauge_sq_strong_convexity = 2.0 / self.radius**2

    @property
    def diameter_sq_D(self) -> float:
        return (2.0 * self.radius) ** 2

    def lmo(self, v: Vector) -> Vector:
        v = _as_array(v)
        norm = float(np.linalg.norm(v))
        if norm == 0.0:
            return _first_axis_point(v.shape, -self.radius)
        return -self.radius * v / norm

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        return float(np.linalg.norm(x)) <= self.radius + tol

    def project(self, x: Vector) -> Vector:
        x = _as_array(x)
        norm = float(np.linalg.norm(x))
        if norm <= self.radius:
            return x.copy()
        return x * (self.radius / norm)

    def gauge(self, x: Vector) -> float:
        return float(np.linalg.norm(x)) / self.radius

    def random_point(self, rng: np.random.Generator) -> Vector:
        direction = rng.standard_normal(self.dim)
        direction /= np.linalg.norm(direction)
        return self.radius * rng.uniform() ** (1.0 / self.dim) * direction


def _project_simplex(v: Vector, total: float = 1.0) -> Vector:
    # sort-based projection onto {x >= 0, sum x = total}
    u = np.sort(v)[::-1]
    cssv = np.cumsum(u) - total
    idx = np.arange(1, v.size + 1)
    rho = int(np.nonzero(u - cssv / idx > 0)[0][-1])
    theta = cssv[rho] / (rho + 1.0)
    return np.maximum(v - theta, 0.0)


class L1Ball(FeasibleSet):
    """l1 ball {x : ||x||_1 <= radius}."""

    name = "l1_ball"
    has_gauge = True

    def __init__(self, dim: int, radius: float = 1.0):
        super().__init__(dim)
        self.radius = _check_radius(radius)

    @property
    def diameter_sq_D(self) -> float:
        return (2.0 * self.radius) ** 2

    def lmo(self, v: Vector) -> Vector:
        v = _as_array(v)
        i = int(np.argmax(np.abs(v)))
        if v[i] == 0.0:
            return _first_axis_point(v.shape, -self.radius)
        x = np.zeros_like(v)
        x[i] = -self.radius * np.sign(v[i])
        return x

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        return float(np.sum(np.abs(x))) <= self.radius + tol

    def project(self, x: Vector) -> Vector:
        x = _as_array(x)
        if float(np.sum(np.abs(x))) <= self.radius:
            return x.copy()
        return np.sign(x) * _project_simplex(np.abs(x), self.radius)

    def gauge(self, x: Vector) -> float:
        return float(np.sum(np.abs(x))) / self.radius

    def random_point(self, rng: np.random.Generator) -> Vector:
        weights = rng.dirichlet(np.ones(self.dim + 1))[: self.dim]
        return self.radius * weights * rng.choice([-1.0, 1.0], size=self.dim)


class Simplex(FeasibleSet):
    """Probability simplex {x >= 0 : sum x = 1}."""

    name = "simplex"

    @property
    def diameter_sq_D(self) -> float:
        return 2.0

    def lmo(self, v: Vector) -> Vector:
        v = _as_array(v)
        x = np.zeros_like(v)
        x[int(np.argmin(v))] = 1.0
        return x

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        x = _as_array(x)
        return bool(np.all(x >= -tol)) and abs(float(np.sum(x)) - 1.0) <= tol

    def project(self, x: Vector) -> Vector:
        return _project_simplex(_as_array(x))

    def canonical_point(self) -> Vector:
        return np.full(self.dim, 1.0 / self.dim)

    def random_point(self, rng: np.random.Generator) -> Vector:
        return rng.dirichlet(np.ones(self.dim))


class LpBall(FeasibleSet):
    """
    l_p ball {x : ||x||_p <= radius} for p in (1, 2].

    A strongly convex set whose squared gauge is 2(p-1)/radius^2 strongly
    convex in the Euclidean norm. No projection is exposed; the LMO is the
    dual-norm maximizer.
    """

    name = "lp_ball"
    has_gauge = True

    def __init__(self, dim: int, p: float, radius: float = 1.0):
        super().__init__(dim)
        if not 1.0 < p <= 2.0:
            raise ValueError(f"p must lie in (1, 2], got {p}")
        self.p = float(p)
        self.q = self.p / (self.p - 1.0)
        self.radius = _check_radius(radius)
        self.set_strong_convexity_lambda = (self.p - 1.0) * dim ** (0.5 - 1.0 / self.p) / self.radius
        self.gauge_sq_strong_convexity = 2.0 * (self.p - 1.0) / self.radius**2

    @property
    def diameter_sq_D(self) -> float:
        return (2.0 * self.radius) ** 2

    def lmo(self, v: Vector) -> Vector:
        v = _as_array(v)
        norm_q = float(np.linalg.norm(v, ord=self.q))
        if norm_q == 0.0:
            return _first_axis_point(v.shape, -self.radius)
        return -self.radius * np.sign(v) * np.abs(v) ** (self.q - 1.0) / norm_q ** (self.q - 1.0)

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        return float(np.linalg.norm(x, ord=self.p)) <= self.radius + tol

    def gauge(self, x: Vector) -> float:
        return float(np.linalg.norm(x, ord=self.p)) / self.radius

    def random_point(self, rng: np.random.Generator) -> Vector:
        direction = rng.standard_normal(self.dim)
        direction /= np.linalg.norm(direction, ord=self.p)
        return self.radius * rng.uniform() ** (1.0 / self.dim) * direction


class NuclearBall(FeasibleSet):
    """Nuclear-norm ball {X : ||X||_* <= radius} over d1 x d2 matrices."""

    name = "nuclear_ball"
    has_gauge = True

    def __init__(self, shape: Tuple[int, int], radius: float = 1.0):
        d1, d2 = shape
        super().__init__(d1 * d2)
        self.shape = (int(d1), int(d2))
        self.radius = _check_radius(radius)

    @property
    def point_shape(self) -> Tuple[int, ...]:
        return self.shape

    @property
    def diameter_sq_D(self) -> float:
        return (2.0 * self.radius) ** 2

    def lmo(self, v: Vector) -> Vector:
        G = _as_array(v).reshape(self.shape)
        U, s, Vt = scipy.linalg.svd(G)
        if s[0] == 0.0:
            return _first_axis_point(self.shape, -self.radius)
        return -self.radius * np.outer(U[:, 0], Vt[0])

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        return nuclear_norm(x) <= self.radius + tol

    def project(self, x: Vector) -> Vector:
        X = _as_array(x).reshape(self.shape)
        U, s, Vt = scipy.linalg.svd(X, full_matrices=False)
        if float(np.sum(s)) <= self.radius:
            return X.copy()
        s = _project_simplex(s, self.radius)
        return (U * s) @ Vt

    def gauge(self, x: Vector) -> float:
        return nuclear_norm(x) / self.radius

    def random_point(self, rng: np.random.Generator) -> Vector:
        X = rng.standard_normal(self.shape)
        return self.radius * rng.uniform() * X / nuclear_norm(X)


def nuclear_norm(x: Vector) -> float:
    return float(np.sum(scipy.linalg.svdvals(_as_array(x))))


class Unconstrained(FeasibleSet):
    """
    The whole space, paired with a comparator ball of radius ``comparator_radius``.

    Projection is the identity. The LMO answers over the comparator ball so
    that regret and gap reports stay finite; those reports depend on the
    chosen radius.
    """

    name = "unconstrained"
    bounded = False
    radial = True

    def __init__(self, dim: int, comparator_radius: float = 1.0):
        super().__init__(dim)
        self.comparator_radius = _check_radius(comparator_radius)
        self._comparator = L2Ball(dim, self.comparator_radius)

    @property
    def diameter_sq_D(self) -> float:
        return (2.0 * self.comparator_radius) ** 2

    def lmo(self, v: Vector) -> Vector:
        return self._comparator.lmo(v)

    def contains(self, x: Vector, tol: float = FEASIBILITY_TOL) -> bool:
        return bool(np.all(np.isfinite(x)))

    def project(self, x: Vector) -> Vector:
        return _as_array(x).copy()

    def random_point(self, rng: np.random.Generator) -> Vector:
        return self._comparator.random_point(rng)


def lmo(decision_set: FeasibleSet, v: Any) -> Vector:
    """
    Linear minimization oracle: argmin over the set of <x, v>.

    Raises:
        ValueError: If v does not match the set's dimension
    """
    v = _as_array(v)
    if v.size != decision_set.dim:
        raise ValueError(f"v has {v.size} entries, set has dimension {decision_set.dim}")
    return decision_set.lmo(v.reshape(decision_set.point_shape))


def gauge_eval(decision_set: FeasibleSet, x: Any) -> float:
    """
    Evaluate the gauge inf{c >= 0 : x/c in K}.

    Returns ``inf`` when x lies outside the cone hull of the set.

    Raises:
        FenchelGameError: If the set does not expose a gauge
    """
    if not decision_set.has_gauge:
        raise FenchelGameError(f"{decision_set.name} does not expose a gauge")
    value = decision_set.gauge(_as_array(x))
    return value if math.isfinite(value) else math.inf


def minimize_over_set(
    fun: Callable[[Vector], float],
    grad: Callable[[Vector], Vector],
    decision_set: FeasibleSet,
    x0: Vector,
    step: float,
    tol: float = 1e-10,
    max_iter: int = 10_000,
) -> Tuple[Vector, float]:
    """Projected gradient descent; returns (minimizer, minimum value)."""
    x = decision_set.project(_as_array(x0))
    for _ in range(max_iter):
        x_next = decision_set.project(x - step * grad(x))
        if np.linalg.norm(x_next - x) <= tol * max(1.0, float(np.linalg.norm(x))):
            x = x_next
            break
        x = x_next
    return x, float(fun(x))


# ---------------------------------------------------------------------------
# Bregman geometry
# ---------------------------------------------------------------------------


class BregmanGeometry:
    """Distance-generating function phi with Bregman divergence V_c(x)."""

    strong_convexity_beta = 1.0
    smoothness = math.inf
    differentiable = True

    def phi(self, x: Vector) -> float:
        raise NotImplementedError

    def grad_phi(self, x: Vector) -> Vector:
        raise NotImplementedError

    def mirror(self, theta: Vector, decision_set: Optional[FeasibleSet] = None) -> Vector:
        """Return argmin_z phi(z) - <theta, z> over the set."""
        raise NotImplementedError

    def divergence(self, c: Vector, x: Vector) -> float:
        return self.phi(x) - _inner(self.grad_phi(c), x - c) - self.phi(c)


class SquaredEuclidean(BregmanGeometry):
    """phi(x) = 1/2 ||x - center||^2."""

    smoothness = 1.0

    def __init__(self, center: Optional[Vector] = None):
        self.center = None if center is None else _as_array(center)

    def _offset(self, x: Vector) -> Vector:
        return x if self.center is None else x - self.center

    def phi(self, x: Vector) -> float:
        diff = self._offset(_as_array(x))
        return 0.5 * _inner(diff, diff)

    def grad_phi(self, x: Vector) -> Vector:
        return self._offset(_as_array(x))

    def mirror(self, theta: Vector, decision_set: Optional[FeasibleSet] = None) -> Vector:
        point = _as_array(theta) if self.center is None else self.center + theta
        return point if decision_set is None else decision_set.project(point)

    def divergence(self, c: Vector, x: Vector) -> float:
        diff = _as_array(x) - _as_array(c)
        return 0.5 * _inner(diff, diff)


class NegativeEntropy(BregmanGeometry):
    """phi(x) = sum x_i log x_i on the simplex; the mirror map is the softmax."""

    def phi(self, x: Vector) -> float:
        x = _as_array(x)
        return float(np.sum(scipy.special.xlogy(x, x)))

    def grad_phi(self, x: Vector) -> Vector:
        return 1.0 + np.log(_as_array(x))

    def mirror(self, theta: Vector, decision_set: Optional[FeasibleSet] = None) -> Vector:
        if not isinstance(decision_set, Simplex):
            raise FenchelGameError("negative entropy geometry is defined on the simplex only")
        return scipy.special.softmax(_as_array(theta))


# ---------------------------------------------------------------------------
# Weight schedules
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class WeightSchedule:
    """
    Round weights alpha_t and their cumulative sums A_t.

    Kinds: ``uniform`` (alpha_t = 1), ``linear`` (alpha_t = t), ``exponential``
    (alpha_1 = first, alpha_t/A_t = theta for t >= 2), ``custom`` (explicit
    sequence) and ``adaptive`` (alpha_t = 1/||grad||^2, set by the caller
    each round through ``adaptive_weight``).
    """

    kind: str = "uniform"
    theta: float = 0.0
    first: float = 1.0
    sequence: Tuple[float, ...] = ()
    cap: float = ADAPTIVE_WEIGHT_CAP

    KINDS = ("uniform", "linear", "exponential", "custom", "adaptive")

    def __post_init__(self) -> None:
        if self.kind not in self.KINDS:
            raise ValueError(f"Unknown weight schedule '{self.kind}'. Valid kinds: {', '.join(self.KINDS)}")
        if self.kind == "exponential" and not 0.0 < self.theta < 1.0:
            raise ValueError(f"exponential schedule needs theta in (0, 1), got {self.theta}")
        if self.first <= 0:
            raise ValueError(f"first weight must be positive, got {self.first}")
        if self.kind == "custom" and any(a <= 0 for a in self.sequence):
            raise ValueError("custom weights must be positive")

    @property
    def adaptive(self) -> bool:
        return self.kind == "adaptive"

    def _check_round(self, t: int) -> None:
        if t < 1:
            raise ValueError(f"rounds start at 1, got {t}")
        if self.kind == "custom" and t > len(self.sequence):
            raise ValueError(f"custom schedule has {len(self.sequence)} weights, round {t} requested")

    def alpha(self, t: int) -> float:
        self._check_round(t)
        if self.kind == "uniform":
            return 1.0
        if self.kind == "linear":
            return float(t)
        if self.kind == "exponential":
            return self.first if t == 1 else self.theta * self.cum_A(t)
        if self.kind == "custom":
            return float(self.sequence[t - 1])
        raise FenchelGameError("adaptive weights are chosen during the run, see adaptive_weight()")

    def cum_A(self, t: int) -> float:
        self._check_round(t)
        if self.kind == "uniform":
            return float(t)
        if self.kind == "linear":
            return t * (t + 1) / 2.0
        if self.kind == "exponential":
            return self.first / (1.0 - self.theta) ** (t - 1)
        if self.kind == "custom":
            return math.fsum(self.sequence[:t])
        raise FenchelGameError("adaptive weights are chosen during the run, see adaptive_weight()")

    def adaptive_weight(self, grad_norm: float) -> float:
        """alpha = 1/grad_norm^2, capped when the norm falls below 1e-6."""
        if grad_norm < ADAPTIVE_NORM_FLOOR:
            return self.cap
        return min(1.0 / grad_norm**2, self.cap)


# ---------------------------------------------------------------------------
# Trace
# ---------------------------------------------------------------------------


@dataclass
class Trace:
    """
    Per-iteration record stream.

    Rows are dicts keyed by column name with an integer ``t``; ``None`` marks a
    value that was not measured at that iteration. ``iterates`` (averaged
    points) and ``actions`` (per-round points) are kept for equivalence checks
    and are never written to disk.
    """

    columns: List[str] = field(default_factory=list)
    rows: List[Dict[str, Any]] = field(default_factory=list)
    metadata: Dict[str, Any] = field(default_factory=dict)
    iterates: List[Vector] = field(default_factory=list)
    actions: List[Vector] = field(default_factory=list)

    def append(self, t: int, **values: Any) -> None:
        if self.rows and t <= self.rows[-1]["t"]:
            raise ValueError(f"iteration indices must increase strictly, got {t} after {self.rows[-1]['t']}")
        for key in values:
            if key not in self.columns:
                self.columns.append(key)
        row = {"t": int(t)}
        row.update(values)
        self.rows.append(row)

    def column(self, name: str) -> List[Any]:
        return [row.get(name) for row in self.rows]

    def last(self, name: str) -> Any:
        if not self.rows:
            raise ValueError("trace is empty")
        return self.rows[-1].get(name)

    def __len__(self) -> int:
        return len(self.rows)
