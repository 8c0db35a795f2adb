"""
Experiment registry, configuration loading, trace emission and the
acceptance suites.

An experiment is a registered function ``(params, seed) -> {key: Trace}``
with declared default parameters. ``run_experiment`` validates a spec
against those defaults, writes one CSV per trace plus a JSON sidecar, and
``verify`` evaluates the named acceptance suites into a ``Report``.
"""

import contextlib
import csv
import hashlib
import io
import json
import logging
import math
import os
import tempfile
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.linalg
import scipy.optimize

from . import __version__
from .dynamics import PRESETS, REFERENCE_METHODS, accel_linear_certificate, preset, reference_iterative, run_dynamics
from .learners import LearnerSpec, LossAggregate, build_learner, composite_loss, linear_loss, solve_regularized
from .momentum import (
    DeepLinearNet,
    MomentumConfig,
    akv_bound_check,
    c0_constant,
    cubic_regularized_experiment,
    deep_linear_train,
    heavy_ball_run,
    make_cubic_problem,
    make_deep_linear_problem,
    make_relu_problem,
    quadratic_certificate,
    relu_gram,
    relu_train,
    tuned_params,
)
from .oracles import (
    FeasibleSet,
    L2Ball,
    Objective,
    QuadraticTerm,
    Trace,
    Unconstrained,
    Vector,
    make_l1_distance,
    make_least_squares,
    make_matrix_completion,
    make_quadratic,
    minimize_over_set,
)
from .projection_free import boundary_fw, gauge_fw, nuclear_run
from .saddle import (
    DiagnosticsConfig,
    SaddleConfig,
    beta_sweep,
    cnc_sgd_run,
    overparam_sweep,
    phase_retrieval_objective,
    relative_distance,
    saddle_parameter_table,
    toy_saddle_objective,
)

logger = logging.getLogger(__name__)

SCHEMA_VERSION = 1
OUTPUT_ENV_VAR = "FENCHEL_GAME_OUT"
DEFAULT_OUTPUT_DIR = "outputs"
CSV_SIGNIFICANT_DIGITS = 17
# bounds below this are compared against denormal residuals
POLYAK_BOUND_FLOOR = 1e-250


def default_output_dir() -> Path:
    """Output directory from $FENCHEL_GAME_OUT, ``outputs`` when unset."""
    return Path(os.environ.get(OUTPUT_ENV_VAR) or DEFAULT_OUTPUT_DIR)


def derive_seed(root: int, label: str, index: int = 0) -> int:
    """64-bit sub-stream seed from sha256 of (root, label, index)."""
    digest = hashlib.sha256(f"{int(root)}:{label}:{int(index)}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "big")


# ---------------------------------------------------------------------------
# Registry and specs
# ---------------------------------------------------------------------------


ExperimentFn = Callable[[Dict[str, Any], int], Dict[str, Trace]]


@dataclass(frozen=True)
class Experiment:
    """A registered experiment with its default parameters."""

    name: str
    description: str
    defaults: Dict[str, Any]
    func: ExperimentFn


EXPERIMENTS: Dict[str, Experiment] = {}


def register_experiment(name: str, description: str, **defaults: Any) -> Callable[[ExperimentFn], ExperimentFn]:
    """Register ``func`` as experiment ``name``; keyword arguments declare the parameter schema."""

    def decorator(func: ExperimentFn) -> ExperimentFn:
        EXPERIMENTS[name] = Experiment(name=name, description=description, defaults=defaults, func=func)
        return func

    return decorator


def get_experiment(name: str) -> Experiment:
    """
    Look up a registered experiment.

    Raises:
        ValueError: If the name is unknown
    """
    if name not in EXPERIMENTS:
        raise ValueError(f"Unknown experiment '{name}'. Valid experiments: {', '.join(sorted(EXPERIMENTS))}")
    return EXPERIMENTS[name]


def _type_matches(value: Any, default: Any) -> bool:
    if default is None or isinstance(default, dict):
        return default is None or isinstance(value, dict)
    if isinstance(default, bool):
        return isinstance(value, bool)
    if isinstance(value, bool):
        return False
    if isinstance(default, int):
        return isinstance(value, int)
    if isinstance(default, float):
        return isinstance(value, (int, float))
    if isinstance(default, (list, tuple)):
        return isinstance(value, (list, tuple))
    return isinstance(value, type(default))


def validate_params(name: str, params: Dict[str, Any]) -> Dict[str, Any]:
    """
    Merge ``params`` over the experiment's defaults.

    Raises:
        ValueError: On an unknown experiment, an undeclared parameter or a
            value whose type does not match the declared default
    """
    experiment = get_experiment(name)
    resolved = dict(experiment.defaults)
    for key, value in params.items():
        if key not in experiment.defaults:
            valid = ", ".join(sorted(experiment.defaults)) or "(none)"
            raise ValueError(f"Unknown parameter '{key}' for experiment '{name}'. Valid parameters: {valid}")
        default = experiment.defaults[key]
        if value is not None and not _type_matches(value, default):
            raise ValueError(
                f"Parameter '{key}' of experiment '{name}' expects {type(default).__name__}, got {value!r}"
            )
        resolved[key] = float(value) if isinstance(default, float) and isinstance(value, int) else value
    return resolved


def parse_assignment(assignment: str) -> Tuple[List[str], Any]:
    """
    Split ``key.path=value``; the value is parsed as JSON when possible.

    Raises:
        ValueError: If the assignment has no '=' or an empty key
    """
    key, sep, raw = assignment.partition("=")
    path = [part.strip() for part in key.split(".")]
    if not sep or not all(path):
        raise ValueError(f"Invalid override '{assignment}'. Expected key=value (dots address nested keys)")
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw
    return path, value


@dataclass
class ExperimentSpec:
    """Experiment name, root seed, parameter overrides and output directory."""

    name: str
    seed: int = 0
    params: Dict[str, Any] = field(default_factory=dict)
    out: Optional[Path] = None

    @classmethod
    def from_dict(cls, document: Dict[str, Any]) -> "ExperimentSpec":
        """
        Build a spec from ``{"schema_version": 1, "experiment", "seed", "params"}``.

        Raises:
            ValueError: If the document does not follow the schema
        """
        if not isinstance(document, dict):
            raise ValueError("experiment config must be a JSON object")
        version = document.get("schema_version")
        if version != SCHEMA_VERSION:
            raise ValueError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
        unknown = set(document) - {"schema_version", "experiment", "seed", "params"}
        if unknown:
            raise ValueError(f"Unknown config keys: {', '.join(sorted(unknown))}")
        name = document.get("experiment")
        if not isinstance(name, str) or not name:
            raise ValueError("config needs a non-empty 'experiment' name")
        seed = document.get("seed", 0)
        if isinstance(seed, bool) or not isinstance(seed, int) or seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
        params = document.get("params", {})
        if not isinstance(params, dict):
            raise ValueError("'params' must be a JSON object")
        spec = cls(name=name, seed=seed, params=dict(params))
        spec.resolved_params()
        return spec

    @classmethod
    def from_file(cls, path: Any) -> "ExperimentSpec":
        """
        Load a JSON config file.

        Raises:
            ValueError: If the file is not valid JSON or violates the schema
        """
        path = Path(path)
        try:
            with open(path, "r", encoding="utf-8") as f:
                document = json.load(f)
        except json.JSONDecodeError as e:
            raise ValueError(f"Invalid JSON in {path}: {e}") from e
        return cls.from_dict(document)

    def with_overrides(self, assignments: Sequence[str]) -> "ExperimentSpec":
        """Apply ``key=value`` overrides (dot paths into params) and revalidate."""
        params = json.loads(json.dumps(self.params))
        for assignment in assignments:
            path, value = parse_assignment(assignment)
            target = params
            for part in path[:-1]:
                child = target.setdefault(part, {})
                if not isinstance(child, dict):
                    raise ValueError(f"Override '{assignment}' descends into non-object '{part}'")
                target = child
            target[path[-1]] = value
        spec = replace(self, params=params)
        spec.resolved_params()
        return spec

    def resolved_params(self) -> Dict[str, Any]:
        return validate_params(self.name, self.params)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "experiment": self.name,
            "seed": self.seed,
            "params": self.resolved_params(),
        }

    def digest(self) -> str:
        """sha256 of the canonical JSON form (resolved parameters, sorted keys)."""
        canonical = json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


# ---------------------------------------------------------------------------
# Writers
# ---------------------------------------------------------------------------


def format_value(value: Any) -> str:
    """
    CSV text of a scalar: integers as-is, floats with 17 significant digits,
    booleans as 1/0 and None as an empty cell.

    Raises:
        ValueError: For non-scalar values
    """
    if value is None:
        return ""
    if isinstance(value, (bool, np.bool_)):
        return "1" if value else "0"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format(float(value), f".{CSV_SIGNIFICANT_DIGITS}g")
    raise ValueError(f"Cannot write a {type(value).__name__} value to CSV")


def atomic_write_text(path: Path, text: str) -> None:
    """Write through a temporary file in the target directory, then rename."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        os.replace(tmp_name, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp_name)
        raise


def write_trace_csv(trace: Trace, path: Path) -> Path:
    """Write ``t`` followed by the trace's columns in declaration order."""
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["t"] + list(trace.columns))
    for row in trace.rows:
        writer.writerow([format_value(row["t"])] + [format_value(row.get(col)) for col in trace.columns])
    atomic_write_text(path, buffer.getvalue())
    return Path(path)


def write_sidecar(path: Path, spec: ExperimentSpec, files: Dict[str, List[str]]) -> Path:
    """JSON metadata next to the CSVs: experiment, seed, config digest, version and columns per file."""
    document = {
        "experiment": spec.name,
        "seed": spec.seed,
        "config_digest": spec.digest(),
        "version": __version__,
        "params": spec.resolved_params(),
        "columns": files,
    }
    atomic_write_text(path, json.dumps(document, indent=2, sort_keys=True) + "\n")
    return Path(path)


def run_experiment(spec: ExperimentSpec, out_dir: Optional[Any] = None) -> List[Path]:
    """
    Run one experiment and write its traces.

    Args:
        spec: Validated experiment spec
        out_dir: Output directory (default: spec.out, then $FENCHEL_GAME_OUT, then ``outputs``)

    Returns:
        Paths of the written CSV files followed by the sidecar

    Raises:
        ValueError: If the spec does not validate
        FenchelGameError: If the run itself fails
    """
    experiment = get_experiment(spec.name)
    params = spec.resolved_params()
    target = Path(out_dir) if out_dir is not None else (Path(spec.out) if spec.out else default_output_dir())
    logger.info("running %s (seed %d) into %s", spec.name, spec.seed, target)

    traces = experiment.func(params, spec.seed)
    paths: List[Path] = []
    files: Dict[str, List[str]] = {}
    for key, trace in traces.items():
        filename = f"{spec.name}.csv" if not key else f"{spec.name}_{key}.csv"
        paths.append(write_trace_csv(trace, target / filename))
        files[filename] = ["t"] + list(trace.columns)
    paths.append(write_sidecar(target / f"{spec.name}.json", spec, files))
    return paths


# ---------------------------------------------------------------------------
# Problem builders
# ---------------------------------------------------------------------------


def _project(trace: Trace, columns: Sequence[str]) -> Trace:
    slim = Trace(columns=list(columns), metadata=dict(trace.metadata))
    for row in trace.rows:
        slim.append(row["t"], **{col: row.get(col) for col in columns})
    return slim


def _seeded_quadratic(kappa: float, d: int, seed: int, b_scale: float = 1.0) -> Tuple[Objective, Vector]:
    """Quadratic with spectrum linspace(1, kappa) in a random basis; returns (objective, unconstrained minimizer)."""
    rng = np.random.default_rng(seed)
    Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
    evals = np.linspace(1.0, kappa, d)
    Gamma = (Q * evals) @ Q.T
    Gamma = 0.5 * (Gamma + Gamma.T)
    b = b_scale * rng.standard_normal(d)
    return make_quadratic(Gamma, b), np.linalg.solve(Gamma, -b)


def _distance_quadratic(c: Any) -> Objective:
    """f(w) = 1/2 ||w - c||^2."""
    c = np.asarray(c, dtype=np.float64)
    return make_quadratic(np.eye(len(c)), -c, 0.5 * float(c @ c), name="distance_quadratic")


def _ball_distance_optimum(c: Vector, radius: float) -> float:
    return 0.5 * max(float(np.linalg.norm(c)) - radius, 0.0) ** 2


def _boundary_optimum(objective: Objective, radius: float) -> float:
    """Minimum of a two-dimensional objective over the circle of the given radius."""
    angles = np.linspace(-math.pi, math.pi, 3601)
    values = [objective.value(radius * np.array([math.cos(a), math.sin(a)])) for a in angles]
    best = angles[int(np.argmin(values))]
    spacing = angles[1] - angles[0]
    result = scipy.optimize.minimize_scalar(
        lambda a: objective.value(radius * np.array([math.cos(a), math.sin(a)])),
        bounds=(best - spacing, best + spacing),
        method="bounded",
        options={"xatol": 1e-12},
    )
    return float(min(result.fun, min(values)))


def _first_at_or_below(trace: Trace, column: str, threshold: float) -> Optional[int]:
    for row in trace.rows:
        value = row.get(column)
        if value is not None and value <= threshold:
            return row["t"]
    return None


def _beta_key(beta: float) -> str:
    return f"beta_{beta:g}"


# ---------------------------------------------------------------------------
# Experiments: Fenchel game methods
# ---------------------------------------------------------------------------


@register_experiment(
    "fw_quadratic_ball",
    "Frank-Wolfe game on 1/2||w - c||^2 over an l2 ball",
    c=[2.0, 0.0],
    radius=1.0,
    T=1000,
)
def _fw_quadratic_ball(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    c = np.asarray(params["c"], dtype=np.float64)
    ball = L2Ball(len(c), params["radius"])
    objective = _distance_quadratic(c)
    f_star = _ball_distance_optimum(c, ball.radius)
    config = preset("frank_wolfe", {"T": params["T"], "f_star": f_star})
    _, _, trace = run_dynamics(config, objective, ball)
    for row in trace.rows:
        row["gap"] = row["error"]
    slim = _project(trace, ["f_value", "gap"])
    slim.metadata.update({"L": objective.smoothness_L, "D": ball.diameter_sq_D, "f_star": f_star})
    return {"": slim}


def _equivalence_problem(method: str, kappa: float, d: int, seed: int) -> Tuple[Objective, FeasibleSet]:
    objective, _ = _seeded_quadratic(kappa, d, seed, b_scale=3.0)
    if method in ("frank_wolfe", "nesterov_1mem", "nesterov_infmem"):
        return objective, L2Ball(d, 1.0)
    return objective, Unconstrained(d, comparator_radius=10.0)


def equivalence_trace(method: str, T: int, kappa: float, d: int, seed: int) -> Trace:
    """Distance between the game's averaged iterate and the iterative method's point, per round."""
    objective, decision_set = _equivalence_problem(method, kappa, d, seed)
    params = {"L": objective.smoothness_L, "T": T}
    _, _, game = run_dynamics(preset(method, params), objective, decision_set)
    reference = reference_iterative(method, params, objective, decision_set, T)
    trace = Trace(columns=["deviation", "f_game", "f_reference"], metadata={"method": method})
    for game_row, ref_row, x_bar, w in zip(game.rows, reference.rows, game.iterates, reference.iterates):
        trace.append(
            game_row["t"],
            deviation=float(np.linalg.norm(x_bar - w)),
            f_game=game_row["f_value"],
            f_reference=ref_row["f_value"],
        )
    return trace


@register_experiment(
    "equivalence",
    "Game iterates against the classical iterative method",
    method="frank_wolfe",
    T=200,
    kappa=10.0,
    d=5,
    instance=0,
)
def _equivalence(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    if params["method"] not in REFERENCE_METHODS:
        raise ValueError(f"Unknown method '{params['method']}'. Valid methods: {', '.join(REFERENCE_METHODS)}")
    problem_seed = derive_seed(seed, "equivalence", params["instance"])
    return {"": equivalence_trace(params["method"], params["T"], params["kappa"], params["d"], problem_seed)}


@register_experiment(
    "nesterov_quadratic",
    "Accelerated game on an ill-conditioned quadratic with the T^2 error scaling",
    preset="nesterov_1mem",
    kappa=100.0,
    d=10,
    T=500,
)
def _nesterov_quadratic(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    if params["preset"] not in ("nesterov_1mem", "nesterov_infmem", "nesterov_first"):
        raise ValueError(f"preset must be a Nesterov variant, got '{params['preset']}'")
    objective, x_star = _seeded_quadratic(params["kappa"], params["d"], derive_seed(seed, "nesterov_quadratic"))
    f_star = objective.value(x_star)
    decision_set = Unconstrained(objective.dim, comparator_radius=2.0 * float(np.linalg.norm(x_star)) + 1.0)
    L = objective.smoothness_L
    config = preset(params["preset"], {"L": L, "T": params["T"], "f_star": f_star})
    _, _, trace = run_dynamics(config, objective, decision_set)
    # x0 = 0, so D = 1/2 ||x*||^2
    bound = 8.0 * L * 0.5 * float(x_star @ x_star)
    for row in trace.rows:
        row["scaled_error"] = row["t"] ** 2 * row["error"]
        row["bound"] = bound
    return {"": _project(trace, ["f_value", "error", "scaled_error", "bound"])}


@register_experiment(
    "accel_linear_quadratic",
    "Accelerated linear-rate game on a strongly convex quadratic",
    kappa=100.0,
    d=10,
    T=200,
)
def _accel_linear_quadratic(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    objective, x_star = _seeded_quadratic(params["kappa"], params["d"], derive_seed(seed, "accel_linear"))
    f_star = objective.value(x_star)
    decision_set = Unconstrained(objective.dim, comparator_radius=2.0 * float(np.linalg.norm(x_star)) + 1.0)
    config = preset(
        "accel_linear",
        {"mu": objective.strong_convexity_mu, "L": objective.smoothness_L, "T": params["T"], "f_star": f_star},
    )
    _, _, trace = run_dynamics(config, objective, decision_set)
    C = accel_linear_certificate(config, x_star, np.zeros(objective.dim))
    theta = config.extras["theta"]
    # empirical constant: the bound through error(1)
    C_fit = trace.rows[0]["error"] / (1.0 - theta)
    for row in trace.rows:
        row["bound"] = C * (1.0 - theta) ** row["t"]
    slim = _project(trace, ["f_value", "error", "bound"])
    slim.metadata.update({"theta": theta, "C": C, "C_fit": C_fit})
    return {"": slim}


@register_experiment(
    "gauge_fw_ball",
    "Gauge Frank-Wolfe on 1/2||w - c||^2 over the unit l2 ball",
    c=[2.0, 1.0],
    T=500,
)
def _gauge_fw_ball(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    c = np.asarray(params["c"], dtype=np.float64)
    ball = L2Ball(len(c), 1.0)
    objective = _distance_quadratic(c)
    f_star = _ball_distance_optimum(c, 1.0)
    _, trace = gauge_fw(objective, ball, params["T"], f_star=f_star)
    for row in trace.rows:
        row["scaled_error"] = row["t"] ** 2 * row["error"]
    slim = _project(trace, ["f_value", "error", "scaled_error", "x_gauge"])
    x_star = ball.project(c)
    slim.metadata.update(
        {
            "L": objective.smoothness_L,
            "lambda": ball.gauge_sq_strong_convexity,
            "gauge_star": ball.gauge(x_star),
        }
    )
    return {"": slim}


@register_experiment(
    "boundary_fw_ball",
    "Boundary Frank-Wolfe on ||w - c||_1 over the unit l2 ball",
    c=[2.0, 0.3],
    T=2000,
)
def _boundary_fw_ball(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    c = np.asarray(params["c"], dtype=np.float64)
    if c.shape != (2,):
        raise ValueError(f"c must have two entries, got {c.shape}")
    ball = L2Ball(2, 1.0)
    objective = make_l1_distance(c)
    f_star = _boundary_optimum(objective, 1.0)
    _, trace = boundary_fw(objective, ball, params["T"], f_star=f_star)
    return {"": _project(trace, ["f_value", "error", "x_gauge", "L_T", "bound", "envelope"])}


@register_experiment(
    "nuclear_completion",
    "Spectrahedron method on rank-one matrix completion",
    d1=10,
    d2=10,
    observed=0.8,
    T=300,
    delta=0.1,
    parallelism_hint=1,
)
def _nuclear_completion(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    rng = np.random.default_rng(derive_seed(seed, "nuclear_completion"))
    u = rng.standard_normal(params["d1"])
    v = rng.standard_normal(params["d2"])
    target = np.outer(u, v)
    mask = rng.random(target.shape) < params["observed"]
    objective = make_matrix_completion(target, mask)
    radius = float(np.linalg.norm(u) * np.linalg.norm(v))
    _, trace = nuclear_run(
        objective,
        radius,
        delta=params["delta"],
        T=params["T"],
        seed=derive_seed(seed, "nuclear_draws"),
        parallelism_hint=params["parallelism_hint"],
    )
    slim = _project(trace, ["f_value", "nuclear_norm", "draws", "min_eigenvalue", "trace_error"])
    slim.metadata.update({"radius": radius, "f_initial": objective.value(np.zeros(target.shape))})
    return {"": slim}


_BALL_PRESETS = ("frank_wolfe", "fw_uniform", "fw_linear_rate", "smoothed_fw", "incremental_fw", "boundary_fw", "gauge_fw")


@register_experiment(
    "game",
    "Any registered preset on a seeded least-squares problem",
    preset="nesterov_1mem",
    d=5,
    n=20,
    radius=1.0,
    T=200,
)
def _game(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    name = params["preset"]
    if name not in PRESETS:
        raise ValueError(f"Unknown preset '{name}'. Valid presets: {', '.join(sorted(PRESETS))}")
    if name == "nuclear_norm":
        return _nuclear_completion(validate_params("nuclear_completion", {"T": params["T"]}), seed)

    rng = np.random.default_rng(derive_seed(seed, "game"))
    d, n = params["d"], params["n"]
    A = rng.standard_normal((n, d))
    y = rng.standard_normal(n) * 2.0
    objective = make_least_squares(A, y)
    L = objective.smoothness_L
    if name in _BALL_PRESETS:
        decision_set: FeasibleSet = L2Ball(d, params["radius"])
        _, f_star = minimize_over_set(objective.value, objective.gradient, decision_set, np.zeros(d), 1.0 / L, 1e-13)
    else:
        x_star = np.linalg.lstsq(A, y, rcond=None)[0]
        f_star = objective.value(x_star)
        decision_set = Unconstrained(d, comparator_radius=2.0 * float(np.linalg.norm(x_star)) + 1.0)

    if name == "gauge_fw":
        _, trace = gauge_fw(objective, decision_set, params["T"], f_star=f_star)
    elif name == "boundary_fw":
        _, trace = boundary_fw(objective, decision_set, params["T"], f_star=f_star)
    else:
        config = preset(
            name,
            {"L": L, "mu": objective.strong_convexity_mu, "T": params["T"], "f_star": f_star, "seed": seed},
        )
        _, _, trace = run_dynamics(config, objective, decision_set)
    return {"": _project(trace, ["f_value", "error", "gap_estimate", "x_regret", "y_regret"])}


# ---------------------------------------------------------------------------
# Experiments: heavy-ball momentum
# ---------------------------------------------------------------------------


def _diagonal_problem(kappa: float, d: int) -> Objective:
    return make_quadratic(np.diag(np.linspace(1.0, kappa, d)), name=f"diag_kappa{kappa:g}")


@register_experiment(
    "polyak_quadratic",
    "Tuned heavy ball on diagonal quadratics against the residual bound",
    kappas=[10.0, 100.0, 1000.0],
    d=10,
    T=5000,
)
def _polyak_quadratic(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    traces = {}
    for index, kappa in enumerate(params["kappas"]):
        kappa = float(kappa)
        objective = _diagonal_problem(kappa, params["d"])
        w0 = np.random.default_rng(derive_seed(seed, "polyak_w0", index)).standard_normal(params["d"])
        config = tuned_params("quadratic", {"lambda_min": 1.0, "lambda_max": kappa, "w0": w0})
        trace = heavy_ball_run(config, objective, params["T"], w_star=np.zeros(params["d"]))
        initial = trace.rows[0]["residual"]
        rate = 1.0 - 1.0 / (2.0 * math.sqrt(kappa))
        for row in trace.rows:
            row["bound"] = rate ** row["t"] * 4.0 * math.sqrt(kappa) * initial
        slim = _project(trace, ["f_value", "residual", "bound"])
        slim.metadata["kappa"] = kappa
        traces[f"kappa_{kappa:g}"] = slim
    return traces


@register_experiment(
    "momentum_speedup",
    "Iterations to a residual threshold: gradient descent against tuned heavy ball",
    kappa=400.0,
    d=10,
    threshold=1e-6,
    T=100000,
)
def _momentum_speedup(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    kappa = params["kappa"]
    objective = _diagonal_problem(kappa, params["d"])
    w0 = np.ones(params["d"])
    tuned = tuned_params("quadratic", {"lambda_min": 1.0, "lambda_max": kappa, "w0": w0})
    configs = {"gd": MomentumConfig(eta=tuned.eta, beta=0.0, w0=w0), "momentum": tuned}
    traces = {}
    for key, config in configs.items():
        trace = heavy_ball_run(
            config, objective, params["T"], w_star=np.zeros(params["d"]), record_every=10,
            stop_below=params["threshold"],
        )
        traces[key] = _project(trace, ["f_value", "residual"])
    return traces


def _replicate_mean(traces: List[Trace], metadata: Dict[str, Any]) -> Trace:
    """Average loss, residual and pattern change over replicate runs of equal length."""
    columns = ["loss", "loss_max", "residual", "pattern_change", "pattern_change_max"]
    summary = Trace(columns=columns, metadata=metadata)
    for rows in zip(*(trace.rows for trace in traces)):
        losses = [row["loss"] for row in rows]
        changes = [row["pattern_change"] for row in rows]
        summary.append(
            rows[0]["t"],
            loss=float(np.mean(losses)),
            loss_max=max(losses),
            residual=float(np.mean([row["residual"] for row in rows])),
            pattern_change=float(np.mean(changes)),
            pattern_change_max=max(changes),
        )
    return summary


@register_experiment(
    "relu_ntk",
    "Wide one-hidden-layer ReLU network: gradient descent against tuned heavy ball",
    n=5,
    m=1000,
    d=10,
    T=200,
    replicates=8,
    init="symmetric",
    reduction="mean",
    input_shift=0.0,
)
def _relu_ntk(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    if params["replicates"] < 1:
        raise ValueError(f"replicates must be at least 1, got {params['replicates']}")
    runs: Dict[str, List[Trace]] = {"gd": [], "momentum": []}
    tuned: Dict[str, List[float]] = {"eta": [], "beta": [], "kappa": []}
    for k in range(params["replicates"]):
        net = make_relu_problem(
            params["n"],
            params["m"],
            params["d"],
            seed=derive_seed(seed, "relu_ntk", k),
            input_shift=params["input_shift"],
            init=params["init"],
            reduction=params["reduction"],
        )
        evals = scipy.linalg.eigvalsh(relu_gram(net))
        momentum = tuned_params("relu", {"lambda_min": float(evals[0]), "lambda_max": float(evals[-1])})
        tuned["eta"].append(momentum.eta)
        tuned["beta"].append(momentum.beta)
        tuned["kappa"].append(float(evals[-1] / evals[0]))
        runs["gd"].append(relu_train(net, MomentumConfig(eta=momentum.eta, beta=0.0), params["T"]))
        runs["momentum"].append(relu_train(net, momentum, params["T"]))
    return {
        "gd": _replicate_mean(runs["gd"], {"replicates": params["replicates"], "eta": tuned["eta"]}),
        "momentum": _replicate_mean(runs["momentum"], {"replicates": params["replicates"], **tuned}),
    }


def _deep_linear_configs(net: DeepLinearNet, X: Vector) -> Dict[str, MomentumConfig]:
    s = scipy.linalg.svdvals(X)
    s = s[s > 1e-12 * s[0]]
    tuned = tuned_params(
        "deep_linear",
        {
            "d_y": net.layers[-1].shape[0],
            "L": net.depth,
            "sigma_max_sq": float(s[0] ** 2),
            "sigma_min_sq": float(s[-1] ** 2),
        },
    )
    return {"gd": MomentumConfig(eta=tuned.eta, beta=0.0), "momentum": tuned}


@register_experiment(
    "deep_linear",
    "Deep linear network with orthogonal initialization against the residual bound",
    d=4,
    d_y=4,
    m=16,
    depth=10,
    n=8,
    kappa_x=12.0,
    target_noise=0.1,
    T=500,
)
def _deep_linear(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    net, X, Y = make_deep_linear_problem(
        d=params["d"],
        d_y=params["d_y"],
        m=params["m"],
        depth=params["depth"],
        n=params["n"],
        kappa_x=params["kappa_x"],
        target_noise=params["target_noise"],
        seed=derive_seed(seed, "deep_linear"),
    )
    traces = {}
    for key, config in _deep_linear_configs(net, X).items():
        traces[key] = deep_linear_train(net, config, X, Y, params["T"])
    return traces


@register_experiment(
    "deep_linear_identity",
    "100-layer deep linear network fitting a near-identity map on Gaussian inputs",
    d=20,
    m=50,
    depth=100,
    n=5,
    target_noise=0.1,
    T=1000,
)
def _deep_linear_identity(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    net, X, Y = make_deep_linear_problem(
        d=params["d"],
        d_y=params["d"],
        m=params["m"],
        depth=params["depth"],
        n=params["n"],
        target_noise=params["target_noise"],
        seed=derive_seed(seed, "deep_linear_identity"),
        inputs="gaussian",
        target="identity",
    )
    traces = {}
    for key, config in _deep_linear_configs(net, X).items():
        traces[key] = deep_linear_train(net, config, X, Y, params["T"])
    return traces


@register_experiment(
    "cubic_regularized",
    "Heavy ball on a cubic-regularized nonconvex quadratic for several momentum values",
    betas=[0.0, 0.3, 0.6, 0.9],
    eta=0.01,
    rho=1.0,
    d=4,
    T=5000,
)
def _cubic_regularized(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    A, b, w_star = make_cubic_problem(d=params["d"], rho=params["rho"], seed=derive_seed(seed, "cubic"))
    traces = {}
    for beta in params["betas"]:
        config = MomentumConfig(eta=params["eta"], beta=float(beta))
        trace = cubic_regularized_experiment(A, b, params["rho"], config, params["T"], w_star=w_star)
        traces[_beta_key(float(beta))] = _project(trace, ["f_value", "grad_norm", "gap"])
    return traces


# ---------------------------------------------------------------------------
# Experiments: saddle escape
# ---------------------------------------------------------------------------


def _sweep_summary(traces: Dict[float, Trace], thresholds: Sequence[float]) -> Trace:
    columns = ["beta"] + [f"first_below_{th:g}" for th in thresholds] + ["stopped_at"]
    summary = Trace(columns=columns)
    for index, (beta, trace) in enumerate(traces.items()):
        first = trace.metadata["first_below"]
        values = {f"first_below_{th:g}": first.get(th) for th in thresholds}
        summary.append(index, beta=beta, stopped_at=trace.metadata["stopped_at"], **values)
    return summary


@register_experiment(
    "saddle_beta_sweep",
    "Momentum SGD escaping the toy saddle for several momentum values",
    betas=[0.0, 0.3, 0.5, 0.7, 0.9],
    eta=5e-5,
    n=10,
    threshold=-0.01,
    T=2000000,
    T_thred=1000,
    record_every=1000,
)
def _saddle_beta_sweep(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    objective = toy_saddle_objective(params["n"], seed=derive_seed(seed, "toy_saddle"))
    betas = [float(beta) for beta in params["betas"]]
    config = SaddleConfig(
        eta=params["eta"],
        T=params["T"],
        T_thred=params["T_thred"],
        record_every=params["record_every"],
        stop_below=params["threshold"],
        thresholds=(params["threshold"],),
    )
    seeds = {beta: derive_seed(seed, "saddle_beta_sweep", i) for i, beta in enumerate(betas)}
    results = beta_sweep(objective, config, betas, seeds=seeds)
    traces = {_beta_key(beta): _project(trace, ["f_value", "grad_norm", "boosted"]) for beta, trace in results.items()}
    traces["summary"] = _sweep_summary(results, [params["threshold"]])
    return traces


@register_experiment(
    "phase_retrieval",
    "Momentum SGD on phase retrieval, relative distance to the signal",
    betas=[0.0, 0.9],
    eta=5e-4,
    n=200,
    d=10,
    init_scale=0.1,
    T=100000,
    record_every=100,
)
def _phase_retrieval(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    objective, w_star = phase_retrieval_objective(params["n"], params["d"], seed=derive_seed(seed, "phase"))
    rng = np.random.default_rng(derive_seed(seed, "phase_w0"))
    w0 = params["init_scale"] * rng.standard_normal(params["d"]) / math.sqrt(params["d"])
    betas = [float(beta) for beta in params["betas"]]
    thresholds = (0.5, 0.1)
    config = SaddleConfig(
        eta=params["eta"],
        T=params["T"],
        record_every=params["record_every"],
        stop_below=min(thresholds),
        thresholds=thresholds,
    )
    seeds = {beta: derive_seed(seed, "phase_indices", i) for i, beta in enumerate(betas)}
    results = beta_sweep(objective, config, betas, w0, lambda w: relative_distance(w, w_star), seeds)
    traces = {_beta_key(beta): _project(trace, ["f_value", "dist"]) for beta, trace in results.items()}
    traces["summary"] = _sweep_summary(results, thresholds)
    return traces


@register_experiment(
    "overparam_phase",
    "Gradient descent on over-parametrized phase retrieval for several widths K",
    Ks=[1, 2, 3, 5, 10],
    d=10,
    n=200,
    eta=0.01,
    T=2000,
    init_scale=0.01,
    record_every=10,
)
def _overparam_phase(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    results = overparam_sweep(
        Ks=[int(K) for K in params["Ks"]],
        d=params["d"],
        n=params["n"],
        eta=params["eta"],
        T=params["T"],
        seed=derive_seed(seed, "overparam"),
        init_scale=params["init_scale"],
        record_every=params["record_every"],
    )
    return {f"K_{K}": _project(trace, ["f_value", "dist"]) for K, trace in results.items()}


@register_experiment(
    "toy_diagnostics",
    "Momentum alignment diagnostics along a toy saddle escape",
    beta=0.9,
    eta=5e-5,
    n=10,
    T=100000,
    record_every=500,
    eps=0.02,
    tau=500,
)
def _toy_diagnostics(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    objective = toy_saddle_objective(params["n"], seed=derive_seed(seed, "toy_saddle"))
    config = SaddleConfig(
        eta=params["eta"],
        beta=params["beta"],
        T=params["T"],
        seed=derive_seed(seed, "toy_diagnostics"),
        record_every=params["record_every"],
    )
    trace = cnc_sgd_run(objective, config, diagnostics_config=DiagnosticsConfig(eps=params["eps"], tau=params["tau"]))
    columns = ["f_value", "grad_norm", "apag_ratio", "apcg_ratio", "grace_value", "cnc_proxy", "apcg_suppressed"]
    return {"": _project(trace, columns)}


@register_experiment(
    "saddle_parameters",
    "Parameter table of the escape analysis evaluated over eps",
    eps=[0.1, 0.05, 0.02, 0.01],
    beta=0.9,
    delta=0.1,
    c=1.0,
)
def _saddle_parameters(params: Dict[str, Any], seed: int) -> Dict[str, Trace]:
    trace = Trace(columns=["eps", "r", "eta", "F_thred", "T_thred", "constraints_met"])
    for index, eps in enumerate(params["eps"]):
        table = saddle_parameter_table(float(eps), params["beta"], delta=params["delta"], c=params["c"])
        trace.append(
            index,
            eps=float(eps),
            r=table.r,
            eta=table.eta,
            F_thred=table.F_thred,
            T_thred=table.T_thred,
            constraints_met=sum(table.constraints.values()),
        )
    return {"": trace}


# ---------------------------------------------------------------------------
# Acceptance suites
# ---------------------------------------------------------------------------


@dataclass
class ReportRow:
    """Outcome of one acceptance check."""

    suite: str
    name: str
    passed: bool
    measured: Optional[float]
    bound: Optional[float]
    tolerance: Optional[float]
    detail: str = ""


@dataclass
class Report:
    """Acceptance results; passes only when there is at least one row and every row passed."""

    rows: List[ReportRow] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return bool(self.rows) and all(row.passed for row in self.rows)

    @property
    def exit_code(self) -> int:
        return 0 if self.passed else 1

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": __version__,
            "passed": self.passed,
            "rows": [
                {
                    "suite": row.suite,
                    "name": row.name,
                    "passed": row.passed,
                    "measured": _json_number(row.measured),
                    "bound": _json_number(row.bound),
                    "tolerance": row.tolerance,
                    "detail": row.detail,
                }
                for row in self.rows
            ],
        }

    def write_json(self, path: Any) -> Path:
        path = Path(path)
        atomic_write_text(path, json.dumps(self.to_dict(), indent=2) + "\n")
        return path


def _json_number(value: Optional[float]) -> Any:
    if value is None:
        return None
    value = float(value)
    return value if math.isfinite(value) else str(value)


def _run(name: str, seed: int, **overrides: Any) -> Dict[str, Trace]:
    return get_experiment(name).func(validate_params(name, overrides), seed)


def _row(name: str, passed: bool, measured: Any, bound: Any, tolerance: Optional[float], detail: str = "") -> ReportRow:
    return ReportRow(
        suite="",
        name=name,
        passed=bool(passed),
        measured=None if measured is None else float(measured),
        bound=None if bound is None else float(bound),
        tolerance=tolerance,
        detail=detail,
    )


def check_fw_rate(seed: int) -> List[ReportRow]:
    trace = _run("fw_quadratic_ball", seed)[""]
    L, D = trace.metadata["L"], trace.metadata["D"]
    worst = max(row["gap"] * (row["t"] + 1) / (8.0 * L * D) for row in trace.rows)
    return [_row("fw_rate", worst <= 1.0 + 1e-9, worst, 1.0, 1e-9, "max_T gap (T+1) / (8LD)")]


def check_equivalence(seed: int) -> List[ReportRow]:
    defaults = get_experiment("equivalence").defaults
    rows = []
    for method in REFERENCE_METHODS:
        worst = 0.0
        for instance in range(10):
            trace = equivalence_trace(
                method, defaults["T"], defaults["kappa"], defaults["d"], derive_seed(seed, "equivalence", instance)
            )
            worst = max(worst, max(trace.column("deviation")))
        detail = "max_t ||w_t - x_bar_t|| over 10 problems"
        rows.append(_row(f"equivalence_{method}", worst <= 1e-8, worst, 1e-8, None, detail))
    return rows


def check_nesterov(seed: int) -> List[ReportRow]:
    trace = _run("nesterov_quadratic", seed)[""]
    worst = max(trace.column("scaled_error"))
    bound = trace.last("bound")
    return [_row("nesterov_rate", worst <= bound * 1.01, worst, bound, 0.01, "sup_T T^2 (f(x_bar_T) - f*)")]


def check_accel_linear(seed: int) -> List[ReportRow]:
    trace = _run("accel_linear_quadratic", seed)[""]
    errors = {row["t"]: row["error"] for row in trace.rows}
    ratio = errors[200] / trace.last("bound")
    decreasing = errors[200] < errors[100] < errors[50]
    theta, C_fit = trace.metadata["theta"], trace.metadata["C_fit"]
    fit_ratio = errors[200] / (C_fit * (1.0 - theta) ** 200)
    detail = (
        f"error(50)={errors[50]:.3e} error(100)={errors[100]:.3e} error(200)={errors[200]:.3e} "
        f"C={trace.metadata['C']:.3e} C_fit={C_fit:.3e} fit_ratio={fit_ratio:.3e}"
    )
    return [_row("accel_linear_rate", ratio <= 1.0 + 1e-9 and decreasing, ratio, 1.0, 1e-9, detail)]


def regret_excess(seed: int, sequences: int = 100, rounds: int = 20, d: int = 3, eta: float = 0.5) -> Dict[str, float]:
    """
    Largest regret minus its bound over random loss sequences on the unit ball.

    best_response and ftl_plus face strongly convex composite losses (bound 0);
    ftrl_plus faces linear losses (bound R(z*)/eta with R = 1/2||.||^2).
    """
    rng = np.random.default_rng(derive_seed(seed, "regret"))
    ball = L2Ball(d, 1.0)
    worst = {"best_response": -math.inf, "ftl_plus": -math.inf, "ftrl_plus": -math.inf}
    for _ in range(sequences):
        alphas = rng.uniform(0.5, 2.0, rounds)
        ys = rng.standard_normal((rounds, d))
        centers = rng.standard_normal((rounds, d))
        mus = rng.uniform(0.1, 1.0, rounds)
        composite = [composite_loss(ys[i], alphas[i], QuadraticTerm(mus[i], centers[i])) for i in range(rounds)]
        total = LossAggregate()
        for loss in composite:
            total.add(loss)
        comparator = solve_regularized(total, ball)
        for strategy in ("best_response", "ftl_plus"):
            learner = build_learner(LearnerSpec(strategy), ball, np.zeros(d))
            for loss in composite:
                learner.act(current=loss)
                learner.observe(loss)
            worst[strategy] = max(worst[strategy], learner.weighted_regret(comparator))

        linear = [linear_loss(ys[i], alphas[i]) for i in range(rounds)]
        learner = build_learner(LearnerSpec("ftrl_plus", {"regularizer": "euclidean", "eta": eta}), ball, np.zeros(d))
        for loss in linear:
            learner.act(current=loss)
            learner.observe(loss)
        z_star = ball.lmo(np.sum(alphas[:, None] * ys, axis=0))
        bound = 0.5 * float(z_star @ z_star) / eta
        worst["ftrl_plus"] = max(worst["ftrl_plus"], learner.weighted_regret(z_star) - bound)
    return worst


def check_regret(seed: int) -> List[ReportRow]:
    worst = regret_excess(seed)
    measured = max(worst.values())
    detail = " ".join(f"{k}={v:.3e}" for k, v in worst.items())
    return [_row("regret_bounds", measured <= 1e-9, measured, 0.0, 1e-9, detail)]


def check_polyak(seed: int) -> List[ReportRow]:
    worst = 0.0
    for trace in _run("polyak_quadratic", seed).values():
        for row in trace.rows:
            if row["bound"] > POLYAK_BOUND_FLOOR:
                worst = max(worst, row["residual"] / row["bound"])
    detail = "max residual / bound, kappa in 10, 100, 1000"
    return [_row("polyak_quadratic_bound", worst <= 1.0 + 1e-6, worst, 1.0, 1e-6, detail)]


def check_speedup(seed: int) -> List[ReportRow]:
    traces = _run("momentum_speedup", seed)
    threshold = get_experiment("momentum_speedup").defaults["threshold"]
    t_gd = _first_at_or_below(traces["gd"], "residual", threshold)
    t_hb = _first_at_or_below(traces["momentum"], "residual", threshold)
    if t_gd is None or t_hb is None:
        return [_row("momentum_speedup", False, None, 0.2, None, f"threshold not reached: gd={t_gd} momentum={t_hb}")]
    ratio = t_hb / t_gd
    return [_row("momentum_speedup", ratio <= 0.2, ratio, 0.2, None, f"gd={t_gd} momentum={t_hb} iterations")]


def matrix_power_suite(seed: int, cases: int = 100, K: int = 200) -> float:
    """Worst ||A^k v|| / (sqrt(beta)^k C0 ||v||) over random PSD H, residual starts and admissible beta."""
    rng = np.random.default_rng(derive_seed(seed, "matrix_power"))
    worst = 0.0
    for _ in range(cases):
        d = int(rng.integers(1, 9))
        Q, _ = np.linalg.qr(rng.standard_normal((d, d)))
        evals = rng.uniform(0.05, 1.0, d)
        H = (Q * evals) @ Q.T
        H = 0.5 * (H + H.T)
        spectrum = scipy.linalg.eigvalsh(H)
        eta = 1.0 / float(spectrum[-1])
        low = (1.0 - math.sqrt(eta * float(spectrum[0]))) ** 2
        beta = low + (1.0 - low) * float(rng.uniform(0.05, 0.95))
        _, ratio = akv_bound_check(H, rng.standard_normal(d), eta, beta, K)
        worst = max(worst, ratio)
    return worst


def check_matrix_power(seed: int) -> List[ReportRow]:
    worst = matrix_power_suite(seed)
    c0_unit = c0_constant(0.25, 1.0, 1.0)
    corollary = max(quadratic_certificate(1.0, kappa).C0 / (4.0 * math.sqrt(kappa)) for kappa in (1.0, 10.0, 100.0))
    passed = worst <= 1.0 + 1e-9 and abs(c0_unit - 1.8257) <= 1e-3 and corollary <= 1.0
    detail = f"C0(kappa=1)={c0_unit:.4f} max C0/(4 sqrt kappa)={corollary:.4f}"
    return [_row("matrix_power_bound", passed, worst, 1.0, 1e-9, detail)]


def check_deep_linear(seed: int) -> List[ReportRow]:
    traces = _run("deep_linear", seed)
    ratios = [r for r in traces["momentum"].column("ratio") if r is not None]
    worst = max(ratios)
    at = {key: {row["t"]: row["residual"] for row in trace.rows}[200] for key, trace in traces.items()}
    passed = worst <= 1.0 and at["momentum"] < at["gd"]
    detail = f"residual(200): momentum={at['momentum']:.3e} gd={at['gd']:.3e}"
    return [_row("deep_linear_bound", passed, worst, 1.0, None, detail)]


def check_relu(seed: int) -> List[ReportRow]:
    traces = _run("relu_ntk", seed)
    loss_hb = traces["momentum"].last("loss")
    loss_gd = traces["gd"].last("loss")
    change = traces["momentum"].last("pattern_change")
    passed = loss_hb < loss_gd and change < 0.02
    kappas = traces["momentum"].metadata["kappa"]
    detail = (
        f"loss(T): momentum={loss_hb:.3e} gd={loss_gd:.3e}; "
        f"largest replicate pattern change {traces['momentum'].last('pattern_change_max'):.4f}; "
        f"kappa in [{min(kappas):.2f}, {max(kappas):.2f}]"
    )
    return [_row("relu_ntk", passed, change, 0.02, None, detail)]


def check_gauge_fw(seed: int) -> List[ReportRow]:
    trace = _run("gauge_fw_ball", seed)[""]
    meta = trace.metadata
    bound = 2.0 * 4.0 * meta["L"] * meta["gauge_star"] ** 2 / meta["lambda"]
    worst = max(trace.column("scaled_error"))
    return [_row("gauge_fw_rate", worst <= bound * 1.05, worst, bound, 0.05, "sup_T T^2 error")]


def check_boundary_fw(seed: int) -> List[ReportRow]:
    trace = _run("boundary_fw_ball", seed)[""]
    ratio = trace.last("error") / trace.last("envelope")
    off_boundary = max(abs(row["x_gauge"] - 1.0) for row in trace.rows if row["t"] >= 2)
    passed = ratio <= 10.0 and off_boundary <= 1e-6
    return [_row("boundary_fw", passed, ratio, 10.0, None, f"max |gauge - 1| = {off_boundary:.2e}")]


def check_nuclear(seed: int) -> List[ReportRow]:
    trace = _run("nuclear_completion", seed)[""]
    meta = trace.metadata
    ratio = trace.last("f_value") / meta["f_initial"]
    norm_ok = max(trace.column("nuclear_norm")) <= meta["radius"] + 1e-6
    psd_ok = min(trace.column("min_eigenvalue")) >= -1e-9 and max(trace.column("trace_error")) <= 1e-9
    detail = f"nuclear norm ok={norm_ok} spectrahedron ok={psd_ok}"
    return [_row("nuclear_completion", ratio <= 1e-2 and norm_ok and psd_ok, ratio, 1e-2, None, detail)]


def check_saddle_escape(seed: int) -> List[ReportRow]:
    summary = _run("saddle_beta_sweep", seed)["summary"]
    column = [c for c in summary.columns if c.startswith("first_below")][0]
    times = [math.inf if t is None else t for t in summary.column(column)]
    ordered = all(later <= earlier for earlier, later in zip(times, times[1:]))
    passed = ordered and times[-1] < times[0]
    detail = " ".join(f"beta={b:g}:{t}" for b, t in zip(summary.column("beta"), times))
    return [_row("saddle_escape_order", passed, times[-1], times[0], None, detail)]


def check_phase_retrieval(seed: int) -> List[ReportRow]:
    summary = _run("phase_retrieval", seed)["summary"]
    first = {row["beta"]: row for row in summary.rows}
    fast, slow = first[0.9], first[0.0]
    reach = fast["first_below_0.1"]
    cross_fast = math.inf if fast["first_below_0.5"] is None else fast["first_below_0.5"]
    cross_slow = math.inf if slow["first_below_0.5"] is None else slow["first_below_0.5"]
    passed = reach is not None and reach <= 100000 and cross_fast < cross_slow
    detail = f"crossing 0.5: beta=0.9 at {cross_fast}, beta=0 at {cross_slow}"
    return [_row("phase_retrieval", passed, reach, 100000, None, detail)]


def check_determinism(seed: int) -> List[ReportRow]:
    specs = [ExperimentSpec("fw_quadratic_ball", seed), ExperimentSpec("nuclear_completion", seed, {"T": 20})]
    identical = True
    with tempfile.TemporaryDirectory() as first_dir, tempfile.TemporaryDirectory() as second_dir:
        for spec in specs:
            first = run_experiment(spec, first_dir)
            second = run_experiment(spec, second_dir)
            for a, b in zip(first, second):
                identical = identical and a.read_bytes() == b.read_bytes()
    return [_row("determinism", identical, None, None, None, "repeated runs byte-identical")]


CheckFn = Callable[[int], List[ReportRow]]

SUITES: Dict[str, List[CheckFn]] = {
    "rates": [check_fw_rate, check_nesterov, check_accel_linear, check_regret],
    "equivalence": [check_equivalence],
    "momentum": [check_polyak, check_speedup, check_matrix_power, check_deep_linear, check_relu],
    "projection_free": [check_gauge_fw, check_boundary_fw, check_nuclear],
    "saddle": [check_saddle_escape, check_phase_retrieval],
}
SUITE_NAMES = tuple(SUITES) + ("all",)


def _evaluate(suite: str, check: CheckFn, seed: int) -> List[ReportRow]:
    try:
        rows = check(seed)
    except Exception as e:
        logger.exception("check %s raised", check.__name__)
        name = check.__name__.replace("check_", "")
        return [ReportRow(suite, name, False, None, None, None, f"{type(e).__name__}: {e}")]
    return [replace(row, suite=suite) for row in rows]


def verify(suite: str, seed: int = 0) -> Report:
    """
    Evaluate an acceptance suite.

    Failed or crashing checks become failed rows; ``all`` runs every suite
    and the determinism check.

    Raises:
        ValueError: If the suite name is empty or unknown
    """
    if not suite:
        raise ValueError(f"Suite name is empty. Valid suites: {', '.join(SUITE_NAMES)}")
    if suite not in SUITE_NAMES:
        raise ValueError(f"Unknown suite '{suite}'. Valid suites: {', '.join(SUITE_NAMES)}")
    names = list(SUITES) if suite == "all" else [suite]
    report = Report()
    for name in names:
        for check in SUITES[name]:
            logger.info("suite %s: %s", name, check.__name__)
            report.rows.extend(_evaluate(name, check, seed))
    if suite == "all":
        report.rows.extend(_evaluate("all", check_determinism, seed))
    return report
