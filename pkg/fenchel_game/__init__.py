"""
Fenchel Game Optimization

A Python package that runs first-order optimization methods as two-player
Fenchel games between online learners, together with projection-free
methods, Polyak momentum and saddle-escaping stochastic momentum.

Run ``fenchel-game list`` for the bundled experiments.
"""

__version__ = "0.1.0"
__author__ = "Fenchel Game Developers"

from .dynamics import GameConfig, preset, reference_iterative, run_dynamics
from .experiments import ExperimentSpec, Report, run_experiment, verify
from .learners import LearnerSpec, build_learner
from .momentum import MomentumConfig, heavy_ball_run, tuned_params
from .oracles import (
    DivergenceError,
    FenchelGameError,
    L1Ball,
    L2Ball,
    NuclearBall,
    Objective,
    Simplex,
    Trace,
    Unconstrained,
    make_quadratic,
)
from .projection_free import boundary_fw, gauge_fw, nuclear_run
from .saddle import SaddleConfig, cnc_sgd_run

__all__ = [
    "DivergenceError",
    "ExperimentSpec",
    "FenchelGameError",
    "GameConfig",
    "L1Ball",
    "L2Ball",
    "LearnerSpec",
    "MomentumConfig",
    "NuclearBall",
    "Objective",
    "Report",
    "SaddleConfig",
    "Simplex",
    "Trace",
    "Unconstrained",
    "boundary_fw",
    "build_learner",
    "cnc_sgd_run",
    "gauge_fw",
    "heavy_ball_run",
    "make_quadratic",
    "nuclear_run",
    "preset",
    "reference_iterative",
    "run_dynamics",
    "run_experiment",
    "tuned_params",
    "verify",
]
