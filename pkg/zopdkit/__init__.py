# Import main classes and functions for flat API
from .core.problem import ErgodicProblem, LipschitzMeta, AnalyticSmoothing, probe_service
from .core.surrogate import SurrogateProblem, feasibility_report, surrogate_slack
from .smoothing.gaussian import GaussianStream, SmoothingConfig
from .smoothing.estimators import (
    finite_diff,
    zo_grad_sample,
    mc_smoothed_value,
    mc_zo_gradient,
    check_smoothing_direction,
)
from .policy.dnn_policy import DnnPolicy, LayerSpec, forward, theta_dim
from .policy.simple_policies import ClampPolicy, IdentityPolicy
from .channels.fading import FadingSampler
from .channels.rates import ChannelParams, awgn_rates, mai_rates
from .optimization.primal_dual import PdState, StepSizes, step, run
from .optimization.trace import RunTrace, ergodic_average
from .baselines.waterfilling import clairvoyant_awgn
from .baselines.wmmse import wmmse_solve, wmmse_powers
from .baselines.evaluation import uniform_policy, ergodic_eval
from .analysis import duality_diag
from .data.problems import (
    make_awgn_problem,
    make_mai_problem,
    make_toy_problem,
    make_fixture,
)
from .harness.config import ExperimentConfig, preset
from .harness.experiment import run_experiment, emit_figure_data
from .utils.seeding import seed_everything
from .utils.exceptions import ConfigError, NumericalAbort, ServiceEvaluationError, ZopdWarning
from ._version import __version__



__all__ = [
    # Main classes
    "ErgodicProblem",
    "SurrogateProblem",
    "LipschitzMeta",
    "AnalyticSmoothing",
    "DnnPolicy",
    "LayerSpec",
    "ClampPolicy",
    "IdentityPolicy",
    "FadingSampler",
    "ChannelParams",
    # Smoothing functions
    "GaussianStream",
    "SmoothingConfig",
    "finite_diff",
    "zo_grad_sample",
    "mc_smoothed_value",
    "mc_zo_gradient",
    "check_smoothing_direction",
    # Problem and policy functions
    "probe_service",
    "surrogate_slack",
    "feasibility_report",
    "forward",
    "theta_dim",
    "awgn_rates",
    "mai_rates",
    # Primal-dual learning
    "PdState",
    "StepSizes",
    "step",
    "run",
    "RunTrace",
    "ergodic_average",
    # Baselines
    "clairvoyant_awgn",
    "wmmse_solve",
    "wmmse_powers",
    "uniform_policy",
    "ergodic_eval",
    # Diagnostics
    "duality_diag",
    # Problem builders
    "make_awgn_problem",
    "make_mai_problem",
    "make_toy_problem",
    "make_fixture",
    # Harness
    "ExperimentConfig",
    "preset",
    "run_experiment",
    "emit_figure_data",
    "seed_everything",
    # Exceptions and warnings
    "ConfigError",
    "NumericalAbort",
    "ServiceEvaluationError",
    "ZopdWarning",
    # Version
    "__version__",
]
