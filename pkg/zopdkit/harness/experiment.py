from __future__ import annotations

import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

import numpy as np
from numpy.typing import NDArray

from ..analysis.duality_diag import (
    GapSweep,
    SandwichReport,
    check_dual_convexity,
    check_sandwich,
    dual_gap_sweep,
)
from ..baselines.evaluation import ErgodicEstimate, ergodic_eval, policy_rule, uniform_policy
from ..baselines.waterfilling import clairvoyant_awgn
from ..baselines.wmmse import wmmse_rule
from ..core.problem import ErgodicProblem
from ..data.problems import (
    WirelessSetup,
    make_affine_fixture,
    make_awgn_problem,
    make_mai_problem,
    make_quadratic_fixture,
    make_tent_problem,
    make_toy_problem,
)
from ..optimization.primal_dual import PdState, run
from ..optimization.trace import RunTrace, ergodic_average
from ..smoothing.gaussian import SmoothingConfig
from ..utils.exceptions import ConfigError, NumericalAbort
from ..utils.seeding import seed_everything
from .config import WIRELESS, ExperimentConfig
from .trace_io import write_figure_csv, write_rows, write_summary, write_trace_csv

logger = logging.getLogger(__name__)

"""
Experiment orchestration behind the ``zopd`` commands.

``run_experiment`` builds the program of a configuration, learns it with the
primal-dual method, evaluates the baselines and the learned policy on common
fading samples and writes the trace, figure data and a summary. The
``run_baselines`` and ``run_diagnostics`` entry points back ``zopd
baselines`` and ``zopd diag``.
"""

FIGURES = ["sumrate", "rate_violation", "power_violation"]
FINAL_FRACTION = 0.1

PathLike = Union[str, Path]


# ============================================================================
# SETUP
# ============================================================================


def build_setup(config: ExperimentConfig) -> tuple[ErgodicProblem, Optional[WirelessSetup]]:
    """Program of a configuration, with the channel model for wireless runs.

    Raises:
        ConfigError: For the ``diag`` experiment, which has no single program.
    """
    if config.name in WIRELESS:
        builder = make_awgn_problem if config.name == "awgn" else make_mai_problem
        setup = builder(
            n_users=config.n_users,
            p_max=config.p_max,
            noise=np.asarray(config.noise),
            weights=config.weights_setting(),
            hidden=config.hidden,
            rate=config.fading_rate,
            seed=config.seed,
            structure=config.structure,
        )
        return setup.problem, setup
    if config.name == "toy":
        return make_toy_problem(), None
    raise ConfigError("experiment.name", f"{config.name!r} is run by the diag command")


def initial_state(config: ExperimentConfig, problem: ErgodicProblem) -> PdState:
    rng = seed_everything(config.seed).generator("policy_init")
    theta0 = problem.get_policy().initial_theta(config.init, rng)
    return PdState.initial(problem, np.asarray(config.x0), theta0, np.asarray(config.lambda0))


# ============================================================================
# BASELINES
# ============================================================================


def evaluate_baselines(config: ExperimentConfig, setup: WirelessSetup) -> dict[str, ErgodicEstimate]:
    """Uniform allocation plus the clairvoyant (AWGN) or WMMSE (MAI) rule.

    Every rule is evaluated on the same ``baseline_mc`` fading samples.
    """
    seed = seed_everything(config.seed).baseline_mc
    fading = setup.problem.get_fading()
    rules = {"uniform": uniform_policy(setup.params)}
    if config.name == "awgn":
        rules["clairvoyant"] = clairvoyant_awgn(setup.params, fading, config.mc_n, seed=seed).powers
    else:
        rules["wmmse"] = wmmse_rule(setup.params)
    estimates = {}
    for name, rule in rules.items():
        estimates[name] = ergodic_eval(rule, setup.rates_fn, setup.params, fading, config.mc_n, seed)
        logger.info(
            "Baseline %s: sumrate=%.6g power=%.6g", name, estimates[name].sumrate, estimates[name].power
        )
    return estimates


def run_baselines(
    config: ExperimentConfig, out_dir: Optional[PathLike] = None
) -> dict[str, ErgodicEstimate]:
    """Evaluate the baselines of a wireless configuration and write ``baselines.csv``.

    Raises:
        ConfigError: If the experiment is not a wireless one.
    """
    if config.name not in WIRELESS:
        raise ConfigError("experiment.name", "baselines exist only for awgn and mai")
    _, setup = build_setup(config)
    assert setup is not None
    estimates = evaluate_baselines(config, setup)
    out = Path(out_dir if out_dir is not None else config.out_dir)
    write_rows(
        out / "baselines.csv",
        ["baseline", "sumrate", "sumrate_se", "power", "power_se", "n"],
        [[name, e.sumrate, e.sumrate_se, e.power, e.power_se, e.n] for name, e in estimates.items()],
    )
    return estimates


# ============================================================================
# FIGURE DATA
# ============================================================================


def emit_figure_data(trace: RunTrace, which: str, stride: int = 1) -> list[tuple[int, str, float]]:
    """Long-format rows (iter, series, value) of one figure.

    Options:
        - "sumrate": objective, instantaneous and ergodic weighted sumrate
        - "rate_violation": instantaneous_<i> and ergodic_<i> per user, zero
        - "power_violation": instantaneous and ergodic budget violation, zero

    Raises:
        ValueError: If the figure is unknown, the stride is below 1, or the
            trace has no budget constraint for "power_violation".
    """
    if which not in FIGURES:
        raise ValueError(f"Unknown figure: {which}")
    if stride < 1:
        raise ValueError("stride must be at least 1")

    series: dict[str, NDArray[np.float64]] = {}
    if which == "sumrate":
        series["objective"] = trace.get_column("objective")
        series["instantaneous"] = trace.get_column("sumrate")
        series["ergodic"] = trace.get_ergodic("sumrate")
    else:
        window = trace.get_window()
        if which == "rate_violation":
            instantaneous = trace.get_rate_violation()
        else:
            instantaneous = trace.get_budget_violation()
            if instantaneous.shape[1] == 0:
                raise ValueError("trace has no budget constraint")
        ergodic = ergodic_average(instantaneous, window)
        if which == "power_violation":
            series["instantaneous"] = instantaneous[:, 0]
            series["ergodic"] = ergodic[:, 0]
        else:
            for i in range(instantaneous.shape[1]):
                series[f"instantaneous_{i}"] = instantaneous[:, i]
            for i in range(instantaneous.shape[1]):
                series[f"ergodic_{i}"] = ergodic[:, i]
        series["zero"] = np.zeros(len(trace))

    iters = trace.get_column("iter").astype(np.int64)
    keep = np.arange(0, len(trace), stride)
    return [(int(iters[k]), name, float(values[k])) for name, values in series.items() for k in keep]


# ============================================================================
# RUN
# ============================================================================


@dataclass(eq=False)
class ExperimentResult:
    """Trace, summary statistics and written files of one run."""

    config: ExperimentConfig
    trace: RunTrace
    summary: dict[str, Any]
    out_dir: Path
    files: list[Path] = field(default_factory=list)


def _join(values: Any) -> str:
    return ", ".join(repr(float(v)) for v in np.atleast_1d(values))


def _write_outputs(
    config: ExperimentConfig,
    trace: RunTrace,
    out: Path,
    status: str,
    summary: dict[str, Any],
) -> list[Path]:
    files = [write_trace_csv(trace, out / "trace.csv")]
    if len(trace):
        figures = ["sumrate", "rate_violation"]
        if trace.get_budget_violation().shape[1]:
            figures.append("power_violation")
        for which in figures:
            rows = emit_figure_data(trace, which, config.figure_stride)
            files.append(write_figure_csv(rows, out / f"{which}.csv"))
    run_section = {
        "experiment": config.name,
        "seed": config.seed,
        "iterations": len(trace),
        "status": status,
    }
    files.append(write_summary(out / "summary.ini", run_section, summary, config.to_ini_text()))
    return files


def summarize(trace: RunTrace, problem: ErgodicProblem) -> dict[str, Any]:
    """Final-window statistics of a trace."""
    metrics = trace.metrics
    violation = metrics.final_violation(FINAL_FRACTION)
    n_s = trace.get_n_s()
    summary: dict[str, Any] = {
        "learned_sumrate": metrics.final_sumrate(FINAL_FRACTION),
        "final_ergodic_sumrate": float(trace.get_ergodic("sumrate")[-1]),
        "final_objective": metrics.final_objective(FINAL_FRACTION),
        "rate_violation": _join(violation[:n_s]),
        "max_abs_violation": float(np.max(np.abs(violation))),
        "complementary_slackness": metrics.final_complementary_slackness(FINAL_FRACTION),
        "weights": _join(problem.get_service_weights()),
        "probes": int(trace.get_column("probes")[-1]),
    }
    if violation.shape[0] > n_s:
        summary["power_violation"] = _join(violation[n_s:])
    return summary


def run_experiment(
    config: ExperimentConfig, out_dir: Optional[PathLike] = None, progress: bool = False
) -> ExperimentResult:
    """Learn the program of ``config`` and write its outputs.

    Writes ``trace.csv``, ``sumrate.csv``, ``rate_violation.csv``,
    ``power_violation.csv`` (budgeted programs only) and ``summary.ini`` to
    ``out_dir`` (default: ``config.out_dir``).

    Args:
        config (ExperimentConfig): Validated configuration.
        out_dir (Optional[PathLike]): Output directory override.
        progress (bool, optional): Show a progress bar. Defaults to False.

    Raises:
        ConfigError: If the configuration does not describe a learnable program.
        NumericalAbort: If the run diverges; the partial trace and a summary
            with status ``aborted`` are written first.

    Returns:
        ExperimentResult: Trace, summary and written files.
    """
    out = Path(out_dir if out_dir is not None else config.out_dir)
    problem, setup = build_setup(config)
    try:
        initial = initial_state(config, problem)
        trace = run(
            problem,
            config.step_sizes(),
            config.smoothing(),
            config.n_iters,
            config.seed,
            initial,
            window=config.window,
            progress=progress,
            log_every=config.log_every,
        )
    except NumericalAbort as exc:
        partial = exc.partial_trace
        if isinstance(partial, RunTrace):
            summary = summarize(partial, problem) if len(partial) else {}
            summary["abort_iteration"] = exc.iteration
            _write_outputs(config, partial, out, "aborted", summary)
        raise
    except ValueError as exc:
        raise ConfigError("config", str(exc)) from exc

    summary = summarize(trace, problem)
    if setup is not None:
        baselines = evaluate_baselines(config, setup)
        final_state = trace.get_final_state()
        learned = ergodic_eval(
            policy_rule(problem.get_policy(), final_state.theta),
            setup.rates_fn,
            setup.params,
            problem.get_fading(),
            config.mc_n,
            seed_everything(config.seed).baseline_mc,
        )
        summary["learned_policy_sumrate"] = learned.sumrate
        summary["learned_policy_power"] = learned.power
        for name, estimate in baselines.items():
            summary[f"{name}_sumrate"] = estimate.sumrate
            summary[f"{name}_power"] = estimate.power

    files = _write_outputs(config, trace, out, "completed", summary)
    logger.info(
        "Run %s (seed %d) finished: learned sumrate %.6g",
        config.name, config.seed, summary["learned_sumrate"],
    )
    return ExperimentResult(config, trace, summary, out, files)


# ============================================================================
# DIAGNOSTICS
# ============================================================================


@dataclass(eq=False)
class DiagnosticsResult:
    """Gap sweeps (by slack constant) and sandwich reports (by fixture)."""

    sweeps: dict[float, GapSweep]
    sandwiches: dict[str, SandwichReport]
    dual_convex: bool
    ok: bool
    files: list[Path] = field(default_factory=list)


def run_diagnostics(
    config: ExperimentConfig, out_dir: Optional[PathLike] = None
) -> DiagnosticsResult:
    """Duality-gap and Lagrangian-sandwich checks on the scalar fixtures.

    The gap is swept over ``config.mus`` on the tent program with slack
    constant 0 and with the program's c_R; the sandwich is checked on the
    affine and quadratic fixtures at ``config.smoothing()``. The run passes
    when every bracket holds, the unsmoothed gap scales linearly in μ
    (R² ≥ 0.9), the slacked gap is nonpositive, the dual is convex on the
    grid and no sandwich point fails.
    """
    out = Path(out_dir if out_dir is not None else config.out_dir)
    tent = make_tent_problem()
    c_r = float(np.max(tent.get_lipschitz().c_r))  # type: ignore[union-attr]
    lambda_grid = np.linspace(0.0, config.lambda_max, 41)
    inner_grid = (np.linspace(0.0, 2.0, 201), np.arange(0, 201) / 200.0)

    sweeps = {
        scale: dual_gap_sweep(
            tent, SmoothingConfig(slack_scale=scale), config.mus, lambda_grid, inner_grid, seed=config.seed
        )
        for scale in (0.0, c_r)
    }
    dual_convex, _ = check_dual_convexity(sweeps[0.0].reports[0].unsmoothed)

    smoothing = config.smoothing()
    sandwiches = {
        name: check_sandwich(
            fixture,
            smoothing,
            n_points=config.sandwich_points,
            seed=config.seed,
            lambda_max=config.lambda_max,
        )
        for name, fixture in (
            ("affine", make_affine_fixture(seed=config.seed)),
            ("quadratic", make_quadratic_fixture()),
        )
    }

    ok = (
        all(sweep.all_bracketed() for sweep in sweeps.values())
        and sweeps[0.0].fit.r_squared >= 0.9
        and bool(np.all(sweeps[c_r].gaps <= sweeps[c_r].reports[0].tolerance))
        and dual_convex
        and all(report.ok for report in sandwiches.values())
    )

    gap_rows = []
    for scale, sweep in sweeps.items():
        for mu, report in zip(sweep.mus, sweep.reports):
            gap_rows.append([
                "tent", scale, mu, report.d_star, report.d_mu_star, report.gap,
                report.gamma_l, report.gamma_r, report.sandwich_ok, sweep.fit.slope, sweep.fit.r_squared,
            ])
    files = [
        write_rows(
            out / "gap_report.csv",
            ["problem", "slack_scale", "mu", "d_star", "d_mu_star", "gap", "gamma_l", "gamma_r",
             "bracketed", "fit_slope", "fit_r_squared"],
            gap_rows,
        ),
        write_rows(
            out / "sandwich.csv",
            ["problem", "n_points", "n_violations", "worst_margin", "ok"],
            [[name, r.n_points, r.n_violations, r.worst_margin, r.ok] for name, r in sandwiches.items()],
        ),
    ]
    if ok:
        logger.info("Duality diagnostics passed")
    else:
        logger.error("Duality diagnostics failed; see %s", out)
    return DiagnosticsResult(sweeps, sandwiches, dual_convex, ok, files)
