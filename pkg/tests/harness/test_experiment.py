from zopdkit.harness.config import ExperimentConfig, preset
from zopdkit.harness.experiment import (
    build_setup,
    emit_figure_data,
    run_baselines,
    run_diagnostics,
    run_experiment,
)
from zopdkit.harness.trace_io import read_summary
from zopdkit.optimization.trace import IterRecord, RunTrace
from zopdkit.utils.exceptions import ConfigError, NumericalAbort
import numpy as np
import pytest


def synthetic_trace(n=6, pinned=True, window=2):
    trace = RunTrace(n_s=1, window=window)
    for k in range(1, n + 1):
        violation = [float(k % 2), -1.0] if pinned else [float(k % 2)]
        trace.append(
            IterRecord(
                iter=k,
                objective=2.0,
                sumrate=float(k),
                service=np.zeros(len(violation)),
                utility=np.zeros(0),
                violation=np.array(violation),
                lambda_s=np.zeros(0),
                lambda_r=np.ones(len(violation)),
                probes=3 * k,
            )
        )
    return trace


def small_awgn(**changes):
    settings = dict(n_users=2, hidden=(3,), gamma_lambda_r=(0.008,), n_iters=60, window=20, mc_n=1000)
    settings.update(changes)
    return preset("awgn").with_overrides(**settings)


# ============================================================================
# FIGURE DATA
# ============================================================================


def test_sumrate_figure():
    rows = emit_figure_data(synthetic_trace(), "sumrate")
    assert len(rows) == 18
    assert [name for _, name, _ in rows[::6]] == ["objective", "instantaneous", "ergodic"]
    ergodic = [value for _, name, value in rows if name == "ergodic"]
    np.testing.assert_allclose(ergodic, [1.0, 1.5, 2.5, 3.5, 4.5, 5.5])


def test_violation_figures():
    trace = synthetic_trace()
    rate = emit_figure_data(trace, "rate_violation", stride=2)
    assert {name for _, name, _ in rate} == {"instantaneous_0", "ergodic_0", "zero"}
    assert [it for it, name, _ in rate if name == "zero"] == [1, 3, 5]
    assert all(value == 0.0 for _, name, value in rate if name == "zero")

    power = emit_figure_data(trace, "power_violation")
    assert {name for _, name, _ in power} == {"instantaneous", "ergodic", "zero"}
    assert all(value == -1.0 for _, name, value in power if name == "instantaneous")


def test_window_one_ergodic_equals_instantaneous():
    rows = emit_figure_data(synthetic_trace(window=1), "rate_violation")
    instantaneous = [value for _, name, value in rows if name == "instantaneous_0"]
    ergodic = [value for _, name, value in rows if name == "ergodic_0"]
    assert instantaneous == ergodic


def test_figure_errors():
    with pytest.raises(ValueError):
        emit_figure_data(synthetic_trace(), "throughput")
    with pytest.raises(ValueError):
        emit_figure_data(synthetic_trace(), "sumrate", stride=0)
    with pytest.raises(ValueError):
        emit_figure_data(synthetic_trace(pinned=False), "power_violation")


# ============================================================================
# RUNS
# ============================================================================


def test_toy_run_writes_outputs(tmp_path):
    config = preset("toy").with_overrides(n_iters=200, window=50, figure_stride=1)
    result = run_experiment(config, tmp_path)
    names = sorted(path.name for path in result.files)
    assert names == ["rate_violation.csv", "summary.ini", "sumrate.csv", "trace.csv"]
    assert len(result.trace) == 200

    summary = read_summary(tmp_path / "summary.ini")
    assert summary["run"]["status"] == "completed"
    assert summary["run"]["iterations"] == "200"
    assert summary["run"]["seed"] == "0"
    assert int(summary["summary"]["probes"]) == 600
    assert summary["experiment"]["name"] == "toy"
    assert 0.0 <= result.summary["learned_sumrate"] <= 1.0
    assert "power_violation" not in result.summary

    trace_lines = (tmp_path / "trace.csv").read_text(encoding="utf-8").splitlines()
    assert trace_lines[0] == "# seed = 0"
    assert len(trace_lines) == 202
    sumrate_lines = (tmp_path / "sumrate.csv").read_text(encoding="utf-8").splitlines()
    assert len(sumrate_lines) == 1 + 3 * 200


def test_runs_are_byte_identical(tmp_path):
    config = small_awgn(n_iters=40)
    run_experiment(config, tmp_path / "a")
    run_experiment(config, tmp_path / "b")
    for name in ("trace.csv", "sumrate.csv", "power_violation.csv", "summary.ini"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_awgn_run_reports_baselines(tmp_path):
    result = run_experiment(small_awgn(), tmp_path)
    for key in (
        "uniform_sumrate",
        "clairvoyant_sumrate",
        "learned_policy_sumrate",
        "learned_policy_power",
        "power_violation",
        "weights",
    ):
        assert key in result.summary
    assert result.summary["clairvoyant_sumrate"] >= result.summary["uniform_sumrate"] - 1e-6
    assert (tmp_path / "power_violation.csv").exists()
    # figure rows are subsampled by figure_stride
    lines = (tmp_path / "sumrate.csv").read_text(encoding="utf-8").splitlines()
    assert len(lines) == 1 + 3 * 6


def test_baselines_command(tmp_path):
    estimates = run_baselines(small_awgn(), tmp_path)
    assert set(estimates) == {"uniform", "clairvoyant"}
    assert (tmp_path / "baselines.csv").read_text(encoding="utf-8").startswith("baseline,sumrate,")

    mai = preset("mai").with_overrides(n_users=2, hidden=(3,), gamma_lambda_r=(0.008,), mc_n=1000)
    estimates = run_baselines(mai, tmp_path / "mai")
    assert set(estimates) == {"uniform", "wmmse"}
    assert estimates["wmmse"].sumrate >= estimates["uniform"].sumrate
    assert estimates["wmmse"].power <= 20.0 * (1 + 1e-9)

    with pytest.raises(ConfigError):
        run_baselines(preset("toy"), tmp_path)


def test_setup_and_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        build_setup(preset("diag"))
    problem, setup = build_setup(small_awgn())
    assert setup is not None and problem.get_n_s() == 2
    with pytest.raises(ConfigError):
        run_experiment(preset("toy").with_overrides(n_iters=5, mu_r=0.0), tmp_path)


@pytest.mark.parametrize("name", ["awgn", "mai"])
@pytest.mark.parametrize("structure", ["per_user", "joint"])
def test_setup_follows_policy_structure(name, structure):
    config = preset(name).with_overrides(n_users=2, hidden=(3,), gamma_lambda_r=(0.008,), structure=structure)
    problem, _ = build_setup(config)
    assert problem.get_policy().get_structure() == structure
    n_inputs = 1 if structure == "per_user" else 2
    per_net = n_inputs * 3 + 3 + 3 * n_inputs + n_inputs
    assert problem.get_n_phi() == (2 * per_net if structure == "per_user" else per_net)


def test_structure_from_ini_reaches_the_policy():
    config = ExperimentConfig.from_ini_text("[experiment]\nname = awgn\n[policy]\nstructure = joint\n")
    problem, _ = build_setup(config)
    assert problem.get_policy().get_structure() == "joint"


def test_abort_writes_partial_outputs(tmp_path):
    config = preset("toy").with_overrides(n_iters=10, gamma_x=(float("inf"),), lambda0=(0.0,))
    with pytest.raises(NumericalAbort):
        run_experiment(config, tmp_path)
    summary = read_summary(tmp_path / "summary.ini")
    assert summary["run"]["status"] == "aborted"
    assert summary["summary"]["abort_iteration"] == "1"
    assert (tmp_path / "trace.csv").exists()


# ============================================================================
# DIAGNOSTICS
# ============================================================================


def test_diagnostics_pass_on_fixtures(tmp_path):
    result = run_diagnostics(preset("diag").with_overrides(sandwich_points=100), tmp_path)
    assert result.ok
    assert result.dual_convex
    assert set(result.sweeps) == {0.0, 2.0}
    assert set(result.sandwiches) == {"affine", "quadratic"}
    gap_lines = (tmp_path / "gap_report.csv").read_text(encoding="utf-8").splitlines()
    assert len(gap_lines) == 1 + 2 * 3
    assert gap_lines[0].startswith("problem,slack_scale,mu,d_star")
    assert (tmp_path / "sandwich.csv").exists()
