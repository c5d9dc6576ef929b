from zopdkit.harness.config import preset
from zopdkit.harness.experiment import run_experiment
import numpy as np
import pytest

pytestmark = pytest.mark.slow


def test_toy_reaches_optimum(tmp_path):
    result = run_experiment(preset("toy"), tmp_path)
    assert abs(result.summary["learned_sumrate"] - 1.0) <= 1e-2
    assert abs(result.trace.get_ergodic("objective", window=50_000)[-1] - 1.0) <= 1e-2


def test_awgn_reproduction(tmp_path):
    result = run_experiment(preset("awgn"), tmp_path)
    summary = result.summary
    assert summary["learned_sumrate"] >= 0.9 * summary["clairvoyant_sumrate"]
    assert summary["learned_sumrate"] >= summary["uniform_sumrate"]
    violation = result.trace.metrics.final_violation(0.1)
    assert np.all(np.abs(violation) <= 0.05)


def test_mai_reproduction(tmp_path):
    result = run_experiment(preset("mai"), tmp_path)
    summary = result.summary
    assert summary["learned_sumrate"] >= summary["uniform_sumrate"]
    assert summary["learned_sumrate"] >= 0.85 * summary["wmmse_sumrate"]
    assert abs(result.trace.metrics.final_violation(0.1)[-1]) <= 0.05
