from zopdkit.optimization.projections import positive_part, project_box
from zopdkit.optimization.trace import IterRecord, RunTrace, ergodic_average
from zopdkit.utils.exceptions import ZopdWarning
import numpy as np
import pytest


def record(k, objective=0.0, sumrate=0.0, violation=(0.0, 0.0), lambda_r=(1.0, 1.0)):
    return IterRecord(
        iter=k,
        objective=objective,
        sumrate=sumrate,
        service=np.zeros(len(violation)),
        utility=np.zeros(0),
        violation=np.asarray(violation, dtype=float),
        lambda_s=np.zeros(0),
        lambda_r=np.asarray(lambda_r, dtype=float),
        probes=3 * k,
    )


def test_ergodic_average_example():
    np.testing.assert_allclose(ergodic_average([0, 1, 0, 1], 2), [0.0, 0.5, 0.5, 0.5])


def test_ergodic_average_window_one_is_identity():
    series = np.array([3.0, -1.0, 2.5])
    np.testing.assert_array_equal(ergodic_average(series, 1), series)


def test_ergodic_average_columns_and_long_window():
    series = np.array([[1.0, 0.0], [3.0, 2.0], [5.0, 4.0]])
    with pytest.warns(ZopdWarning):
        averaged = ergodic_average(series, 10)
    np.testing.assert_allclose(averaged, [[1.0, 0.0], [2.0, 1.0], [3.0, 2.0]])
    with pytest.raises(ValueError):
        ergodic_average(series, 0)
    assert ergodic_average(np.zeros(0), 3).shape == (0,)


def test_projections():
    np.testing.assert_array_equal(project_box([-1.0, 0.5, 3.0], 0.0, [1.0, 1.0, 2.0]), [0.0, 0.5, 2.0])
    np.testing.assert_array_equal(project_box([5.0], 0.0, np.inf), [5.0])
    with pytest.raises(ValueError):
        project_box([0.0], 1.0, 0.0)
    np.testing.assert_array_equal(positive_part([-2.0, 0.0, 1.5]), [0.0, 0.0, 1.5])


def test_run_trace_columns():
    trace = RunTrace(n_s=1, window=2, seed=5)
    for k in range(1, 5):
        trace.append(record(k, objective=k, sumrate=k % 2, violation=(k % 2, -1.0)))
    assert len(trace) == 4
    np.testing.assert_array_equal(trace.get_column("iter"), [1, 2, 3, 4])
    np.testing.assert_allclose(trace.get_ergodic("sumrate"), [1.0, 0.5, 0.5, 0.5])
    assert trace.get_rate_violation().shape == (4, 1)
    np.testing.assert_array_equal(trace.get_budget_violation()[:, 0], [-1.0] * 4)
    assert trace.get_seed() == 5
    assert "seed=5" in repr(trace)
    with pytest.raises(ValueError):
        trace.get_column("multipliers")
    with pytest.raises(ValueError):
        trace.append(record(4))


def test_run_trace_metrics():
    trace = RunTrace(n_s=1, window=1)
    for k in range(1, 11):
        trace.append(record(k, objective=2.0, sumrate=float(k), violation=(0.5, 0.0), lambda_r=(2.0, 1.0)))
    metrics = trace.metrics
    assert metrics.final_sumrate() == 10.0
    assert metrics.final_sumrate(0.5) == pytest.approx(8.0)
    assert metrics.final_objective() == 2.0
    np.testing.assert_allclose(metrics.final_violation(), [0.5, 0.0])
    # λ_Rᵀ(f − x) = −λ_Rᵀ violation
    np.testing.assert_allclose(metrics.complementary_slackness(), np.full(10, -1.0))
    assert metrics.final_complementary_slackness() == pytest.approx(-1.0)
    with pytest.raises(ValueError):
        metrics.final_sumrate(0.0)
    with pytest.raises(ValueError):
        RunTrace(n_s=1).metrics.final_sumrate()


def test_final_state_attachment():
    trace = RunTrace(n_s=1)
    assert trace.get_final_state() is None
    trace.set_final_state("state")
    assert trace.get_final_state() == "state"
