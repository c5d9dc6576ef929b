from zopdkit.channels.fading import FadingSampler
from zopdkit.core.problem import ErgodicProblem
from zopdkit.core.surrogate import SurrogateProblem, classify, feasibility_report, surrogate_slack
from zopdkit.data.problems import make_awgn_problem, make_linear_problem, make_tent_problem
from zopdkit.policy.simple_policies import IdentityPolicy
from zopdkit.smoothing.gaussian import SmoothingConfig
import numpy as np
import pytest


def test_surrogate_slack_examples():
    linear = make_linear_problem()
    assert np.all(surrogate_slack(SurrogateProblem(linear, SmoothingConfig(0.0, 0.1, 0.0))) == 0)
    assert np.all(surrogate_slack(SurrogateProblem(linear, SmoothingConfig(0.0, 0.0, 3.0))) == 0)

    wide = ErgodicProblem(
        objective=lambda x: float(x[0]),
        service=lambda p, h: np.array([p.sum()]),
        fading=FadingSampler.deterministic([1.0]),
        policy=IdentityPolicy(100),
        n_s=1,
    )
    slack = surrogate_slack(SurrogateProblem(wide, SmoothingConfig(0.0, 1e-2, 1.0)))
    np.testing.assert_allclose(slack, [0.1])


def test_surrogate_checks_slack_length():
    prob = make_awgn_problem(n_users=3, seed=0).problem
    SurrogateProblem(prob, SmoothingConfig(slack_scale=np.ones(4)))
    with pytest.raises(ValueError):
        SurrogateProblem(prob, SmoothingConfig(slack_scale=np.ones(2)))


def test_classify():
    statuses = classify(np.array([1.0, 0.05, -1.0, 0.0]), np.array([0.1, 0.1, 0.1, 0.0]), 3.0)
    assert statuses == ("strictly_feasible", "feasible", "violated", "feasible")


def test_linear_problem_report():
    surrogate = SurrogateProblem(make_linear_problem(p_max=2.0), SmoothingConfig(0.0, 0.1, 0.0))
    report = feasibility_report(surrogate, [0.5], [1.5], mc_samples=10)
    np.testing.assert_allclose(report.service_slack, [1.0])
    np.testing.assert_allclose(report.smoothed_slack, [1.0])
    assert report.service_status == ("strictly_feasible",)
    assert report.is_feasible()
    assert report.is_surrogate_feasible()

    violated = feasibility_report(surrogate, [1.0], [0.0], mc_samples=10)
    assert violated.service_status == ("violated",)
    assert not violated.is_feasible()


def test_unsmoothed_reports_agree():
    surrogate = SurrogateProblem(make_awgn_problem(n_users=2, seed=4).problem, SmoothingConfig())
    theta = np.zeros(surrogate.get_base().get_n_phi())
    report = feasibility_report(surrogate, [0.5, 0.5], theta, mc_samples=500, seed=3)
    np.testing.assert_allclose(report.smoothed_slack, report.service_slack)
    assert report.smoothed_status == report.service_status


def test_mc_report_is_seeded_and_leaves_sampler_alone():
    prob = make_awgn_problem(n_users=2, seed=4).problem
    surrogate = SurrogateProblem(prob, SmoothingConfig(0.0, 0.05, 0.0))
    theta = np.zeros(prob.get_n_phi())
    before = prob.get_fading().spawn(0).sample()
    first = feasibility_report(surrogate, [0.1, 0.1], theta, mc_samples=200, seed=7)
    second = feasibility_report(surrogate, [0.1, 0.1], theta, mc_samples=200, seed=7)
    np.testing.assert_array_equal(first.smoothed_slack, second.smoothed_slack)
    np.testing.assert_array_equal(prob.get_fading().spawn(0).sample(), before)
    # rates vary with the fading, the budget of a constant allocation does not
    assert np.all(first.service_slack_se[:2] > 0)
    assert first.service_slack_se[2] == 0.0


def test_report_counts_its_service_evaluations():
    prob = make_awgn_problem(n_users=2, hidden=(3,), seed=4).problem
    surrogate = SurrogateProblem(prob, SmoothingConfig(0.0, 0.05, 0.0))
    feasibility_report(surrogate, [0.1, 0.1], np.zeros(prob.get_n_phi()), mc_samples=50, seed=1)
    assert prob.get_probe_count() == 100

    tent = make_tent_problem()
    feasibility_report(SurrogateProblem(tent, SmoothingConfig(0.0, 0.1, 0.0)), [0.5], [0.5], mc_samples=50)
    assert tent.get_probe_count() == 0


def test_slacked_surrogate_feasibility_implies_feasibility():
    tent = make_tent_problem()
    mu_r = 0.1
    surrogate = SurrogateProblem(tent, SmoothingConfig(0.0, mu_r, 2.0))
    for x in np.linspace(0.0, 1.0, 11):
        for theta in np.linspace(-0.5, 1.5, 41):
            report = feasibility_report(surrogate, [x], [theta], mc_samples=1)
            if report.is_surrogate_feasible():
                assert report.is_feasible()


def test_invalid_report_arguments():
    surrogate = SurrogateProblem(make_linear_problem(), SmoothingConfig())
    with pytest.raises(ValueError):
        feasibility_report(surrogate, [0.5], [0.5], mc_samples=0)
    with pytest.raises(ValueError):
        feasibility_report(surrogate, [0.5, 0.5], [0.5], mc_samples=1)
