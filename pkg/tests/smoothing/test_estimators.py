from zopdkit.smoothing.estimators import (
    check_smoothing_direction,
    evaluate_pair,
    finite_diff,
    mc_smoothed_estimate,
    mc_smoothed_value,
    mc_zo_gradient,
    vector_finite_diff,
    zo_grad_sample,
)
from zopdkit.smoothing.gaussian import GaussianDraw, GaussianStream
import numpy as np
import pytest
from scipy.stats import norm


def squared_norm(x):
    return float(np.sum(x**2))


class CountingFunction:
    def __init__(self, f):
        self.f = f
        self.calls = 0

    def __call__(self, x):
        self.calls += 1
        return self.f(x)


# ============================================================================
# FINITE DIFFERENCES
# ============================================================================


def test_finite_diff_of_affine_function_is_exact():
    a = np.array([1.5, -2.0, 0.25])
    u = GaussianStream(3).draw(3)
    for mu in (1e-3, 0.1, 2.0):
        value = finite_diff(lambda x: float(a @ x + 4.0), np.array([0.3, 1.0, -2.0]), mu, u)
        assert value == pytest.approx(float(a @ u.values), abs=1e-9)


def test_finite_diff_of_constant_is_zero():
    u = GaussianStream(0).draw(5)
    assert finite_diff(lambda x: 7.0, np.zeros(5), 0.1, u) == 0.0


def test_finite_diff_of_quadratic_at_origin():
    u = GaussianStream(11).draw(4)
    expected = (squared_norm(u.values) - 0.0) / 1.0
    assert finite_diff(squared_norm, np.zeros(4), 1.0, u) == pytest.approx(expected, rel=1e-14)


def test_finite_diff_uses_two_evaluations():
    f = CountingFunction(squared_norm)
    finite_diff(f, np.ones(3), 0.5, GaussianStream(1).draw(3))
    assert f.calls == 2


def test_finite_diff_rejects_zero_mu_and_bad_dimension():
    u = GaussianDraw.from_values([1.0, 2.0])
    with pytest.raises(ValueError, match="smoothing parameter must be positive"):
        finite_diff(squared_norm, np.zeros(2), 0.0, u)
    with pytest.raises(ValueError):
        finite_diff(squared_norm, np.zeros(3), 0.1, u)


def test_zo_grad_sample_with_zero_direction():
    sample = zo_grad_sample(squared_norm, np.array([1.0, 2.0]), 0.3, GaussianDraw.zeros(2))
    np.testing.assert_array_equal(sample, np.zeros(2))


def test_vector_finite_diff_of_linear_map():
    a = np.array([[1.0, 2.0], [-1.0, 0.5], [0.0, 3.0]])
    u = GaussianStream(5).draw(2)
    result = vector_finite_diff(lambda x: a @ x, np.array([0.2, -0.7]), 0.01, u)
    np.testing.assert_allclose(result, a @ u.values, atol=1e-10)


def test_vector_finite_diff_matches_scalar_calls():
    components = [
        lambda x: float(x[0] ** 3 - 2.0 * x[1]),
        lambda x: float(x[0] * x[1] + 1.0),
        lambda x: float(x[1] ** 2),
    ]
    x = np.array([0.4, -1.2])
    u = GaussianStream(9).draw(2)
    stacked = vector_finite_diff(lambda z: np.array([c(z) for c in components]), x, 0.05, u)
    for i, component in enumerate(components):
        assert stacked[i] == finite_diff(component, x, 0.05, u)

    duplicated = vector_finite_diff(lambda z: np.array([squared_norm(z)] * 2), x, 0.05, u)
    assert duplicated[0] == duplicated[1] == finite_diff(squared_norm, x, 0.05, u)


def test_evaluate_pair_keeps_both_values():
    u = GaussianDraw.from_values([1.0])
    pair = evaluate_pair(lambda x: 2.0 * x, np.array([3.0]), 0.5, u)
    np.testing.assert_array_equal(pair.base, [6.0])
    np.testing.assert_array_equal(pair.shifted, [7.0])
    np.testing.assert_array_equal(pair.quotient, [2.0])


# ============================================================================
# MONTE CARLO
# ============================================================================


def test_mc_smoothed_value_without_smoothing_is_exact():
    f = CountingFunction(squared_norm)
    assert mc_smoothed_value(f, np.array([1.0, 2.0]), 0.0, 1000, GaussianStream(0)) == 5.0
    assert f.calls == 1


@pytest.mark.parametrize("mu", [0.1, 0.5, 1.0])
def test_mc_smoothed_quadratic(mu):
    x = np.array([0.5, -1.0, 2.0, 0.0])
    estimate = mc_smoothed_estimate(squared_norm, x, mu, 100_000, GaussianStream(123))
    expected = squared_norm(x) + mu**2 * 4
    assert abs(estimate.value - expected) <= 4 * float(estimate.std_error)


def test_mc_smoothed_affine_is_unbiased():
    a = np.array([1.0, -3.0])
    estimate = mc_smoothed_estimate(lambda x: float(a @ x), np.array([2.0, 1.0]), 0.7, 20_000, GaussianStream(4))
    assert abs(estimate.value - (-1.0)) <= 4 * float(estimate.std_error)


def test_mc_smoothed_value_rejects_bad_arguments():
    with pytest.raises(ValueError):
        mc_smoothed_value(squared_norm, np.zeros(2), 0.1, 0, GaussianStream(0))
    with pytest.raises(ValueError):
        mc_smoothed_value(squared_norm, np.zeros(2), -0.1, 10, GaussianStream(0))


def test_mc_smoothed_value_is_deterministic():
    x = np.array([0.1, 0.2, 0.3])
    first = mc_smoothed_value(squared_norm, x, 0.3, 500, GaussianStream(77))
    second = mc_smoothed_value(squared_norm, x, 0.3, 500, GaussianStream(77))
    assert first == second


@pytest.mark.parametrize("lipschitz", [1.0, 3.0])
@pytest.mark.parametrize("dim", [2, 10])
def test_value_bound_for_lipschitz_norm(lipschitz, dim):
    mu = 0.2
    rng = np.random.default_rng(dim)

    def f(x):
        return lipschitz * float(np.linalg.norm(x))

    stream = GaussianStream(dim * 10 + int(lipschitz))
    for x in rng.uniform(-2.0, 2.0, size=(100, dim)):
        estimate = mc_smoothed_estimate(f, x, mu, 500, stream)
        assert abs(estimate.value - f(x)) <= mu * lipschitz * np.sqrt(dim) + 4 * float(estimate.std_error)


@pytest.mark.parametrize("lipschitz", [1.0, 3.0])
@pytest.mark.parametrize("dim", [2, 10])
def test_second_moment_bound_for_lipschitz_norm(lipschitz, dim):
    stream = GaussianStream(dim + 100)

    def f(x):
        return lipschitz * float(np.linalg.norm(x))

    x = np.linspace(-1.0, 1.0, dim)
    norms = [
        float(np.sum(zo_grad_sample(f, x, 0.1, stream.draw(dim)) ** 2)) for _ in range(20_000)
    ]
    assert np.mean(norms) <= 1.05 * lipschitz**2 * (dim + 4) ** 2


def test_zo_gradient_of_quadratic_is_unbiased():
    x = np.array([0.5, -1.0, 2.0, 0.0])
    estimate = mc_zo_gradient(squared_norm, x, 0.1, 100_000, GaussianStream(2024))
    assert np.all(np.abs(estimate.mean - 2 * x) <= 5 * estimate.std_error)


def test_zo_gradient_of_affine_is_unbiased():
    a = np.array([2.0, -1.0, 0.5])
    estimate = mc_zo_gradient(lambda x: float(a @ x), np.zeros(3), 0.5, 20_000, GaussianStream(8))
    assert np.all(np.abs(estimate.mean - a) <= 5 * estimate.std_error)


def test_zo_gradient_of_absolute_value_matches_smoothed_derivative():
    # d/dx E|x + μU| = 1 − 2Φ(−x/μ)
    mu, x = 0.5, 0.3
    exact = 1.0 - 2.0 * norm.cdf(-x / mu)
    absolute = lambda z: float(abs(z[0]))
    estimate = mc_zo_gradient(absolute, [x], mu, 100_000, GaussianStream(11))
    assert abs(estimate.mean[0] - exact) <= 5 * estimate.std_error[0]

    delta = 1e-3
    upper = mc_smoothed_value(absolute, [x + delta], mu, 200_000, GaussianStream(12))
    lower = mc_smoothed_value(absolute, [x - delta], mu, 200_000, GaussianStream(12))
    central = (upper - lower) / (2 * delta)
    assert central == pytest.approx(exact, abs=0.015)
    assert abs(estimate.mean[0] - central) <= 5 * estimate.std_error[0] + 0.015


def test_check_smoothing_direction():
    x = np.array([1.0, -1.0, 0.5, 0.0])
    assert check_smoothing_direction(squared_norm, x, 0.5, 10_000, GaussianStream(1), "convex")
    assert check_smoothing_direction(lambda z: -squared_norm(z), x, 0.5, 10_000, GaussianStream(1), "concave")
    assert not check_smoothing_direction(squared_norm, x, 0.5, 10_000, GaussianStream(1), "concave")
    with pytest.raises(ValueError):
        check_smoothing_direction(squared_norm, x, 0.5, 10, GaussianStream(1), "linear")
