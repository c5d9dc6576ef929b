from zopdkit.data.problems import (
    PROBLEM_BUILDERS,
    make_affine_fixture,
    make_awgn_problem,
    make_fixture,
    make_mai_problem,
    make_quadratic_fixture,
    make_tent_problem,
    resolve_weights,
)
from zopdkit.smoothing.gaussian import GaussianStream
import numpy as np
import pytest


# ============================================================================
# WEIGHTS
# ============================================================================


def test_resolve_weights():
    np.testing.assert_allclose(resolve_weights(None, 4, 0), np.full(4, 0.25))
    np.testing.assert_allclose(resolve_weights([1.0, 3.0], 2, 0), [0.25, 0.75])
    with pytest.raises(ValueError):
        resolve_weights("equal", 3, 0)


def test_random_weights_follow_the_seed():
    first = resolve_weights("random", 10, 7)
    np.testing.assert_array_equal(first, resolve_weights("random", 10, 7))
    assert not np.array_equal(first, resolve_weights("random", 10, 8))
    assert abs(first.sum() - 1.0) <= 1e-12


# ============================================================================
# WIRELESS PROGRAMS
# ============================================================================


def test_awgn_dimensions():
    setup = make_awgn_problem(n_users=4, hidden=(3,), seed=1)
    prob = setup.problem
    assert prob.get_n_s() == 4
    assert prob.get_n_service() == 5
    np.testing.assert_array_equal(prob.get_pinned(), [0.0])
    np.testing.assert_array_equal(prob.get_service_weights(), setup.params.weights)
    assert prob.get_n_phi() == prob.get_policy().get_theta_dim()
    assert prob.get_fading().get_dim() == 4
    assert setup.params.p_max == 20.0
    assert prob.get_lipschitz() is None


def test_objective_is_weighted_sum():
    setup = make_awgn_problem(n_users=3, weights=[1.0, 1.0, 2.0], seed=0)
    prob = setup.problem
    assert prob.objective(np.array([1.0, 2.0, 3.0])) == pytest.approx(0.25 + 0.5 + 1.5)
    np.testing.assert_allclose(prob.objective_grad(np.zeros(3)), [0.25, 0.25, 0.5])


def test_mai_uses_one_joint_network():
    awgn = make_awgn_problem(n_users=3, hidden=(4,), seed=0).problem
    mai = make_mai_problem(n_users=3, hidden=(4,), seed=0).problem
    # per-user: 3 × (1·4 + 4 + 4·1 + 1), joint: 3·4 + 4 + 4·3 + 3
    assert awgn.get_n_phi() == 39
    assert mai.get_n_phi() == 31


def test_wireless_builders_take_either_structure():
    awgn = make_awgn_problem(n_users=3, hidden=(4,), seed=0, structure="joint").problem
    mai = make_mai_problem(n_users=3, hidden=(4,), seed=0, structure="per_user").problem
    assert awgn.get_policy().get_structure() == "joint"
    assert awgn.get_n_phi() == 31
    assert mai.get_policy().get_structure() == "per_user"
    assert mai.get_n_phi() == 39
    with pytest.raises(ValueError):
        make_awgn_problem(n_users=3, structure="tree")


def test_same_seed_same_fading():
    first = make_awgn_problem(n_users=2, seed=5).problem.get_fading().sample_batch(4)
    second = make_awgn_problem(n_users=2, seed=5).problem.get_fading().sample_batch(4)
    np.testing.assert_array_equal(first, second)


# ============================================================================
# FIXTURES
# ============================================================================


def test_tent_closed_form():
    closed = make_tent_problem().get_closed_forms()
    np.testing.assert_allclose(closed.service_mean(np.array([0.3]), 0.0), [0.6])
    np.testing.assert_allclose(closed.service_mean(np.array([0.5]), 0.1), [1.0 - 0.2 * np.sqrt(2.0 / np.pi)])

    theta, mu = 0.3, 0.1
    u = GaussianStream(0).draw_batch(200_000, 1)[:, 0]
    samples = 1.0 - np.abs(2.0 * (theta + mu * u) - 1.0)
    se = samples.std() / np.sqrt(samples.size)
    assert abs(closed.service_mean(np.array([theta]), mu)[0] - samples.mean()) <= 5 * se


def test_quadratic_closed_form():
    prob = make_quadratic_fixture()
    closed = prob.get_closed_forms()
    x = np.array([0.2, 0.9])
    mu = 0.2
    directions = GaussianStream(1).draw_batch(20_000, 2)
    samples = np.array([prob.objective(x + mu * d) for d in directions])
    se = samples.std() / np.sqrt(samples.size)
    assert abs(closed.objective(x, mu) - samples.mean()) <= 5 * se
    np.testing.assert_allclose(closed.service_mean(np.array([0.5, 0.5]), mu), [1.0 - mu**2] * 2)


def test_affine_fixture_is_seeded():
    x = np.array([0.3, 0.7])
    assert make_fixture("affine", seed=3).objective(x) == make_affine_fixture(seed=3).objective(x)
    assert make_affine_fixture(seed=3).objective(x) != make_affine_fixture(seed=4).objective(x)
    closed = make_affine_fixture(seed=3).get_closed_forms()
    np.testing.assert_allclose(closed.utility(x, 0.5), make_affine_fixture(seed=3).utility(x))


def test_make_fixture():
    for name in PROBLEM_BUILDERS:
        assert make_fixture(name).get_name() == name
    with pytest.raises(ValueError):
        make_fixture("rayleigh")
