from zopdkit.policy.simple_policies import ClampPolicy, IdentityPolicy
import numpy as np
import pytest


def test_identity_policy_ignores_fading():
    policy = IdentityPolicy(2)
    theta = np.array([0.3, -4.0])
    np.testing.assert_array_equal(policy.forward(np.array([1.0, 5.0]), theta), theta)
    batch = policy.forward(np.ones((4, 2)), theta)
    assert batch.shape == (4, 2)
    np.testing.assert_array_equal(batch[3], theta)
    assert policy.theta_dim == 2


def test_clamp_policy():
    policy = ClampPolicy(3, 0.0, 1.0)
    out = policy.forward(np.ones(3), np.array([-0.5, 0.25, 2.0]))
    np.testing.assert_array_equal(out, [0.0, 0.25, 1.0])


def test_simple_policy_validation():
    with pytest.raises(ValueError):
        IdentityPolicy(0)
    with pytest.raises(ValueError):
        ClampPolicy(1, 1.0, 0.0)
    with pytest.raises(ValueError):
        IdentityPolicy(2).forward(np.ones(2), np.zeros(3))
