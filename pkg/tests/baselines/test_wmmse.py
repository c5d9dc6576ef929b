from zopdkit.baselines.wmmse import wmmse_powers, wmmse_rule, wmmse_solve
from zopdkit.channels.rates import ChannelParams, mai_rates
from zopdkit.utils.exceptions import ZopdWarning
import numpy as np
import pytest


def test_single_user_spends_the_budget():
    params = ChannelParams.create(1, p_max=20.0)
    result = wmmse_solve([1.0], params)
    np.testing.assert_allclose(result.powers, [20.0])
    assert result.sumrate == pytest.approx(np.log(21.0))
    assert result.converged


def test_zero_fading_gives_zero_powers():
    params = ChannelParams.create(3)
    result = wmmse_solve(np.zeros(3), params)
    np.testing.assert_array_equal(result.powers, np.zeros(3))
    assert result.sumrate == 0.0
    assert result.iterations == 0


def check_monotone_and_budget(n_draws):
    params = ChannelParams.create(5, p_max=20.0, weights=[0.1, 0.3, 0.2, 0.25, 0.15])
    rng = np.random.default_rng(5)
    for _ in range(n_draws):
        h = rng.exponential(2.0, size=5)
        result = wmmse_solve(h, params)
        assert np.all(np.diff(result.history) >= -1e-10)
        assert result.powers.sum() <= 20.0 * (1 + 1e-9)
        assert np.all(result.powers >= 0)
        # history starts at the uniform allocation
        assert result.sumrate >= result.history[0]
        assert result.sumrate == pytest.approx(float(mai_rates(h, result.powers, params) @ params.weights))


def test_history_is_monotone_and_respects_budget():
    check_monotone_and_budget(200)


@pytest.mark.slow
def test_history_is_monotone_over_a_thousand_draws():
    check_monotone_and_budget(1000)


def test_non_convergence_warns():
    params = ChannelParams.create(3)
    with pytest.warns(ZopdWarning):
        result = wmmse_solve([3.0, 0.2, 1.0], params, max_iters=1, tol=0.0)
    assert not result.converged
    assert result.iterations == 1


def test_rule_applies_per_state():
    params = ChannelParams.create(3)
    hs = np.random.default_rng(1).exponential(2.0, size=(4, 3))
    powers = wmmse_rule(params)(hs)
    assert powers.shape == (4, 3)
    np.testing.assert_allclose(powers[2], wmmse_powers(hs[2], params))


def test_wmmse_validation():
    params = ChannelParams.create(2)
    with pytest.raises(ValueError):
        wmmse_solve([1.0], params)
    with pytest.raises(ValueError):
        wmmse_solve([1.0, -1.0], params)
    with pytest.raises(ValueError):
        wmmse_solve([1.0, 1.0], params, max_iters=0)


def test_never_worse_than_a_single_user():
    params = ChannelParams.create(3, p_max=20.0)
    rng = np.random.default_rng(8)
    for _ in range(100):
        h = rng.exponential(2.0, size=3)
        result = wmmse_solve(h, params)
        for i in range(3):
            single = np.zeros(3)
            single[i] = 20.0
            assert result.sumrate >= float(mai_rates(h, single, params) @ params.weights) - 1e-12


def test_strong_interference_concentrates_power():
    params = ChannelParams.create(2, p_max=20.0)
    h = np.array([50.0, 50.0])
    result = wmmse_solve(h, params)
    equal_split = float(mai_rates(h, np.array([10.0, 10.0]), params) @ params.weights)
    assert result.sumrate >= equal_split
    assert result.powers.max() >= 0.9 * 20.0


def test_two_users_close_to_grid_optimum():
    params = ChannelParams.create(2, p_max=20.0, weights=[0.4, 0.6])
    rng = np.random.default_rng(21)
    # optimal allocations spend the whole budget
    p1 = np.linspace(0.0, 20.0, 1001)
    grid = np.stack([p1, 20.0 - p1], axis=1)
    close = 0
    for _ in range(1000):
        h = rng.exponential(2.0, size=2)
        best = float(np.max(mai_rates(np.broadcast_to(h, grid.shape), grid, params) @ params.weights))
        if wmmse_solve(h, params).sumrate >= 0.99 * best:
            close += 1
    assert close >= 950
