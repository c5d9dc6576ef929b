from zopdkit.baselines.evaluation import ergodic_eval, uniform_policy
from zopdkit.baselines.waterfilling import clairvoyant_awgn, waterfilling_powers
from zopdkit.channels.fading import FadingSampler
from zopdkit.channels.rates import ChannelParams, awgn_rates
from zopdkit.utils.exceptions import ZopdWarning
import numpy as np
import pytest


def test_single_user_unit_budget():
    params = ChannelParams.create(1, p_max=1.0)
    solution = clairvoyant_awgn(params, FadingSampler.deterministic([1.0]), mc_n=1000)
    assert solution.binding
    assert solution.lambda_star == pytest.approx(0.5, rel=1e-6)
    np.testing.assert_allclose(solution.powers([1.0]), [1.0], atol=1e-6)
    assert solution.ergodic_sumrate.value == pytest.approx(np.log(2.0), abs=1e-6)
    assert solution.ergodic_power.value == pytest.approx(1.0, abs=1e-6)


def test_symmetric_users_share_equally():
    params = ChannelParams.create(2, p_max=2.0)
    solution = clairvoyant_awgn(params, FadingSampler.deterministic([1.0, 1.0]), mc_n=1000)
    powers = solution([1.0, 1.0])
    assert powers[0] == pytest.approx(powers[1])
    assert powers.sum() == pytest.approx(2.0, abs=1e-6)


def test_zero_fading_gets_no_power():
    params = ChannelParams.create(3, p_max=3.0)
    powers = waterfilling_powers([0.0, 2.0, 0.0], 0.1, params, cap=100.0)
    assert powers[0] == 0.0
    assert powers[2] == 0.0
    assert powers[1] == pytest.approx(1.0 / 3.0 / 0.1 - 0.5)
    np.testing.assert_array_equal(waterfilling_powers([0.0, 1.0, 1.0], 0.0, params, cap=5.0), [0.0, 5.0, 5.0])


def test_batch_powers_match_single_states():
    params = ChannelParams.create(3)
    hs = np.array([[0.5, 1.0, 2.0], [3.0, 0.1, 0.0]])
    batch = waterfilling_powers(hs, 0.05, params, cap=1e4)
    for row, h in zip(batch, hs):
        np.testing.assert_allclose(row, waterfilling_powers(h, 0.05, params, cap=1e4))


def test_non_binding_budget_warns():
    params = ChannelParams.create(1, p_max=1.0)
    with pytest.warns(ZopdWarning):
        solution = clairvoyant_awgn(params, FadingSampler.deterministic([1.0]), mc_n=1000, cap=0.1)
    assert solution.lambda_star == 0.0
    assert not solution.binding
    assert solution.ergodic_power.value == pytest.approx(0.1)


def test_exponential_fading_meets_budget_and_beats_uniform():
    params = ChannelParams.create(4, p_max=20.0)
    fading = FadingSampler.exponential(4, rate=0.5, seed=0)
    solution = clairvoyant_awgn(params, fading, mc_n=5000, seed=11)
    assert solution.binding
    assert solution.ergodic_power.value == pytest.approx(20.0, abs=1e-6)
    uniform = ergodic_eval(uniform_policy(params), awgn_rates, params, fading, 5000, seed=11)
    assert solution.ergodic_sumrate.value >= uniform.sumrate - 1e-6
    assert solution.ergodic_sumrate.std_error > 0


def test_waterfilling_validation():
    params = ChannelParams.create(1)
    fading = FadingSampler.deterministic([1.0])
    with pytest.raises(ValueError):
        clairvoyant_awgn(params, fading, mc_n=999)
    with pytest.raises(ValueError):
        clairvoyant_awgn(params, fading, tol=0.0)
    with pytest.raises(ValueError):
        clairvoyant_awgn(params, fading, lambda_bounds=(1.0, 0.5))
