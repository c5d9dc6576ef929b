from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..channels.fading import FadingSampler
from ..channels.rates import ChannelParams, RatesFunction
from ..policy.base_policy import PolicyBase

PowerRule = Callable[[ArrayLike], NDArray[np.float64]]


def uniform_policy(params: ChannelParams) -> PowerRule:
    """Deterministic uniform allocation p_i ≡ p_max / N."""
    share = params.p_max / params.n_users

    def rule(hs: ArrayLike) -> NDArray[np.float64]:
        return np.full(np.shape(hs), share, dtype=np.float64)

    return rule


def policy_rule(policy: PolicyBase, theta: ArrayLike) -> PowerRule:
    """Power rule of a parameterized policy at fixed parameters θ."""
    theta = np.asarray(theta, dtype=np.float64)

    def rule(hs: ArrayLike) -> NDArray[np.float64]:
        return policy.forward(np.asarray(hs, dtype=np.float64), theta)

    return rule


@dataclass(frozen=True)
class ErgodicEstimate:
    """Monte Carlo estimates of the weighted sumrate and total power."""

    sumrate: float
    sumrate_se: float
    power: float
    power_se: float
    n: int


def ergodic_eval(
    rule: PowerRule,
    rates_fn: RatesFunction,
    params: ChannelParams,
    fading: FadingSampler,
    mc_n: int,
    seed: int,
) -> ErgodicEstimate:
    """Estimate E[Σ w_i rate_i] and E[Σ p_i] of a power rule.

    The samples come from a copy of ``fading`` seeded with ``seed``, so rules
    evaluated with the same seed see the same fading states.

    Raises:
        ValueError: If ``mc_n < 2``.
    """
    if mc_n < 2:
        raise ValueError("mc_n must be at least 2")
    hs = fading.spawn(seed).sample_batch(mc_n)
    powers = np.asarray(rule(hs), dtype=np.float64).reshape(hs.shape)
    sumrates = rates_fn(hs, powers, params) @ params.weights
    totals = powers.sum(axis=1)
    root_n = np.sqrt(mc_n)
    return ErgodicEstimate(
        sumrate=float(sumrates.mean()),
        sumrate_se=float(sumrates.std(ddof=1) / root_n),
        power=float(totals.mean()),
        power_se=float(totals.std(ddof=1) / root_n),
        n=mc_n,
    )
