"""
Clairvoyant waterfilling for the ergodic AWGN program.

With full knowledge of the channel model the unparameterized AWGN program
decouples per fading state. The pointwise KKT conditions give

    p_i(h) = [ w_i / λ − ν_i / h_i ]₊,

capped at ``cap``, and the single price λ is set so that the expected total
power meets the budget. The expectation is a fixed common-random-numbers
Monte Carlo average, so the budget residual is a monotone function of λ and
a plain bisection (on log λ) finds the price.
"""

from __future__ import annotations

import logging
import warnings
from dataclasses import dataclass
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import bisect  # type: ignore

from ..channels.fading import FadingSampler
from ..channels.rates import ChannelParams, awgn_rates
from ..smoothing.estimators import MonteCarloEstimate, sample_estimate
from ..utils.exceptions import ZopdWarning

logger = logging.getLogger(__name__)

MIN_MC_SAMPLES = 1000


def waterfilling_powers(
    h: ArrayLike, lambda_: float, params: ChannelParams, cap: float
) -> NDArray[np.float64]:
    """Waterfilling powers at price ``lambda_`` for one state or a batch.

    Users with h_i = 0 get zero power; ``lambda_ = 0`` gives every other
    user the cap.
    """
    h = np.asarray(h, dtype=np.float64)
    with np.errstate(divide="ignore"):
        level = params.weights / lambda_ if lambda_ > 0 else np.full_like(params.weights, np.inf)
        floor = np.where(h > 0, params.noise / np.where(h > 0, h, 1.0), np.inf)
    powers = np.clip(level - floor, 0.0, cap)
    return np.where(h > 0, powers, 0.0)


@dataclass(frozen=True, eq=False)
class WaterfillingSolution:
    """Price and ergodic performance of the clairvoyant policy.

    Attributes:
        lambda_star: Power price λ* ≥ 0; zero when the budget does not bind.
        cap: Per-user power cap of the rule.
        binding: Whether the expected power meets the budget.
        ergodic_sumrate, ergodic_power: Monte Carlo estimates on the
            common samples used to set the price.
    """

    params: ChannelParams
    lambda_star: float
    cap: float
    binding: bool
    ergodic_sumrate: MonteCarloEstimate
    ergodic_power: MonteCarloEstimate

    def powers(self, h: ArrayLike) -> NDArray[np.float64]:
        """The clairvoyant rule p(h); accepts one state or an (n, N) batch."""
        return waterfilling_powers(h, self.lambda_star, self.params, self.cap)

    def __call__(self, h: ArrayLike) -> NDArray[np.float64]:
        return self.powers(h)


def clairvoyant_awgn(
    params: ChannelParams,
    fading: FadingSampler,
    mc_n: int = 10_000,
    tol: float = 1e-6,
    *,
    seed: int = 0,
    lambda_bounds: tuple[float, float] = (1e-8, 1e8),
    max_halvings: int = 200,
    cap: Optional[float] = None,
) -> WaterfillingSolution:
    """Solve the ergodic AWGN program by waterfilling with a bisected price.

    Args:
        params (ChannelParams): Noise, budget and weights.
        fading (FadingSampler): Fading distribution; a spawned copy seeded
            with ``seed`` draws the common samples.
        mc_n (int, optional): Monte Carlo sample count, at least 1000.
        tol (float, optional): Tolerance on |E[Σ p] − p_max|.
        seed (int, optional): Seed of the common samples.
        lambda_bounds (tuple[float, float], optional): Price bracket.
        max_halvings (int, optional): Bisection iteration cap.
        cap (Optional[float], optional): Per-user power cap; defaults to
            10³·p_max.

    Raises:
        ValueError: If ``mc_n < 1000``, ``tol`` is not positive or the
            bracket is invalid.

    Returns:
        WaterfillingSolution: The clairvoyant policy and its estimates.
    """
    if mc_n < MIN_MC_SAMPLES:
        raise ValueError(f"mc_n must be at least {MIN_MC_SAMPLES}, got {mc_n}")
    if not tol > 0:
        raise ValueError("tol must be positive")
    lambda_lo, lambda_hi = lambda_bounds
    if not 0 < lambda_lo < lambda_hi:
        raise ValueError("lambda_bounds must satisfy 0 < lo < hi")
    cap = 1e3 * params.p_max if cap is None else float(cap)

    hs = fading.spawn(seed).sample_batch(mc_n)

    def budget_residual(log_lambda: float) -> float:
        powers = waterfilling_powers(hs, float(np.exp(log_lambda)), params, cap)
        return float(powers.sum(axis=1).mean() - params.p_max)

    lo, hi = np.log(lambda_lo), np.log(lambda_hi)
    if budget_residual(lo) <= 0:
        warnings.warn(
            "Power budget does not bind at the lower price bound; returning lambda_star = 0.",
            ZopdWarning,
        )
        lambda_star, binding = 0.0, False
    elif budget_residual(hi) >= 0:
        raise ValueError("expected power still exceeds the budget at the upper price bound")
    else:
        log_star = bisect(budget_residual, lo, hi, xtol=1e-14, maxiter=max_halvings, disp=False)
        lambda_star, binding = float(np.exp(log_star)), True
        residual = budget_residual(log_star)
        if abs(residual) > tol:
            warnings.warn(
                f"Waterfilling budget residual {residual:.3g} exceeds tol={tol:g}.", ZopdWarning
            )

    powers = waterfilling_powers(hs, lambda_star, params, cap)
    solution = WaterfillingSolution(
        params=params,
        lambda_star=lambda_star,
        cap=cap,
        binding=binding,
        ergodic_sumrate=sample_estimate(awgn_rates(hs, powers, params) @ params.weights),
        ergodic_power=sample_estimate(powers.sum(axis=1)),
    )
    logger.info(
        "Clairvoyant waterfilling: lambda*=%.6g, sumrate=%.6g, power=%.6g",
        lambda_star, solution.ergodic_sumrate.value, solution.ergodic_power.value,
    )
    return solution
