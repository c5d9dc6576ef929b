"""
Per-realization WMMSE power control for the multiple-access interference
channel.

The scalar WMMSE iteration alternates three closed-form blocks on the
amplitudes v_i = √p_i (channel amplitudes a_i = √h_i):

    u_i = a_i v_i / (ν_i + Σ_j h_j v_j²)        MMSE receiver
    w̃_i = 1 / (1 − u_i a_i v_i)                 MSE weight
    v_i = α_i w̃_i u_i a_i / (h_i Σ_k α_k w̃_k u_k² + μ)

where μ ≥ 0 is the budget multiplier enforcing Σ v_i² ≤ p_max. The weighted
sumrate never decreases across iterations, up to the accuracy of μ.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.optimize import bisect  # type: ignore

from ..channels.rates import ChannelParams, mai_rates
from ..utils.exceptions import ZopdWarning
from ..utils.utils import as_vector, check_nonnegative


@dataclass(frozen=True, eq=False)
class WmmseResult:
    """Outcome of one WMMSE solve.

    ``history`` holds the weighted sumrate of the initial point followed by
    one entry per iteration; ``powers`` is the best iterate seen, or a
    single-user allocation when one of those does better.
    """

    powers: NDArray[np.float64]
    sumrate: float
    history: NDArray[np.float64]
    iterations: int
    converged: bool


def _sumrate(h: NDArray[np.float64], v: NDArray[np.float64], params: ChannelParams) -> float:
    return float(mai_rates(h, v**2, params) @ params.weights)


def _amplitude_update(
    h: NDArray[np.float64], num: NDArray[np.float64], s: float, p_max: float
) -> NDArray[np.float64]:
    """Minimize the weighted MSE in v subject to Σ v² ≤ p_max."""

    def amplitudes(mu: float) -> NDArray[np.float64]:
        denominator = h * s + mu
        return np.where(denominator > 0, num / np.where(denominator > 0, denominator, 1.0), 0.0)

    v = amplitudes(0.0)
    if np.sum(v**2) <= p_max:
        return v
    hi = np.sqrt(np.sum(num**2) / p_max)
    mu = bisect(
        lambda m: float(np.sum(amplitudes(m) ** 2) - p_max),
        0.0, hi, xtol=1e-15 * hi, maxiter=200, disp=False,
    )
    v = amplitudes(mu)
    total = np.sum(v**2)
    if total > p_max:
        v = v * np.sqrt(p_max / total)
    return v


def wmmse_solve(
    h: ArrayLike, params: ChannelParams, max_iters: int = 100, tol: float = 1e-6
) -> WmmseResult:
    """Run WMMSE from the uniform allocation.

    Args:
        h (ArrayLike): Fading powers, one per user, nonnegative.
        params (ChannelParams): Noise, budget and weights α.
        max_iters (int, optional): Iteration cap. Defaults to 100.
        tol (float, optional): Stop once the weighted sumrate changes by at
            most ``tol``. Defaults to 1e-6.

    Raises:
        ValueError: If ``h`` has the wrong length or negative entries.

    Returns:
        WmmseResult: Best iterate, its sumrate and the sumrate history. A
        non-converged solve is flagged and warned about.
    """
    h = as_vector("h", h, params.n_users)
    check_nonnegative("h", h)
    if max_iters < 1:
        raise ValueError("max_iters must be at least 1")
    if not np.any(h > 0):
        zeros = np.zeros(params.n_users)
        return WmmseResult(zeros, 0.0, np.zeros(1), 0, True)

    amplitude = np.sqrt(h)
    alpha = params.weights
    v = np.full(params.n_users, np.sqrt(params.p_max / params.n_users))
    history = [_sumrate(h, v, params)]
    best_v, best_rate = v, history[0]
    converged = False

    for _ in range(max_iters):
        total = params.noise + np.sum(h * v**2)
        u = amplitude * v / total
        weight = 1.0 / np.maximum(1.0 - u * amplitude * v, np.finfo(np.float64).tiny)
        s = float(np.sum(alpha * weight * u**2))
        v = _amplitude_update(h, alpha * weight * u * amplitude, s, params.p_max)

        rate = _sumrate(h, v, params)
        history.append(rate)
        if rate > best_rate:
            best_v, best_rate = v, rate
        if abs(history[-1] - history[-2]) <= tol:
            converged = True
            break

    if not converged:
        warnings.warn(
            f"WMMSE did not converge in {max_iters} iterations; returning the best iterate.",
            ZopdWarning,
        )
    powers = best_v**2
    for i in range(params.n_users):
        single = np.zeros(params.n_users)
        single[i] = params.p_max
        rate = _sumrate(h, np.sqrt(single), params)
        if rate > best_rate:
            powers, best_rate = single, rate
    return WmmseResult(powers, best_rate, np.array(history), len(history) - 1, converged)


def wmmse_powers(
    h: ArrayLike, params: ChannelParams, max_iters: int = 100, tol: float = 1e-6
) -> NDArray[np.float64]:
    """WMMSE power vector for one fading state."""
    return wmmse_solve(h, params, max_iters, tol).powers


def wmmse_rule(
    params: ChannelParams, max_iters: int = 100, tol: float = 1e-6
) -> Callable[[ArrayLike], NDArray[np.float64]]:
    """Power rule applying WMMSE to every row of an (n, N) batch of states."""

    def rule(hs: ArrayLike) -> NDArray[np.float64]:
        hs = np.atleast_2d(np.asarray(hs, dtype=np.float64))
        return np.vstack([wmmse_powers(h, params, max_iters, tol) for h in hs])

    return rule
