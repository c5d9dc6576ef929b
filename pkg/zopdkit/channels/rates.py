"""
Rate models of the wireless systems the learner probes.

All rates are in nats (natural logarithm). H is the fading *power*, so the
received power of user i is h_i·p_i. Every function broadcasts over leading
batch axes; the user axis is the last one.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..utils.utils import as_vector, broadcast_vector, check_nonnegative

RatesFunction = Callable[[ArrayLike, ArrayLike, "ChannelParams"], NDArray[np.float64]]


@dataclass(frozen=True, eq=False)
class ChannelParams:
    """Noise powers ν, total power budget p_max and rate weights w."""

    noise: NDArray[np.float64]
    p_max: float
    weights: NDArray[np.float64]

    def __post_init__(self) -> None:
        weights = as_vector("weights", self.weights)
        noise = broadcast_vector("noise", self.noise, weights.shape[0])
        if np.any(~(noise > 0)):
            raise ValueError("noise must be positive")
        if not self.p_max > 0:
            raise ValueError("p_max must be positive")
        check_nonnegative("weights", weights)
        if abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError(f"weights must sum to 1, got {weights.sum()!r}")
        object.__setattr__(self, "noise", noise)
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "p_max", float(self.p_max))

    @classmethod
    def create(
        cls,
        n_users: int,
        p_max: float = 20.0,
        noise: ArrayLike = 1.0,
        weights: Optional[ArrayLike] = None,
    ) -> ChannelParams:
        """Parameters for ``n_users`` users; equal weights unless given."""
        if weights is None:
            weights = np.full(n_users, 1.0 / n_users)
        return cls(broadcast_vector("noise", noise, n_users), p_max, as_vector("weights", weights, n_users))

    @property
    def n_users(self) -> int:
        return int(self.weights.shape[0])


def random_simplex_weights(n_users: int, rng: np.random.Generator) -> NDArray[np.float64]:
    """Weights drawn uniformly on the probability simplex."""
    weights = rng.dirichlet(np.ones(n_users))
    return weights / weights.sum()


# ============================================================================
# RATE MODELS
# ============================================================================


def awgn_rates(h: ArrayLike, p: ArrayLike, params: ChannelParams) -> NDArray[np.float64]:
    """Parallel AWGN channels: rate_i = log(1 + h_i·p_i / ν_i)."""
    h = np.asarray(h, dtype=np.float64)
    p = np.asarray(p, dtype=np.float64)
    return np.log1p(h * p / params.noise)


def mai_rates(h: ArrayLike, p: ArrayLike, params: ChannelParams) -> NDArray[np.float64]:
    """Multiple-access interference channel.

    rate_i = log(1 + h_i·p_i / (ν_i + Σ_{j≠i} h_j·p_j)).
    """
    received = np.asarray(h, dtype=np.float64) * np.asarray(p, dtype=np.float64)
    interference = np.maximum(received.sum(axis=-1, keepdims=True) - received, 0.0)
    return np.log1p(received / (params.noise + interference))


def service_with_budget(
    rates_fn: RatesFunction, h: ArrayLike, p: ArrayLike, params: ChannelParams
) -> NDArray[np.float64]:
    """Rates stacked with the budget component p_max − Σ p_i."""
    p = np.asarray(p, dtype=np.float64)
    budget = params.p_max - p.sum(axis=-1, keepdims=True)
    return np.concatenate([rates_fn(h, p, params), budget], axis=-1)


def weighted_sumrate(
    rates_fn: RatesFunction, h: ArrayLike, p: ArrayLike, params: ChannelParams
) -> NDArray[np.float64]:
    """Σ w_i·rate_i along the user axis."""
    return rates_fn(h, p, params) @ params.weights


RATE_MODELS: dict[str, RatesFunction] = {
    "awgn": awgn_rates,
    "mai": mai_rates,
}
