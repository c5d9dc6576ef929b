from __future__ import annotations

from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..utils.seeding import make_generator
from ..utils.utils import as_vector, check_nonnegative


class FadingSampler:
    """Sampler of fading power states H.

    Either i.i.d. exponential per coordinate (rate 0.5, mean 2 by default) or
    a deterministic fixture vector returned on every draw. The sampler owns
    its seeded stream.

    Args:
        dim (int): Number of coordinates N_S.
        rate (float): Rate of the exponential distribution.
        seed (int): Seed of the sampler's stream.
        fixed (Optional[ArrayLike]): Deterministic fading vector; overrides
            the exponential distribution.
    """

    def __init__(
        self,
        dim: int,
        rate: float = 0.5,
        seed: int = 0,
        fixed: Optional[ArrayLike] = None,
    ) -> None:
        if dim < 1:
            raise ValueError("dim must be at least 1")
        if not rate > 0:
            raise ValueError("rate must be positive")
        self._dim = dim
        self._rate = float(rate)
        self._fixed: Optional[NDArray[np.float64]] = None
        if fixed is not None:
            fixed = as_vector("fixed", fixed, dim)
            check_nonnegative("fixed", fixed)
            self._fixed = fixed
        self.reseed(seed)

    @classmethod
    def exponential(cls, dim: int, rate: float = 0.5, seed: int = 0) -> FadingSampler:
        return cls(dim, rate=rate, seed=seed)

    @classmethod
    def deterministic(cls, values: ArrayLike) -> FadingSampler:
        vector = as_vector("values", values)
        return cls(int(vector.shape[0]), fixed=vector)

    def __repr__(self) -> str:
        if self._fixed is not None:
            return f"FadingSampler(fixed={self._fixed.tolist()})"
        return f"FadingSampler(dim={self._dim}, rate={self._rate}, seed={self._seed})"

    # ============================================================================

    def reseed(self, seed: int) -> None:
        """Restart the stream from ``seed``."""
        self._seed = int(seed)
        self._rng = make_generator(self._seed)

    def spawn(self, seed: int) -> FadingSampler:
        """Independent sampler with the same distribution and its own stream."""
        return FadingSampler(self._dim, self._rate, seed, self._fixed)

    def get_dim(self) -> int:
        return self._dim

    def get_rate(self) -> float:
        return self._rate

    def is_deterministic(self) -> bool:
        return self._fixed is not None

    def get_mean(self) -> NDArray[np.float64]:
        if self._fixed is not None:
            return self._fixed.copy()
        return np.full(self._dim, 1.0 / self._rate)

    # ============================================================================

    def sample(self) -> NDArray[np.float64]:
        """Draw one fading state of length ``dim``."""
        if self._fixed is not None:
            return self._fixed.copy()
        return self._rng.exponential(1.0 / self._rate, size=self._dim)

    def sample_batch(self, n: int) -> NDArray[np.float64]:
        """Draw ``n`` fading states as an (n, dim) array."""
        if n < 1:
            raise ValueError("n must be at least 1")
        if self._fixed is not None:
            return np.tile(self._fixed, (n, 1))
        return self._rng.exponential(1.0 / self._rate, size=(n, self._dim))
