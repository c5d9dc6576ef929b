from __future__ import annotations

try:
    from typing import override
except ImportError:  # Python < 3.12
    from typing_extensions import override

import numpy as np
from numpy.typing import ArrayLike, NDArray

from .base_policy import PolicyBase


class IdentityPolicy(PolicyBase):
    """Allocation equals θ, independent of the fading state."""

    def __init__(self, dim: int) -> None:
        if dim < 1:
            raise ValueError("dim must be at least 1")
        self._dim = dim

    @override
    def get_theta_dim(self) -> int:
        return self._dim

    @override
    def get_output_dim(self) -> int:
        return self._dim

    @override
    def forward(self, h: ArrayLike, theta: ArrayLike) -> NDArray[np.float64]:
        theta = self._check_theta(theta)
        batch_shape = np.shape(h)[:-1]
        return np.broadcast_to(self._transform(theta), batch_shape + (self._dim,)).copy()

    def _transform(self, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        return theta


class ClampPolicy(IdentityPolicy):
    """Allocation p = clamp(θ, lower, upper), independent of the fading state."""

    def __init__(self, dim: int, lower: float = 0.0, upper: float = 1.0) -> None:
        super().__init__(dim)
        if lower > upper:
            raise ValueError("lower must not exceed upper")
        self._lower = lower
        self._upper = upper

    @override
    def _transform(self, theta: NDArray[np.float64]) -> NDArray[np.float64]:
        return np.clip(theta, self._lower, self._upper)
