from __future__ import annotations

from abc import ABC, abstractmethod
from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray


class PolicyBase(ABC):
    """
    Abstract base class for parameterized allocation policies φ(H, θ).

    A policy maps a fading state (or a batch of fading states along the
    leading axes) and a flat parameter vector θ to an allocation vector.
    Policies are forward-only; the learner never differentiates them.
    """

    # ============================================================================
    # ABSTRACT METHODS (TO BE IMPLEMENTED BY SUBCLASSES)
    # ============================================================================

    @abstractmethod
    def forward(self, h: ArrayLike, theta: ArrayLike) -> NDArray[np.float64]:
        pass

    @abstractmethod
    def get_theta_dim(self) -> int:
        pass

    @abstractmethod
    def get_output_dim(self) -> int:
        pass

    # ============================================================================
    # PARAMETER HANDLING
    # ============================================================================

    @property
    def theta_dim(self) -> int:
        return self.get_theta_dim()

    def initial_theta(
        self, init: str = "zeros", rng: Optional[np.random.Generator] = None
    ) -> NDArray[np.float64]:
        """Initial parameter vector θ⁰.

        Args:
            init (str, optional): ``"zeros"`` or ``"uniform"``. Defaults to "zeros".
                Options:
                    - "zeros": θ⁰ ≡ 0
                    - "uniform": i.i.d. uniform(−0.1, 0.1), needs ``rng``

        Raises:
            ValueError: If ``init`` is unknown or ``rng`` is missing.

        Returns:
            NDArray[np.float64]: Vector of length ``theta_dim``.
        """
        options = ["zeros", "uniform"]
        if init not in options:
            raise ValueError(f"Unknown initialization: {init}")
        if init == "zeros":
            return np.zeros(self.get_theta_dim())
        if rng is None:
            raise ValueError("uniform initialization needs a seeded generator")
        return rng.uniform(-0.1, 0.1, size=self.get_theta_dim())

    def _check_theta(self, theta: ArrayLike) -> NDArray[np.float64]:
        theta = np.asarray(theta, dtype=np.float64)
        if theta.ndim != 1 or theta.shape[0] != self.get_theta_dim():
            raise ValueError(
                f"theta must have length {self.get_theta_dim()}, got shape {theta.shape}"
            )
        return theta
