from __future__ import annotations

from dataclasses import dataclass, field
from typing import Union

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..utils.seeding import make_generator
from ..utils.utils import as_vector, check_nonnegative


@dataclass(frozen=True, eq=False)
class GaussianDraw:
    """One standard-normal perturbation direction U of dimension ``dim``."""

    values: NDArray[np.float64]
    dim: int

    def __post_init__(self) -> None:
        values = as_vector("values", self.values)
        if self.dim < 0:
            raise ValueError("dim must be nonnegative")
        if values.shape[0] != self.dim:
            raise ValueError(
                f"GaussianDraw has {values.shape[0]} values but dim={self.dim}"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_values(cls, values: ArrayLike) -> GaussianDraw:
        """Wrap fixed values, e.g. a forced draw in a test."""
        vector = as_vector("values", values)
        return cls(vector, int(vector.shape[0]))

    @classmethod
    def zeros(cls, dim: int) -> GaussianDraw:
        return cls(np.zeros(dim), dim)


class GaussianStream:
    """Seeded stream of standard-normal draws.

    The stream runs on the counter-based Philox bit generator, so two streams
    built from the same seed produce bit-identical draws.
    """

    def __init__(self, seed: int) -> None:
        self._seed = int(seed)
        self._rng = make_generator(self._seed)
        self._n_draws = 0

    def __repr__(self) -> str:
        return f"GaussianStream(seed={self._seed}, n_draws={self._n_draws})"

    def get_seed(self) -> int:
        return self._seed

    def get_draw_count(self) -> int:
        """Number of vectors drawn so far."""
        return self._n_draws

    def draw(self, dim: int) -> GaussianDraw:
        """Draw one direction U ~ N(0, I_dim)."""
        if dim < 0:
            raise ValueError("dim must be nonnegative")
        self._n_draws += 1
        return GaussianDraw(self._rng.standard_normal(dim), dim)

    def draw_batch(self, n: int, dim: int) -> NDArray[np.float64]:
        """Draw ``n`` directions as an (n, dim) array."""
        if n < 1:
            raise ValueError("n must be at least 1")
        self._n_draws += n
        return self._rng.standard_normal((n, dim))


@dataclass(frozen=True, eq=False)
class SmoothingConfig:
    """Smoothing parameters of the surrogate.

    Args:
        mu_s (float): Smoothing of the objective and utilities in x-space.
        mu_r (float): Smoothing of the service constraints in θ-space.
        slack_scale (Union[float, NDArray]): The constant C of the feasibility
            slack S(μ_R) = C·μ_R·√N_φ, scalar or one entry per constraint.
    """

    mu_s: float = 0.0
    mu_r: float = 0.0
    slack_scale: Union[float, NDArray[np.float64]] = field(default=0.0)

    def __post_init__(self) -> None:
        if not (self.mu_s >= 0):
            raise ValueError(f"mu_s must be nonnegative, got {self.mu_s}")
        if not (self.mu_r >= 0):
            raise ValueError(f"mu_r must be nonnegative, got {self.mu_r}")
        scale = np.atleast_1d(np.asarray(self.slack_scale, dtype=np.float64))
        check_nonnegative("slack_scale", scale)
        if not np.all(np.isfinite(scale)):
            raise ValueError("slack_scale must be finite")
        object.__setattr__(self, "slack_scale", scale)

    def slack(self, n_phi: int, n_constraints: int) -> NDArray[np.float64]:
        """Feasibility slack S(μ_R) = C·μ_R·√N_φ for ``n_constraints`` constraints.

        Raises:
            ValueError: If ``slack_scale`` is a vector of the wrong length.
        """
        scale = np.asarray(self.slack_scale)
        if scale.shape[0] not in (1, n_constraints):
            raise ValueError(
                f"slack_scale has {scale.shape[0]} entries, expected 1 or {n_constraints}"
            )
        return np.broadcast_to(
            scale * self.mu_r * np.sqrt(n_phi), (n_constraints,)
        ).astype(np.float64)

    def with_mu(self, mu_s: float, mu_r: float) -> SmoothingConfig:
        return SmoothingConfig(mu_s=mu_s, mu_r=mu_r, slack_scale=self.slack_scale)
