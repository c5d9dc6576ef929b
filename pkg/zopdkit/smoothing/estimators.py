"""
Finite differences and Monte Carlo estimators of Gaussian-smoothed functions.

For a function f on R^N and μ > 0 the smoothed function is
f_μ(x) = E[f(x + μU)] with U ~ N(0, I_N). Its gradient admits the
zeroth-order representation

    ∇f_μ(x) = E[(f(x + μU) − f(x)) / μ · U],

so a single pair of function evaluations gives an unbiased gradient sample.
Nothing in here ever differentiates f.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..utils.utils import as_vector
from .gaussian import GaussianDraw, GaussianStream

ScalarFunction = Callable[[NDArray[np.float64]], float]
VectorFunction = Callable[[NDArray[np.float64]], ArrayLike]


# ============================================================================
# FINITE DIFFERENCES
# ============================================================================


@dataclass(frozen=True, eq=False)
class DifferencePair:
    """The two evaluations f(x) and f(x + μu) behind one difference quotient.

    The primal-dual loop keeps both values so that an evaluation is never
    repeated.
    """

    base: NDArray[np.float64]
    shifted: NDArray[np.float64]
    mu: float

    @property
    def quotient(self) -> NDArray[np.float64]:
        return (self.shifted - self.base) / self.mu


def evaluate_pair(
    f: VectorFunction, x: ArrayLike, mu: float, u: GaussianDraw
) -> DifferencePair:
    """Evaluate ``f`` at ``x`` and ``x + mu·u``; exactly two calls to ``f``.

    Raises:
        ValueError: If ``mu`` is not positive or ``u`` has the wrong dimension.
    """
    if not mu > 0:
        raise ValueError("smoothing parameter must be positive for finite differences")
    x = as_vector("x", x)
    if u.dim != x.shape[0]:
        raise ValueError(f"direction has dim {u.dim} but x has length {x.shape[0]}")
    base = np.asarray(f(x), dtype=np.float64)
    shifted = np.asarray(f(x + mu * u.values), dtype=np.float64)
    return DifferencePair(base, shifted, float(mu))


def finite_diff(f: ScalarFunction, x: ArrayLike, mu: float, u: GaussianDraw) -> float:
    """Return (f(x + μu) − f(x)) / μ.

    Args:
        f (ScalarFunction): Black-box scalar function.
        x (ArrayLike): Evaluation point.
        mu (float): Smoothing parameter, > 0.
        u (GaussianDraw): Perturbation direction with ``u.dim == len(x)``.

    Raises:
        ValueError: If ``mu`` is not positive or the dimensions disagree.

    Returns:
        float: The difference quotient.
    """
    return float(evaluate_pair(f, x, mu, u).quotient)


def zo_grad_sample(
    f: ScalarFunction, x: ArrayLike, mu: float, u: GaussianDraw
) -> NDArray[np.float64]:
    """Unbiased sample of ∇f_μ(x): the difference quotient times ``u``."""
    return finite_diff(f, x, mu, u) * u.values


def vector_finite_diff(
    fv: VectorFunction, x: ArrayLike, mu: float, u: GaussianDraw
) -> NDArray[np.float64]:
    """Componentwise difference quotients of a vector function.

    All components share the same direction ``u`` and the same two
    evaluations of ``fv``.
    """
    return np.atleast_1d(evaluate_pair(fv, x, mu, u).quotient)


# ============================================================================
# MONTE CARLO ESTIMATORS
# ============================================================================


@dataclass(frozen=True, eq=False)
class MonteCarloEstimate:
    """Sample mean with its standard error."""

    mean: NDArray[np.float64]
    std_error: NDArray[np.float64]
    n: int

    @property
    def value(self) -> float:
        return float(self.mean)


def sample_estimate(samples: NDArray[np.float64]) -> MonteCarloEstimate:
    """Mean and standard error over the first axis of ``samples``."""
    n = samples.shape[0]
    mean = np.asarray(samples.mean(axis=0))
    if n < 2:
        return MonteCarloEstimate(mean, np.zeros_like(mean), n)
    return MonteCarloEstimate(mean, samples.std(axis=0, ddof=1) / np.sqrt(n), n)


def mc_smoothed_estimate(
    f: ScalarFunction, x: ArrayLike, mu: float, n: int, rng: GaussianStream
) -> MonteCarloEstimate:
    """Monte Carlo estimate of f_μ(x) with its standard error.

    Raises:
        ValueError: If ``n < 1`` or ``mu < 0``.
    """
    if n < 1:
        raise ValueError("sample count must be at least 1")
    if mu < 0:
        raise ValueError("smoothing parameter must be nonnegative")
    x = as_vector("x", x)
    if mu == 0:
        value = np.asarray(float(f(x)))
        return MonteCarloEstimate(value, np.zeros_like(value), 1)
    directions = rng.draw_batch(n, x.shape[0])
    samples = np.array([f(x + mu * direction) for direction in directions], dtype=np.float64)
    return sample_estimate(samples)


def mc_smoothed_value(
    f: ScalarFunction, x: ArrayLike, mu: float, n: int, rng: GaussianStream
) -> float:
    """Return (1/n)·Σ f(x + μu_k); for μ = 0 a single evaluation f(x)."""
    return mc_smoothed_estimate(f, x, mu, n, rng).value


def mc_zo_gradient(
    f: ScalarFunction, x: ArrayLike, mu: float, n: int, rng: GaussianStream
) -> MonteCarloEstimate:
    """Batch mean of ``n`` zeroth-order gradient samples, with standard errors."""
    if n < 1:
        raise ValueError("sample count must be at least 1")
    x = as_vector("x", x)
    samples = np.empty((n, x.shape[0]), dtype=np.float64)
    for k in range(n):
        samples[k] = zo_grad_sample(f, x, mu, rng.draw(x.shape[0]))
    return sample_estimate(samples)


def check_smoothing_direction(
    f: ScalarFunction,
    x: ArrayLike,
    mu: float,
    n: int,
    rng: GaussianStream,
    curvature: Literal["convex", "concave"],
    n_std_errors: float = 4.0,
) -> bool:
    """Check that smoothing over- or underestimates ``f`` at ``x``.

    Smoothing a convex function never decreases it and smoothing a concave
    function never increases it.

    Args:
        curvature (str): ``"convex"`` or ``"concave"``.
        n_std_errors (float): Allowed Monte Carlo slack in standard errors.

    Raises:
        ValueError: If ``curvature`` is unknown.

    Returns:
        bool: Whether the estimate lies on the expected side of f(x).
    """
    options = ["convex", "concave"]
    if curvature not in options:
        raise ValueError(f"Unknown curvature: {curvature}")
    estimate = mc_smoothed_estimate(f, x, mu, n, rng)
    difference = estimate.value - float(f(as_vector("x", x)))
    margin = n_std_errors * float(estimate.std_error)
    if curvature == "convex":
        return difference >= -margin
    return difference <= margin
