"""
The smoothed surrogate of an ergodic program and its feasibility report.

The surrogate replaces g° and g by their Gaussian smoothings with parameter
μ_S, replaces the ergodic service by its smoothing in θ with parameter μ_R,
and tightens every service constraint by the slack S(μ_R) = C·μ_R·√N_φ.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..smoothing.estimators import MonteCarloEstimate, sample_estimate
from ..smoothing.gaussian import GaussianStream, SmoothingConfig
from ..utils.seeding import role_seed
from ..utils.utils import as_vector
from .problem import ErgodicProblem

STATUSES = ("strictly_feasible", "feasible", "violated")


class SurrogateProblem:
    """An ergodic program together with its smoothing configuration."""

    def __init__(self, base: ErgodicProblem, smoothing: SmoothingConfig) -> None:
        if smoothing.slack_scale.shape[0] not in (1, base.get_n_service()):
            raise ValueError(
                f"slack_scale needs 1 or {base.get_n_service()} entries, "
                f"got {smoothing.slack_scale.shape[0]}"
            )
        self._base = base
        self._smoothing = smoothing

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(base={self._base!r}, mu_s={self._smoothing.mu_s}, "
            f"mu_r={self._smoothing.mu_r})"
        )

    def get_base(self) -> ErgodicProblem:
        return self._base

    def get_smoothing(self) -> SmoothingConfig:
        return self._smoothing

    def slack(self) -> NDArray[np.float64]:
        return self._smoothing.slack(self._base.get_n_phi(), self._base.get_n_service())


def surrogate_slack(s: SurrogateProblem) -> NDArray[np.float64]:
    """Feasibility slack S(μ_R) = C·μ_R·√N_φ, one entry per service constraint."""
    return s.slack()


# ============================================================================
# SMOOTHED VALUE ESTIMATES
# ============================================================================


def _exact(value: ArrayLike) -> MonteCarloEstimate:
    mean = np.asarray(value, dtype=np.float64)
    return MonteCarloEstimate(mean, np.zeros_like(mean), 1)


def estimate_objective(
    prob: ErgodicProblem, x: NDArray[np.float64], mu: float, n: int, stream: GaussianStream
) -> MonteCarloEstimate:
    """g°_μ(x): closed form when available, otherwise Monte Carlo."""
    closed = prob.get_closed_forms()
    if closed is not None and closed.objective is not None:
        return _exact(closed.objective(x, mu))
    if mu == 0:
        return _exact(prob.objective(x))
    directions = stream.draw_batch(n, x.shape[0])
    return sample_estimate(np.array([prob.objective(x + mu * d) for d in directions]))


def estimate_utility(
    prob: ErgodicProblem, x: NDArray[np.float64], mu: float, n: int, stream: GaussianStream
) -> MonteCarloEstimate:
    """g_μ(x): closed form when available, otherwise Monte Carlo."""
    if prob.get_n_g() == 0:
        return _exact(np.zeros(0))
    closed = prob.get_closed_forms()
    if closed is not None and closed.utility is not None:
        return _exact(as_vector("utility", closed.utility(x, mu), prob.get_n_g()))
    if mu == 0:
        return _exact(prob.utility(x))
    directions = stream.draw_batch(n, x.shape[0])
    return sample_estimate(np.array([prob.utility(x + mu * d) for d in directions]))


def estimate_service_mean(
    prob: ErgodicProblem,
    theta: NDArray[np.float64],
    mu: float,
    hs: NDArray[np.float64],
    stream: GaussianStream,
) -> MonteCarloEstimate:
    """E_{H,U}[f(φ(H, θ + μU), H)] over the fading samples ``hs``.

    Uses the closed form when available. Otherwise one probe per row of
    ``hs``, each with its own direction when μ > 0.
    """
    closed = prob.get_closed_forms()
    if closed is not None and closed.service_mean is not None:
        return _exact(as_vector("service mean", closed.service_mean(theta, mu), prob.get_n_service()))
    if mu == 0 or prob.get_n_phi() == 0:
        return sample_estimate(prob.probe_service_batch(theta, hs))
    directions = stream.draw_batch(hs.shape[0], theta.shape[0])
    samples = np.array(
        [prob.probe_service(theta + mu * d, h) for d, h in zip(directions, hs)]
    )
    return sample_estimate(samples)


# ============================================================================
# FEASIBILITY REPORT
# ============================================================================


def classify(slack: NDArray[np.float64], std_error: NDArray[np.float64], z: float) -> tuple[str, ...]:
    """Classify constraints ``slack ≥ 0`` given Monte Carlo standard errors."""
    statuses = []
    for value, error in zip(np.atleast_1d(slack), np.atleast_1d(std_error)):
        if value - z * error > 0:
            statuses.append("strictly_feasible")
        elif value + z * error < 0:
            statuses.append("violated")
        else:
            statuses.append("feasible")
    return tuple(statuses)


@dataclass(frozen=True, eq=False)
class FeasibilityReport:
    """Estimated constraint values at a point (x, θ), with standard errors.

    Attributes:
        utility: g(x) (required ≥ 0).
        smoothed_utility: g_{μS}(x) and its standard error.
        service_slack: f̄(θ) − [x; pinned] (required ≥ 0).
        smoothed_slack: f̄_{μR}(θ) − [x; pinned] − S(μ_R) (required ≥ 0).
        *_status: per-constraint classification, one of ``STATUSES``.
    """

    utility: NDArray[np.float64]
    smoothed_utility: NDArray[np.float64]
    smoothed_utility_se: NDArray[np.float64]
    service_slack: NDArray[np.float64]
    service_slack_se: NDArray[np.float64]
    smoothed_slack: NDArray[np.float64]
    smoothed_slack_se: NDArray[np.float64]
    utility_status: tuple[str, ...]
    service_status: tuple[str, ...]
    smoothed_status: tuple[str, ...]

    def is_feasible(self) -> bool:
        """No unsmoothed constraint is flagged as violated."""
        return "violated" not in self.utility_status + self.service_status

    def is_surrogate_feasible(self) -> bool:
        return "violated" not in self.smoothed_status


def feasibility_report(
    s: SurrogateProblem,
    x: ArrayLike,
    theta: ArrayLike,
    mc_samples: int,
    seed: int = 0,
    z: float = 3.0,
) -> FeasibilityReport:
    """Estimate and classify all constraints of ``s`` at (x, θ).

    Service evaluations go through the base problem and are counted as
    probes: 2·mc_samples per report unless the problem has a closed-form
    service mean.

    Args:
        s (SurrogateProblem): The surrogate.
        x (ArrayLike): Ergodic metrics, length n_s.
        theta (ArrayLike): Policy parameters, length N_φ.
        mc_samples (int): Monte Carlo sample count, ≥ 1.
        seed (int, optional): Seed of the report's own fading and Gaussian
            streams; the problem's sampler is left untouched. Defaults to 0.
        z (float, optional): Standard errors used by the classification.

    Raises:
        ValueError: If ``mc_samples < 1`` or dimensions disagree.

    Returns:
        FeasibilityReport: Constraint estimates and flags.
    """
    if mc_samples < 1:
        raise ValueError("mc_samples must be at least 1")
    prob = s.get_base()
    smoothing = s.get_smoothing()
    x = as_vector("x", x, prob.get_n_s())
    theta = as_vector("theta", theta, prob.get_n_phi())
    stream = GaussianStream(role_seed(seed, "gaussian_s"))
    hs = prob.get_fading().spawn(role_seed(seed, "fading")).sample_batch(mc_samples)
    metrics = prob.stack_metrics(x)

    utility = prob.utility(x)
    smoothed_utility = estimate_utility(prob, x, smoothing.mu_s, mc_samples, stream)
    # common fading draws for both service estimates
    service = estimate_service_mean(prob, theta, 0.0, hs, stream)
    smoothed_service = estimate_service_mean(prob, theta, smoothing.mu_r, hs, stream)
    service_slack = service.mean - metrics
    smoothed_slack = smoothed_service.mean - metrics - s.slack()

    return FeasibilityReport(
        utility=utility,
        smoothed_utility=smoothed_utility.mean,
        smoothed_utility_se=smoothed_utility.std_error,
        service_slack=service_slack,
        service_slack_se=service.std_error,
        smoothed_slack=smoothed_slack,
        smoothed_slack_se=smoothed_service.std_error,
        utility_status=classify(utility, np.zeros_like(utility), z),
        service_status=classify(service_slack, service.std_error, z),
        smoothed_status=classify(smoothed_slack, smoothed_service.std_error, z),
    )

