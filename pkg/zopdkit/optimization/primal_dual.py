"""
Model-free randomized primal-dual learning.

Each iteration n → n+1 draws perturbation directions U_S, U_R and one fading
state H, then updates

    x      ← Π_X[ x + γ_x ∘ (Δg°·U_S + ⟨Δg, λ_S⟩·U_S − λ_R[:N_S]) ]
    θ      ← θ + γ_θ ∘ ⟨Δf, λ_R⟩·U_R
    λ_S    ← ( λ_S − γ_λS ∘ g(x⁺ + μ_S U_S) )₊
    λ_R    ← ( λ_R − γ_λR ∘ ( f(φ(H, θ⁺ + μ_R U_R), H) − [x⁺; pinned] − S(μ_R) ) )₊

where Δ denotes finite differences with parameters μ_S, μ_R. With μ_S = 0
the x-update uses the analytic gradient of g° and the utility Jacobian
instead. The service is probed three times per iteration, all with the same
fading draw.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Optional, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from tqdm import tqdm  # type: ignore

from ..core.problem import ErgodicProblem
from ..core.surrogate import SurrogateProblem
from ..smoothing.estimators import evaluate_pair
from ..smoothing.gaussian import GaussianStream, SmoothingConfig
from ..utils.exceptions import NumericalAbort
from ..utils.seeding import SubSeeds, seed_everything
from ..utils.utils import broadcast_vector, check_nonnegative
from .projections import positive_part, project_box
from .trace import IterRecord, RunTrace

logger = logging.getLogger(__name__)

SCHEDULES = ["constant", "harmonic"]


# ============================================================================
# STATE AND STEP SIZES
# ============================================================================


@dataclass(eq=False)
class PdState:
    """Primal-dual iterate (x, θ, λ_S, λ_R) after ``iter`` iterations."""

    x: NDArray[np.float64]
    theta: NDArray[np.float64]
    lambda_s: NDArray[np.float64]
    lambda_r: NDArray[np.float64]
    iter: int = 0

    @classmethod
    def initial(
        cls,
        problem: ErgodicProblem,
        x0: ArrayLike = 0.0,
        theta0: Optional[ArrayLike] = None,
        lambda0: ArrayLike = 1.0,
    ) -> PdState:
        """Initial state; θ⁰ defaults to zeros, scalars are broadcast.

        Raises:
            ValueError: If a vector has the wrong length or λ⁰ is negative.
        """
        lower, upper = problem.get_x_bounds()
        x = project_box(broadcast_vector("x0", x0, problem.get_n_s()), lower, upper)
        if theta0 is None:
            theta = np.zeros(problem.get_n_phi())
        else:
            theta = broadcast_vector("theta0", theta0, problem.get_n_phi())
        lambda_s = broadcast_vector("lambda0", lambda0, problem.get_n_g()) if problem.get_n_g() else np.zeros(0)
        lambda_r = broadcast_vector("lambda0", lambda0, problem.get_n_service())
        check_nonnegative("lambda0", lambda_r)
        return cls(x, theta, lambda_s, lambda_r, 0)

    def copy(self) -> PdState:
        return PdState(
            self.x.copy(), self.theta.copy(), self.lambda_s.copy(), self.lambda_r.copy(), self.iter
        )


@dataclass(frozen=True, eq=False)
class StepSizes:
    """Nonnegative step-size vectors (scalars broadcast).

    With ``schedule="harmonic"`` every step size at iteration n is scaled by
    ``offset / (offset + n)``.
    """

    gamma_x: Union[float, NDArray[np.float64]]
    gamma_theta: Union[float, NDArray[np.float64]]
    gamma_lambda_s: Union[float, NDArray[np.float64]]
    gamma_lambda_r: Union[float, NDArray[np.float64]]
    schedule: str = "constant"
    offset: float = field(default=1000.0)

    def __post_init__(self) -> None:
        if self.schedule not in SCHEDULES:
            raise ValueError(f"Unknown schedule: {self.schedule}")
        if not self.offset > 0:
            raise ValueError("offset must be positive")
        for name in ("gamma_x", "gamma_theta", "gamma_lambda_s", "gamma_lambda_r"):
            values = np.asarray(getattr(self, name), dtype=np.float64)
            check_nonnegative(name, values)
            object.__setattr__(self, name, values)

    @classmethod
    def constant(
        cls, gamma_x: ArrayLike, gamma_theta: ArrayLike, gamma_lambda_s: ArrayLike, gamma_lambda_r: ArrayLike
    ) -> StepSizes:
        return cls(gamma_x, gamma_theta, gamma_lambda_s, gamma_lambda_r)  # type: ignore[arg-type]

    @classmethod
    def harmonic(
        cls,
        gamma_x: ArrayLike,
        gamma_theta: ArrayLike,
        gamma_lambda_s: ArrayLike,
        gamma_lambda_r: ArrayLike,
        offset: float = 1000.0,
    ) -> StepSizes:
        """Step sizes decaying as γ₀·offset / (offset + n)."""
        return cls(gamma_x, gamma_theta, gamma_lambda_s, gamma_lambda_r, "harmonic", offset)  # type: ignore[arg-type]

    @classmethod
    def zeros(cls) -> StepSizes:
        return cls(0.0, 0.0, 0.0, 0.0)

    def at(self, n: int) -> tuple[NDArray[np.float64], ...]:
        """Step sizes (γ_x, γ_θ, γ_λS, γ_λR) used in iteration n → n+1."""
        scale = 1.0 if self.schedule == "constant" else self.offset / (self.offset + n)
        return tuple(
            scale * np.asarray(value)
            for value in (self.gamma_x, self.gamma_theta, self.gamma_lambda_s, self.gamma_lambda_r)
        )

    def validate_for(self, problem: ErgodicProblem) -> None:
        """Check that vector step sizes match the problem dimensions.

        Raises:
            ValueError: On a length mismatch.
        """
        expected = {
            "gamma_x": problem.get_n_s(),
            "gamma_theta": problem.get_n_phi(),
            "gamma_lambda_s": problem.get_n_g(),
            "gamma_lambda_r": problem.get_n_service(),
        }
        for name, length in expected.items():
            values = np.asarray(getattr(self, name))
            if values.ndim > 0 and values.shape[0] not in (1, length):
                raise ValueError(f"{name} has {values.shape[0]} entries, expected 1 or {length}")


@dataclass(frozen=True)
class PdStreams:
    """The two Gaussian streams of a run."""

    gaussian_s: GaussianStream
    gaussian_r: GaussianStream

    @classmethod
    def from_seeds(cls, seeds: SubSeeds) -> PdStreams:
        return cls(GaussianStream(seeds.gaussian_s), GaussianStream(seeds.gaussian_r))


# ============================================================================
# ONE ITERATION
# ============================================================================


def _check_finite(values: dict[str, NDArray[np.float64]], iteration: int) -> None:
    for name, value in values.items():
        if not np.all(np.isfinite(value)):
            snapshot = {key: np.array(item, copy=True) for key, item in values.items()}
            raise NumericalAbort(f"non-finite values in {name}", iteration, snapshot)


def step(
    state: PdState,
    prob: SurrogateProblem,
    steps: StepSizes,
    rng: PdStreams,
) -> tuple[PdState, IterRecord]:
    """Execute one primal-dual iteration.

    Args:
        state (PdState): Current iterate.
        prob (SurrogateProblem): Surrogate with smoothing μ_S, μ_R and slack.
        steps (StepSizes): Step sizes.
        rng (PdStreams): Gaussian streams for U_S and U_R. The fading draw
            comes from the problem's own sampler.

    Raises:
        ValueError: If μ_R is not positive, or μ_S = 0 and analytic gradients
            are missing.
        NumericalAbort: If any updated quantity is NaN or Inf.

    Returns:
        tuple[PdState, IterRecord]: The new iterate and the iteration record.
    """
    base = prob.get_base()
    smoothing = prob.get_smoothing()
    mu_s, mu_r = smoothing.mu_s, smoothing.mu_r
    n_s, n_g = base.get_n_s(), base.get_n_g()
    gamma_x, gamma_theta, gamma_lambda_s, gamma_lambda_r = steps.at(state.iter)
    lower, upper = base.get_x_bounds()
    x, theta = state.x, state.theta

    # (a) directions
    u_s = rng.gaussian_s.draw(n_s)
    u_r = rng.gaussian_r.draw(base.get_n_phi())

    # (b) objective and utility differences, two service probes with one draw
    if mu_s > 0:
        objective_pair = evaluate_pair(base.objective, x, mu_s, u_s)
        objective_value = float(objective_pair.base)
        objective_step = float(objective_pair.quotient) * u_s.values
        if n_g > 0:
            utility_pair = evaluate_pair(base.utility, x, mu_s, u_s)
            utility_value = utility_pair.base
            utility_step = float(utility_pair.quotient @ state.lambda_s) * u_s.values
        else:
            utility_value = np.zeros(0)
            utility_step = np.zeros(n_s)
    else:
        objective_value = base.objective(x)
        objective_step = base.objective_grad(x)
        utility_value = base.utility(x)
        utility_step = base.utility_jacobian(x) @ state.lambda_s if n_g > 0 else np.zeros(n_s)

    h = base.get_fading().sample()
    service_pair = evaluate_pair(lambda t: base.probe_service(t, h), theta, mu_r, u_r)
    service = service_pair.base

    # (c) primal updates
    x_next = project_box(
        x + gamma_x * (objective_step + utility_step - state.lambda_r[:n_s]), lower, upper
    )
    theta_next = theta + gamma_theta * float(service_pair.quotient @ state.lambda_r) * u_r.values

    # (d) dual probes at the new iterate, same directions and fading draw
    if n_g > 0:
        utility_next = base.utility(x_next + mu_s * u_s.values)
        lambda_s_next = positive_part(state.lambda_s - gamma_lambda_s * utility_next)
    else:
        lambda_s_next = state.lambda_s.copy()
    service_next = base.probe_service(theta_next + mu_r * u_r.values, h)

    # (e) multiplier updates
    lambda_r_next = positive_part(
        state.lambda_r
        - gamma_lambda_r * (service_next - base.stack_metrics(x_next) - prob.slack())
    )

    _check_finite(
        {
            "x": x_next,
            "theta": theta_next,
            "lambda_s": lambda_s_next,
            "lambda_r": lambda_r_next,
            "service": service,
            "service_next": service_next,
        },
        state.iter + 1,
    )

    new_state = PdState(x_next, theta_next, lambda_s_next, lambda_r_next, state.iter + 1)
    record = IterRecord(
        iter=state.iter + 1,
        objective=objective_value,
        sumrate=float(service[:n_s] @ base.get_service_weights()),
        service=service,
        utility=np.asarray(utility_value, dtype=np.float64),
        violation=base.stack_metrics(x) - service,
        lambda_s=lambda_s_next,
        lambda_r=lambda_r_next,
        probes=base.get_probe_count(),
    )
    return new_state, record


# ============================================================================
# FULL RUN
# ============================================================================


def run(
    prob: ErgodicProblem,
    steps: StepSizes,
    smoothing: SmoothingConfig,
    n_iters: int,
    seed: int,
    initial: Optional[PdState] = None,
    *,
    window: int = 2000,
    progress: bool = False,
    log_every: int = 10_000,
) -> RunTrace:
    """Run ``n_iters`` primal-dual iterations from ``initial``.

    The problem's fading sampler is reseeded from ``seed`` and the probe
    counter is reset, so the run is a pure function of its arguments.

    Args:
        prob (ErgodicProblem): The program to learn.
        steps (StepSizes): Step sizes.
        smoothing (SmoothingConfig): μ_S, μ_R and slack constant.
        n_iters (int): Number of iterations, ≥ 1.
        seed (int): Run seed; sub-seeds come from ``seed_everything``.
        initial (Optional[PdState]): Initial iterate; defaults to x⁰ = 0,
            θ⁰ = 0, λ⁰ = 1.
        window (int, optional): Moving-average window of the trace.
        progress (bool, optional): Show a progress bar. Defaults to False.
        log_every (int, optional): Iterations between DEBUG log lines.

    Raises:
        ValueError: If ``n_iters < 1`` or the step sizes do not fit.
        NumericalAbort: If an iterate becomes non-finite; the partial trace
            is attached as ``partial_trace``.

    Returns:
        RunTrace: One record per iteration.
    """
    if n_iters < 1:
        raise ValueError("n_iters must be at least 1")
    steps.validate_for(prob)
    surrogate = SurrogateProblem(prob, smoothing)
    seeds = seed_everything(seed)
    prob.get_fading().reseed(seeds.fading)
    prob.reset_probes()
    streams = PdStreams.from_seeds(seeds)
    state = PdState.initial(prob) if initial is None else initial.copy()
    trace = RunTrace(prob.get_n_s(), window=window, seed=seed)

    logger.info(
        "Starting run of %s: %d iterations, n_s=%d, n_phi=%d, seed=%d",
        prob.get_name(), n_iters, prob.get_n_s(), prob.get_n_phi(), seed,
    )
    for _ in tqdm(range(n_iters), disable=not progress, desc=prob.get_name()):
        try:
            state, record = step(state, surrogate, steps, streams)
        except NumericalAbort as exc:
            trace.set_final_state(state)
            exc.partial_trace = trace
            logger.error("Run aborted: %s", exc)
            raise
        trace.append(record)
        if log_every and record.iter % log_every == 0:
            logger.debug(
                "iter %d: objective=%.6g sumrate=%.6g max|violation|=%.3g",
                record.iter, record.objective, record.sumrate, np.max(np.abs(record.violation)),
            )
    trace.set_final_state(state)
    logger.info("Finished run of %s after %d probes", prob.get_name(), prob.get_probe_count())
    return trace

