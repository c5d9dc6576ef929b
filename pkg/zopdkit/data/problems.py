"""
Builders for the programs zopdkit ships with.

Two wireless programs (parallel AWGN channels and the multiple-access
interference channel, each with a folded-in power budget), three scalar toys
with known answers, and two small fixtures with certified Lipschitz
constants and closed-form smoothing for the duality diagnostics.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Union

import numpy as np
from numpy.typing import ArrayLike, NDArray
from scipy.stats import norm  # type: ignore

from ..channels.fading import FadingSampler
from ..channels.rates import (
    ChannelParams,
    RatesFunction,
    awgn_rates,
    mai_rates,
    random_simplex_weights,
    service_with_budget,
)
from ..core.problem import AnalyticSmoothing, ErgodicProblem, LipschitzMeta
from ..policy.dnn_policy import DnnPolicy
from ..policy.simple_policies import ClampPolicy, IdentityPolicy
from ..utils.seeding import make_generator, role_seed

Weights = Union[None, str, ArrayLike]


def wireless_policy(structure: str, n_users: int, hidden: Sequence[int], p_max: float) -> DnnPolicy:
    """
    Per-user or joint network for a wireless program.

    Raises
    ------
    ValueError
        If ``structure`` is not "per_user" or "joint".
    """
    if structure == "per_user":
        return DnnPolicy.per_user(n_users, hidden, output_scale=p_max)
    if structure == "joint":
        return DnnPolicy.joint(n_users, hidden, output_scale=p_max)
    raise ValueError(f"Unknown structure: {structure}")


@dataclass(frozen=True, eq=False)
class WirelessSetup:
    """A wireless program together with the model its baselines need."""

    problem: ErgodicProblem
    params: ChannelParams
    rates_fn: RatesFunction


def resolve_weights(weights: Weights, n_users: int, seed: int) -> NDArray[np.float64]:
    """
    Turn a weights setting into a weight vector.

    Parameters
    ----------
    weights : None, "random" or array-like
        ``None`` gives equal weights, ``"random"`` draws uniformly on the
        simplex from the ``weights`` sub-seed of ``seed``.
    n_users : int
        Number of users.
    seed : int
        Run seed.

    Returns
    -------
    NDArray[np.float64]
        Nonnegative weights summing to one.

    Raises
    ------
    ValueError
        If ``weights`` is an unknown string.
    """
    if weights is None:
        return np.full(n_users, 1.0 / n_users)
    if isinstance(weights, str):
        if weights != "random":
            raise ValueError(f"Unknown weights setting: {weights}")
        return random_simplex_weights(n_users, make_generator(role_seed(seed, "weights")))
    vector = np.asarray(weights, dtype=np.float64)
    return vector / vector.sum()


def _wireless(
    name: str,
    rates_fn: RatesFunction,
    policy: DnnPolicy,
    n_users: int,
    p_max: float,
    noise: ArrayLike,
    weights: Weights,
    rate: float,
    seed: int,
) -> WirelessSetup:
    params = ChannelParams.create(n_users, p_max, noise, resolve_weights(weights, n_users, seed))
    w = params.weights

    def service(p: NDArray[np.float64], h: NDArray[np.float64]) -> NDArray[np.float64]:
        return service_with_budget(rates_fn, h, p, params)

    problem = ErgodicProblem(
        objective=lambda x: float(w @ x),
        service=service,
        fading=FadingSampler.exponential(n_users, rate=rate, seed=role_seed(seed, "fading")),
        policy=policy,
        n_s=n_users,
        objective_grad=lambda x: w.copy(),
        pinned=(0.0,),
        service_weights=w,
        name=name,
    )
    return WirelessSetup(problem, params, rates_fn)


def make_awgn_problem(
    n_users: int = 10,
    p_max: float = 20.0,
    noise: ArrayLike = 1.0,
    weights: Weights = "random",
    hidden: Sequence[int] = (8, 4),
    rate: float = 0.5,
    seed: int = 0,
    structure: str = "per_user",
) -> WirelessSetup:
    """
    Weighted sumrate over parallel AWGN channels with a power budget.

    maximize ⟨w, x⟩ subject to x ≤ E[log(1 + H∘φ(H, θ)/ν)] and
    E[Σ φ(H, θ)] ≤ p_max, by default with one per-user network per channel.

    Parameters
    ----------
    n_users : int, default 10
    p_max : float, default 20.0
    noise : array-like, default 1.0
    weights : None, "random" or array-like, default "random"
    hidden : sequence of int, default (8, 4)
        Hidden widths of every network.
    rate : float, default 0.5
        Rate of the exponential fading (mean 1/rate).
    seed : int, default 0
        Seed of the random weights and of the fading sampler.
    structure : {"per_user", "joint"}, default "per_user"
        Policy network layout, see ``wireless_policy``.

    Returns
    -------
    WirelessSetup
    """
    policy = wireless_policy(structure, n_users, hidden, p_max)
    return _wireless("awgn", awgn_rates, policy, n_users, p_max, noise, weights, rate, seed)


def make_mai_problem(
    n_users: int = 5,
    p_max: float = 20.0,
    noise: ArrayLike = 1.0,
    weights: Weights = "random",
    hidden: Sequence[int] = (32, 16),
    rate: float = 0.5,
    seed: int = 0,
    structure: str = "joint",
) -> WirelessSetup:
    """
    Weighted sumrate over the multiple-access interference channel.

    Same program as ``make_awgn_problem`` with interference-limited rates and
    one joint network from all fading states to all powers unless
    ``structure`` asks for per-user networks.
    """
    policy = wireless_policy(structure, n_users, hidden, p_max)
    return _wireless("mai", mai_rates, policy, n_users, p_max, noise, weights, rate, seed)


def make_toy_problem() -> ErgodicProblem:
    """
    Scalar toy with optimum 1.

    maximize x subject to x ≤ E[H·clamp(θ, 0, 1)] with H ≡ 1, x ≥ 0.
    """
    return ErgodicProblem(
        objective=lambda x: float(x[0]),
        service=lambda p, h: h * p,
        fading=FadingSampler.deterministic([1.0]),
        policy=ClampPolicy(1, 0.0, 1.0),
        n_s=1,
        objective_grad=lambda x: np.ones(1),
        lipschitz=LipschitzMeta(1.0, c_r=np.ones(1)),
        name="toy",
    )


def make_linear_problem(p_max: float = 1.0) -> ErgodicProblem:
    """
    Linear scalar program used for hand-checked iterations.

    maximize x subject to x ≤ θ, 0 ≤ x ≤ p_max, deterministic fading.
    """
    return ErgodicProblem(
        objective=lambda x: float(x[0]),
        service=lambda p, h: np.asarray(p, dtype=np.float64),
        fading=FadingSampler.deterministic([1.0]),
        policy=IdentityPolicy(1),
        n_s=1,
        objective_grad=lambda x: np.ones(1),
        x_lower=0.0,
        x_upper=p_max,
        lipschitz=LipschitzMeta(1.0, c_r=np.ones(1)),
        closed_forms=AnalyticSmoothing(
            objective=lambda x, mu: float(x[0]),
            service_mean=lambda theta, mu: np.asarray(theta, dtype=np.float64),
        ),
        name="linear",
    )


def _tent_service_mean(theta: NDArray[np.float64], mu: float) -> NDArray[np.float64]:
    # Y = 2(θ + μU) − 1 ~ N(m, s²)
    m = 2.0 * float(theta[0]) - 1.0
    if mu == 0:
        return np.array([1.0 - abs(m)])
    s = 2.0 * mu
    mean_abs = s * np.sqrt(2.0 / np.pi) * np.exp(-(m**2) / (2.0 * s**2)) + m * (
        1.0 - 2.0 * norm.cdf(-m / s)
    )
    return np.array([1.0 - mean_abs])


def make_tent_problem(x_upper: float = 2.0) -> ErgodicProblem:
    """
    Scalar program with a nonsmooth tent-shaped service.

    maximize x subject to x ≤ 1 − |2θ − 1|, 0 ≤ x ≤ ``x_upper``. The dual
    optimum is 1 at λ = 1, and the smoothed dual optimum is
    1 − 2μ√(2/π) − S.
    """
    return ErgodicProblem(
        objective=lambda x: float(x[0]),
        service=lambda p, h: h * (1.0 - np.abs(2.0 * np.asarray(p) - 1.0)),
        fading=FadingSampler.deterministic([1.0]),
        policy=IdentityPolicy(1),
        n_s=1,
        objective_grad=lambda x: np.ones(1),
        x_lower=0.0,
        x_upper=x_upper,
        lipschitz=LipschitzMeta(1.0, c_r=np.array([2.0])),
        closed_forms=AnalyticSmoothing(
            objective=lambda x, mu: float(x[0]),
            service_mean=_tent_service_mean,
        ),
        name="tent",
    )


def make_affine_fixture(n_s: int = 2, n_g: int = 2, seed: int = 0) -> ErgodicProblem:
    """
    Affine program on which smoothing is exact.

    g°(x) = ⟨a, x⟩ + c, g(x) = Bx + d and f(p, H) = H∘p with a deterministic
    H and p = θ; the coefficients are drawn from the ``diag`` sub-seed.
    """
    rng = make_generator(role_seed(seed, "diag"))
    a = rng.uniform(-1.0, 1.0, size=n_s)
    c = float(rng.uniform(-1.0, 1.0))
    b = rng.uniform(-1.0, 1.0, size=(n_g, n_s))
    d = rng.uniform(0.0, 1.0, size=n_g)
    h = rng.uniform(0.5, 1.5, size=n_s)

    return ErgodicProblem(
        objective=lambda x: float(a @ x + c),
        service=lambda p, fading: fading * p,
        fading=FadingSampler.deterministic(h),
        policy=IdentityPolicy(n_s),
        n_s=n_s,
        objective_grad=lambda x: a.copy(),
        utility=lambda x: b @ x + d,
        utility_jacobian=lambda x: b.T.copy(),
        n_g=n_g,
        x_upper=1.0,
        lipschitz=LipschitzMeta(float(np.linalg.norm(a)), np.linalg.norm(b, axis=1), h.copy()),
        closed_forms=AnalyticSmoothing(
            objective=lambda x, mu: float(a @ x + c),
            utility=lambda x, mu: b @ x + d,
            service_mean=lambda theta, mu: h * theta,
        ),
        name="affine",
    )


def make_quadratic_fixture(n: int = 2, radius: float = 2.0) -> ErgodicProblem:
    """
    Quadratic program with known smoothing shifts.

    g°(x) = −‖x − ½‖², g(x) = r² − ‖x‖² and f_i(p) = 1 − (p_i − ½)² with
    p = θ. Smoothing subtracts μ²n from g° and g and μ² from each f_i. The
    Lipschitz constants hold on x ∈ [0, 1]ⁿ and θ ∈ [−1, 1]ⁿ.
    """
    root_n = float(np.sqrt(n))

    def service_mean(theta: NDArray[np.float64], mu: float) -> NDArray[np.float64]:
        return 1.0 - (np.asarray(theta) - 0.5) ** 2 - mu**2

    return ErgodicProblem(
        objective=lambda x: float(-np.sum((x - 0.5) ** 2)),
        service=lambda p, h: h * (1.0 - (np.asarray(p) - 0.5) ** 2),
        fading=FadingSampler.deterministic(np.ones(n)),
        policy=IdentityPolicy(n),
        n_s=n,
        objective_grad=lambda x: -2.0 * (x - 0.5),
        utility=lambda x: np.array([radius**2 - float(np.sum(x**2))]),
        utility_jacobian=lambda x: (-2.0 * x).reshape(n, 1),
        n_g=1,
        x_upper=1.0,
        lipschitz=LipschitzMeta(root_n, np.array([2.0 * root_n]), np.full(n, 3.0)),
        closed_forms=AnalyticSmoothing(
            objective=lambda x, mu: float(-np.sum((x - 0.5) ** 2) - mu**2 * n),
            utility=lambda x, mu: np.array([radius**2 - float(np.sum(x**2)) - mu**2 * n]),
            service_mean=service_mean,
        ),
        name="quadratic",
    )


PROBLEM_BUILDERS = {
    "toy": make_toy_problem,
    "linear": make_linear_problem,
    "tent": make_tent_problem,
    "affine": make_affine_fixture,
    "quadratic": make_quadratic_fixture,
}


def make_fixture(name: str, seed: Optional[int] = None) -> ErgodicProblem:
    """Build a named scalar toy or diagnostic fixture."""
    if name not in PROBLEM_BUILDERS:
        raise ValueError(f"Unknown problem: {name}")
    if name == "affine" and seed is not None:
        return make_affine_fixture(seed=seed)
    return PROBLEM_BUILDERS[name]()
