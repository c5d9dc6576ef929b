from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..core.problem import ErgodicProblem, LipschitzMeta
from ..core.surrogate import estimate_objective, estimate_service_mean, estimate_utility
from ..smoothing.gaussian import GaussianStream, SmoothingConfig
from ..utils.exceptions import ZopdWarning
from ..utils.seeding import make_generator, role_seed
from ..utils.utils import as_vector, broadcast_vector, check_nonnegative

"""
Numerical checks of the duality theory of the smoothed surrogate.

The Lagrangian of the (optionally smoothed) program is

    L(x, θ, λ) = g°(x) + ⟨λ_S, g(x)⟩ + ⟨λ_R, f̄(θ) − [x; pinned] − S⟩,

with S = 0 and no smoothing for the unsmoothed variant. Smoothing moves it by
at most the Γ bounds:

    −Γ^l(λ) ≤ L_μ(x, θ, λ) − L(x, θ, λ) ≤ Γ^r(λ)
    Γ^l = μ_S L_g°√N_S + μ_S⟨λ_S, c_S⟩√N_S + μ_R⟨λ_R, c_R⟩√N_φ + ⟨S, λ_R⟩
    Γ^r = μ_R⟨λ_R, c_R⟩√N_φ − ⟨S, λ_R⟩

and the dual optima satisfy D*_μ − D* ∈ [−Γ^l(λ†), Γ^r(λ*)], with λ† the
largest dual minimizer over the tested smoothing range. On small problems
the inner maximization is done exhaustively on a grid; the Lagrangian is
separable in x and θ, so the grid search runs over each block separately.

Notes:
------
- Smoothed values come from the problem's closed forms when it carries
  them and from Monte Carlo otherwise.
"""

MAX_GRID_CELLS = 1_000_000


def _split_lambda(
    prob: ErgodicProblem, lambda_s: ArrayLike, lambda_r: ArrayLike
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lambda_s = (
        broadcast_vector("lambda_s", lambda_s, prob.get_n_g()) if prob.get_n_g() else np.zeros(0)
    )
    lambda_r = broadcast_vector("lambda_r", lambda_r, prob.get_n_service())
    check_nonnegative("lambda_s", lambda_s)
    check_nonnegative("lambda_r", lambda_r)
    return lambda_s, lambda_r


def _fading_samples(prob: ErgodicProblem, mc_n: int, seed: int, mu: float) -> NDArray[np.float64]:
    # one row per Gaussian direction when smoothing
    fading = prob.get_fading().spawn(role_seed(seed, "fading"))
    return fading.sample_batch(1 if fading.is_deterministic() and mu == 0 else mc_n)


# ============================================================================
# LAGRANGIAN
# ============================================================================


@dataclass(frozen=True)
class LagrangianValue:
    value: float
    std_error: float


def lagrangian_estimate(
    x: ArrayLike,
    theta: ArrayLike,
    lambda_s: ArrayLike,
    lambda_r: ArrayLike,
    prob: ErgodicProblem,
    smoothing: Optional[SmoothingConfig] = None,
    mc_n: int = 1000,
    seed: int = 0,
) -> LagrangianValue:
    """Lagrangian value with a combined Monte Carlo standard error."""
    x = as_vector("x", x, prob.get_n_s())
    theta = as_vector("theta", theta, prob.get_n_phi())
    lambda_s, lambda_r = _split_lambda(prob, lambda_s, lambda_r)
    if mc_n < 1:
        raise ValueError("mc_n must be at least 1")
    mu_s, mu_r = (0.0, 0.0) if smoothing is None else (smoothing.mu_s, smoothing.mu_r)
    slack = (
        np.zeros(prob.get_n_service())
        if smoothing is None
        else smoothing.slack(prob.get_n_phi(), prob.get_n_service())
    )
    stream = GaussianStream(role_seed(seed, "diag"))

    objective = estimate_objective(prob, x, mu_s, mc_n, stream)
    utility = estimate_utility(prob, x, mu_s, mc_n, stream)
    service = estimate_service_mean(prob, theta, mu_r, _fading_samples(prob, mc_n, seed, mu_r), stream)

    value = (
        float(objective.mean)
        + float(lambda_s @ utility.mean)
        + float(lambda_r @ (service.mean - prob.stack_metrics(x) - slack))
    )
    variance = (
        float(objective.std_error) ** 2
        + float(np.sum((lambda_s * utility.std_error) ** 2))
        + float(np.sum((lambda_r * service.std_error) ** 2))
    )
    return LagrangianValue(value, float(np.sqrt(variance)))


def lagrangian(
    x: ArrayLike,
    theta: ArrayLike,
    lambda_s: ArrayLike,
    lambda_r: ArrayLike,
    prob: ErgodicProblem,
    smoothing: Optional[SmoothingConfig] = None,
    mc_n: int = 1000,
    seed: int = 0,
) -> float:
    """Evaluate the Lagrangian at (x, θ, λ_S, λ_R).

    Args:
        x (ArrayLike): Ergodic metrics.
        theta (ArrayLike): Policy parameters.
        lambda_s (ArrayLike): Utility multipliers, ≥ 0 (ignored when n_g = 0).
        lambda_r (ArrayLike): Service multipliers, ≥ 0.
        prob (ErgodicProblem): The program.
        smoothing (Optional[SmoothingConfig]): ``None`` for the unsmoothed
            Lagrangian; otherwise the smoothed one, slack subtracted.
        mc_n (int, optional): Monte Carlo samples where no closed form
            exists. Defaults to 1000.
        seed (int, optional): Seed of the fading and Gaussian samples.

    Raises:
        ValueError: If a multiplier is negative or a dimension is wrong.

    Returns:
        float: The Lagrangian value.
    """
    return lagrangian_estimate(x, theta, lambda_s, lambda_r, prob, smoothing, mc_n, seed).value


def gamma_bounds(
    lambda_s: ArrayLike,
    lambda_r: ArrayLike,
    meta: LipschitzMeta,
    smoothing: SmoothingConfig,
    n_s: int,
    n_phi: int,
) -> tuple[float, float]:
    """The bounds (Γ^l, Γ^r) on the Lagrangian shift caused by smoothing.

    Raises:
        ValueError: If a multiplier is negative or ``c_S``/``c_R`` cannot be
            broadcast to the multipliers.
    """
    lambda_s = np.atleast_1d(np.asarray(lambda_s, dtype=np.float64))
    lambda_r = np.atleast_1d(np.asarray(lambda_r, dtype=np.float64))
    check_nonnegative("lambda_s", lambda_s)
    check_nonnegative("lambda_r", lambda_r)
    mu_s, mu_r = smoothing.mu_s, smoothing.mu_r
    root_s, root_phi = np.sqrt(n_s), np.sqrt(n_phi)

    c_s_term = 0.0
    if lambda_s.size:
        c_s_term = float(lambda_s @ broadcast_vector("c_s", meta.c_s, lambda_s.size))
    c_r_term = float(lambda_r @ broadcast_vector("c_r", meta.c_r, lambda_r.size))
    slack_term = float(lambda_r @ smoothing.slack(n_phi, lambda_r.size))

    gamma_l = (
        mu_s * meta.l_g_o * root_s + mu_s * c_s_term * root_s + mu_r * c_r_term * root_phi + slack_term
    )
    gamma_r = mu_r * c_r_term * root_phi - slack_term
    return float(gamma_l), float(gamma_r)


# ============================================================================
# SANDWICH CHECK
# ============================================================================


@dataclass(frozen=True, eq=False)
class SandwichReport:
    """Per-point Lagrangian shifts L_μ − L and their Γ bounds.

    ``margin`` is min(shift + Γ^l, Γ^r − shift) per point; negative margins
    within ``n_std_errors`` combined standard errors still pass.
    """

    ok: bool
    difference: NDArray[np.float64]
    gamma_l: NDArray[np.float64]
    gamma_r: NDArray[np.float64]
    std_error: NDArray[np.float64]
    margin: NDArray[np.float64]
    n_violations: int
    offending: Optional[dict[str, NDArray[np.float64]]] = None

    @property
    def worst_margin(self) -> float:
        return float(self.margin.min())

    @property
    def n_points(self) -> int:
        return int(self.difference.shape[0])


def _box(
    lower: NDArray[np.float64], upper: NDArray[np.float64], box: tuple[float, float]
) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
    lo = np.maximum(lower, box[0])
    hi = np.minimum(upper, box[1])
    if np.any(lo > hi):
        raise ValueError("sampling box does not intersect the x bounds")
    return lo, hi


def check_sandwich(
    prob: ErgodicProblem,
    smoothing: SmoothingConfig,
    meta: Optional[LipschitzMeta] = None,
    n_points: int = 1000,
    seed: int = 0,
    *,
    x_box: tuple[float, float] = (0.0, 1.0),
    theta_box: tuple[float, float] = (-1.0, 1.0),
    lambda_max: float = 2.0,
    mc_n: int = 1000,
    n_std_errors: float = 5.0,
) -> SandwichReport:
    """Check −Γ^l ≤ L_μ − L ≤ Γ^r at random points (x, θ, λ).

    Points are drawn uniformly: x from ``x_box`` intersected with the x
    bounds, θ from ``theta_box`` and every multiplier from [0, lambda_max].

    Raises:
        ValueError: If ``meta`` is missing and the problem carries no
            Lipschitz constants, or ``n_points < 1``.

    Returns:
        SandwichReport: Shifts, bounds and the first offending point.
    """
    meta = meta if meta is not None else prob.get_lipschitz()
    if meta is None:
        raise ValueError(f"{prob.get_name()} has no Lipschitz metadata")
    if n_points < 1:
        raise ValueError("n_points must be at least 1")
    rng = make_generator(role_seed(seed, "diag"))
    x_lo, x_hi = _box(*prob.get_x_bounds(), x_box)
    n_s, n_g, n_phi, n_r = prob.get_n_s(), prob.get_n_g(), prob.get_n_phi(), prob.get_n_service()

    difference = np.empty(n_points)
    gamma_l = np.empty(n_points)
    gamma_r = np.empty(n_points)
    std_error = np.empty(n_points)
    offending: Optional[dict[str, NDArray[np.float64]]] = None
    n_violations = 0
    for k in range(n_points):
        x = x_lo + rng.uniform(size=n_s) * (x_hi - x_lo)
        theta = rng.uniform(theta_box[0], theta_box[1], size=n_phi)
        lambda_s = rng.uniform(0.0, lambda_max, size=n_g)
        lambda_r = rng.uniform(0.0, lambda_max, size=n_r)

        point_seed = seed + k
        smoothed = lagrangian_estimate(x, theta, lambda_s, lambda_r, prob, smoothing, mc_n, point_seed)
        plain = lagrangian_estimate(x, theta, lambda_s, lambda_r, prob, None, mc_n, point_seed)
        difference[k] = smoothed.value - plain.value
        std_error[k] = np.hypot(smoothed.std_error, plain.std_error)
        gamma_l[k], gamma_r[k] = gamma_bounds(lambda_s, lambda_r, meta, smoothing, n_s, n_phi)

        tolerance = n_std_errors * std_error[k] + 1e-12 * (1.0 + abs(plain.value))
        if difference[k] < -gamma_l[k] - tolerance or difference[k] > gamma_r[k] + tolerance:
            n_violations += 1
            if offending is None:
                offending = {"x": x, "theta": theta, "lambda_s": lambda_s, "lambda_r": lambda_r}

    margin = np.minimum(difference + gamma_l, gamma_r - difference)
    return SandwichReport(
        ok=n_violations == 0,
        difference=difference,
        gamma_l=gamma_l,
        gamma_r=gamma_r,
        std_error=std_error,
        margin=margin,
        n_violations=n_violations,
        offending=offending,
    )


# ============================================================================
# DUAL FUNCTION ON A GRID
# ============================================================================


def product_grid(*axes: ArrayLike) -> NDArray[np.float64]:
    """All combinations of the 1-D ``axes`` as an (n, len(axes)) array."""
    mesh = np.meshgrid(*[np.asarray(a, dtype=np.float64) for a in axes], indexing="ij")
    return np.stack([m.reshape(-1) for m in mesh], axis=1)


def _as_points(name: str, grid: ArrayLike, dim: int) -> NDArray[np.float64]:
    points = np.asarray(grid, dtype=np.float64)
    if points.ndim == 1:
        points = points.reshape(-1, 1) if dim == 1 else points.reshape(1, -1)
    if points.ndim != 2 or points.shape[1] != dim:
        raise ValueError(f"{name} must have {dim} columns, got shape {points.shape}")
    return points


@dataclass(frozen=True, eq=False)
class DualTable:
    """Grid estimate of one dual function D(λ) and its minimizer."""

    lambdas: NDArray[np.float64]
    values: NDArray[np.float64]
    d_star: float
    lambda_star: NDArray[np.float64]
    x_star: NDArray[np.float64]
    theta_star: NDArray[np.float64]
    boundary_hit: bool


def _on_grid_boundary(
    point: NDArray[np.float64],
    points: NDArray[np.float64],
    scores: NDArray[np.float64],
    lower: Optional[NDArray[np.float64]],
    upper: Optional[NDArray[np.float64]],
) -> bool:
    if points.shape[0] < 2 or np.ptp(scores) <= 1e-12 * (1.0 + np.max(np.abs(scores))):
        return False
    for c in range(points.shape[1]):
        at_min = point[c] == points[:, c].min() and (lower is None or point[c] != lower[c])
        at_max = point[c] == points[:, c].max() and (upper is None or point[c] != upper[c])
        if at_min or at_max:
            return True
    return False


def dual_table(
    prob: ErgodicProblem,
    smoothing: Optional[SmoothingConfig],
    lambda_grid: ArrayLike,
    inner_grid: tuple[ArrayLike, ArrayLike],
    mc_n: int = 1000,
    seed: int = 0,
) -> DualTable:
    """D(λ) = max over the inner grid of the Lagrangian, for every λ row.

    Args:
        prob (ErgodicProblem): A small program.
        smoothing (Optional[SmoothingConfig]): ``None`` for the unsmoothed
            dual function.
        lambda_grid (ArrayLike): Rows [λ_S; λ_R], shape (n, n_g + n_service);
            1-D when there is a single multiplier.
        inner_grid (tuple[ArrayLike, ArrayLike]): Candidate x points
            (n_x, n_s) and θ points (n_θ, N_φ).

    Raises:
        ValueError: If the grid has more than 10⁶ cells or shapes disagree.

    Returns:
        DualTable: Values, minimum and the maximizers at the minimizing λ.
        A maximizer on the edge of the grid (but not on an x bound) sets
        ``boundary_hit`` and warns.
    """
    n_s, n_g, n_r = prob.get_n_s(), prob.get_n_g(), prob.get_n_service()
    lambdas = _as_points("lambda_grid", lambda_grid, n_g + n_r)
    check_nonnegative("lambda_grid", lambdas)
    x_points = _as_points("x grid", inner_grid[0], n_s)
    theta_points = _as_points("theta grid", inner_grid[1], prob.get_n_phi())
    if x_points.shape[0] * theta_points.shape[0] > MAX_GRID_CELLS:
        raise ValueError(
            f"inner grid has {x_points.shape[0] * theta_points.shape[0]} cells, "
            f"more than {MAX_GRID_CELLS}"
        )

    mu_s, mu_r = (0.0, 0.0) if smoothing is None else (smoothing.mu_s, smoothing.mu_r)
    slack = np.zeros(n_r) if smoothing is None else smoothing.slack(prob.get_n_phi(), n_r)
    hs = _fading_samples(prob, mc_n, seed, mu_r)

    objective = np.empty(x_points.shape[0])
    utility = np.empty((x_points.shape[0], n_g))
    for k, x in enumerate(x_points):
        objective[k] = float(estimate_objective(prob, x, mu_s, mc_n, GaussianStream(role_seed(seed, "diag"))).mean)
        utility[k] = estimate_utility(prob, x, mu_s, mc_n, GaussianStream(role_seed(seed, "diag"))).mean
    service = np.vstack(
        [
            estimate_service_mean(prob, theta, mu_r, hs, GaussianStream(role_seed(seed, "diag"))).mean
            for theta in theta_points
        ]
    )

    lambda_s, lambda_r = lambdas[:, :n_g], lambdas[:, n_g:]
    # scores[l, k]: the λ_l Lagrangian terms depending on x_k (resp. θ_k)
    x_scores = objective[None, :] + lambda_s @ utility.T - lambda_r[:, :n_s] @ x_points.T
    theta_scores = lambda_r @ service.T
    constant = -(lambda_r[:, n_s:] @ prob.get_pinned()) - lambda_r @ slack
    values = x_scores.max(axis=1) + theta_scores.max(axis=1) + constant

    best = int(np.argmin(values))
    x_index = int(np.argmax(x_scores[best]))
    theta_index = int(np.argmax(theta_scores[best]))
    lower, upper = prob.get_x_bounds()
    boundary_hit = _on_grid_boundary(
        x_points[x_index], x_points, x_scores[best], lower, upper
    ) or _on_grid_boundary(theta_points[theta_index], theta_points, theta_scores[best], None, None)
    if boundary_hit:
        warnings.warn(
            "Inner maximum attained on the edge of the grid; the grid may be too coarse.",
            ZopdWarning,
        )
    return DualTable(
        lambdas=lambdas,
        values=values,
        d_star=float(values[best]),
        lambda_star=lambdas[best].copy(),
        x_star=x_points[x_index].copy(),
        theta_star=theta_points[theta_index].copy(),
        boundary_hit=boundary_hit,
    )


@dataclass(frozen=True, eq=False)
class GapReport:
    """Smoothed against unsmoothed dual optimum at one smoothing level.

    ``sandwich_ok`` states that the gap lies in [−Γ^l(λ†) − tol, Γ^r(λ*) + tol].
    """

    mu_s: float
    mu_r: float
    gamma_l: float
    gamma_r: float
    d_mu_star: float
    d_star: float
    sandwich_ok: bool
    lambda_dagger: NDArray[np.float64]
    smoothed: DualTable
    unsmoothed: DualTable
    tolerance: float = 1e-9

    @property
    def gap(self) -> float:
        return self.d_mu_star - self.d_star


def _gap_report(
    prob: ErgodicProblem,
    smoothing: SmoothingConfig,
    meta: LipschitzMeta,
    smoothed: DualTable,
    unsmoothed: DualTable,
    lambda_dagger: NDArray[np.float64],
    tolerance: float,
) -> GapReport:
    n_g = prob.get_n_g()
    n_s, n_phi = prob.get_n_s(), prob.get_n_phi()
    gamma_l, _ = gamma_bounds(lambda_dagger[:n_g], lambda_dagger[n_g:], meta, smoothing, n_s, n_phi)
    _, gamma_r = gamma_bounds(
        unsmoothed.lambda_star[:n_g], unsmoothed.lambda_star[n_g:], meta, smoothing, n_s, n_phi
    )
    gap = smoothed.d_star - unsmoothed.d_star
    return GapReport(
        mu_s=smoothing.mu_s,
        mu_r=smoothing.mu_r,
        gamma_l=gamma_l,
        gamma_r=gamma_r,
        d_mu_star=smoothed.d_star,
        d_star=unsmoothed.d_star,
        sandwich_ok=bool(-gamma_l - tolerance <= gap <= gamma_r + tolerance),
        lambda_dagger=lambda_dagger,
        smoothed=smoothed,
        unsmoothed=unsmoothed,
        tolerance=tolerance,
    )


def _require_meta(prob: ErgodicProblem, meta: Optional[LipschitzMeta]) -> LipschitzMeta:
    meta = meta if meta is not None else prob.get_lipschitz()
    if meta is None:
        raise ValueError(f"{prob.get_name()} has no Lipschitz metadata")
    return meta


def dual_value_grid(
    prob: ErgodicProblem,
    smoothing: SmoothingConfig,
    lambda_grid: ArrayLike,
    inner_grid: tuple[ArrayLike, ArrayLike],
    meta: Optional[LipschitzMeta] = None,
    *,
    lambda_dagger: Optional[ArrayLike] = None,
    tolerance: float = 1e-9,
    mc_n: int = 1000,
    seed: int = 0,
) -> GapReport:
    """Grid dual optima D* and D*_μ and the check of their gap.

    Args:
        prob (ErgodicProblem): A small program with Lipschitz metadata.
        smoothing (SmoothingConfig): Smoothing of the surrogate.
        lambda_grid (ArrayLike): Multiplier grid, see ``dual_table``.
        inner_grid (tuple[ArrayLike, ArrayLike]): x and θ candidate points.
        meta (Optional[LipschitzMeta]): Overrides the problem's metadata.
        lambda_dagger (Optional[ArrayLike]): λ† for Γ^l; defaults to the
            elementwise max of the two grid minimizers.
        tolerance (float, optional): Grid tolerance of the bracket check.

    Returns:
        GapReport: Both dual tables, Γ bounds and the bracket verdict.
    """
    meta = _require_meta(prob, meta)
    unsmoothed = dual_table(prob, None, lambda_grid, inner_grid, mc_n, seed)
    smoothed = dual_table(prob, smoothing, lambda_grid, inner_grid, mc_n, seed)
    if lambda_dagger is None:
        dagger = np.maximum(unsmoothed.lambda_star, smoothed.lambda_star)
    else:
        dagger = as_vector("lambda_dagger", lambda_dagger, unsmoothed.lambda_star.shape[0])
    return _gap_report(prob, smoothing, meta, smoothed, unsmoothed, dagger, tolerance)


# ============================================================================
# DERIVED CHECKS
# ============================================================================


def check_dual_convexity(table: DualTable, tol: float = 1e-9) -> tuple[bool, float]:
    """Midpoint convexity of D on every grid triple (λ_a, (λ_a + λ_c)/2, λ_c).

    Returns:
        tuple[bool, float]: Whether every triple passes, and the largest
        excess D(mid) − (D(a) + D(c))/2 found (−inf without triples).
    """
    index = {tuple(np.round(row, 12)): k for k, row in enumerate(table.lambdas)}
    worst = -np.inf
    n = table.lambdas.shape[0]
    for a in range(n):
        for c in range(a + 1, n):
            mid = index.get(tuple(np.round((table.lambdas[a] + table.lambdas[c]) / 2, 12)))
            if mid is None or mid in (a, c):
                continue
            excess = table.values[mid] - 0.5 * (table.values[a] + table.values[c])
            worst = max(worst, float(excess))
    return bool(worst <= tol), float(worst)


@dataclass(frozen=True)
class GapFit:
    """Least-squares line |gap| ≈ slope·μ through the origin."""

    slope: float
    r_squared: float


def fit_gap_scaling(mus: ArrayLike, gaps: ArrayLike) -> GapFit:
    """Fit |gap| = slope·μ by least squares and report R².

    Raises:
        ValueError: If fewer than two points are given or lengths differ.
    """
    mus = as_vector("mus", mus)
    gaps = np.abs(as_vector("gaps", gaps, mus.shape[0]))
    if mus.shape[0] < 2:
        raise ValueError("need at least two points to fit")
    solution, *_ = np.linalg.lstsq(mus[:, None], gaps, rcond=None)
    slope = float(solution[0])
    residual = np.sum((gaps - slope * mus) ** 2)
    total = np.sum((gaps - gaps.mean()) ** 2)
    r_squared = 1.0 if total == 0 else float(1.0 - residual / total)
    return GapFit(slope, r_squared)


@dataclass(frozen=True, eq=False)
class GapSweep:
    """Gap reports over a range of smoothing levels (μ_S = μ_R = μ)."""

    mus: NDArray[np.float64]
    reports: tuple[GapReport, ...]
    lambda_dagger: NDArray[np.float64]
    fit: GapFit
    gaps: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    def all_bracketed(self) -> bool:
        return all(report.sandwich_ok for report in self.reports)


def dual_gap_sweep(
    prob: ErgodicProblem,
    smoothing: SmoothingConfig,
    mus: Sequence[float],
    lambda_grid: ArrayLike,
    inner_grid: tuple[ArrayLike, ArrayLike],
    meta: Optional[LipschitzMeta] = None,
    *,
    tolerance: float = 1e-9,
    mc_n: int = 1000,
    seed: int = 0,
) -> GapSweep:
    """Run the grid gap check at every μ, sharing one λ† estimate.

    λ† is the elementwise max of the grid minimizers over all tested μ and
    μ = 0; the slack constant of ``smoothing`` is kept at every level.
    """
    meta = _require_meta(prob, meta)
    mus_array = as_vector("mus", list(mus))
    unsmoothed = dual_table(prob, None, lambda_grid, inner_grid, mc_n, seed)
    configs = [smoothing.with_mu(mu, mu) for mu in mus_array]
    tables = [dual_table(prob, config, lambda_grid, inner_grid, mc_n, seed) for config in configs]
    dagger = unsmoothed.lambda_star.copy()
    for table in tables:
        dagger = np.maximum(dagger, table.lambda_star)
    reports = tuple(
        _gap_report(prob, config, meta, table, unsmoothed, dagger, tolerance)
        for config, table in zip(configs, tables)
    )
    gaps = np.array([report.gap for report in reports])
    return GapSweep(
        mus=mus_array,
        reports=reports,
        lambda_dagger=dagger,
        fit=fit_gap_scaling(mus_array, gaps),
        gaps=gaps,
    )
