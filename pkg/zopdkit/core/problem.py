"""
The parameterized ergodic program.

    maximize    g°(x)
    subject to  g(x) ≥ 0
                [x; pinned] ≤ E_H[ f(φ(H, θ), H) ]
                x ∈ X (a box),  θ ∈ R^{N_φ}

The service f is a black box: it is only ever evaluated through
``ErgodicProblem.probe_service``, which also keeps the probe tally. The
``pinned`` entries are ergodic metrics held at fixed values, e.g. the
power budget component of the canonical wireless problems.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..channels.fading import FadingSampler
from ..policy.base_policy import PolicyBase
from ..utils.exceptions import ServiceEvaluationError
from ..utils.utils import as_vector, broadcast_vector, check_nonnegative

Objective = Callable[[NDArray[np.float64]], float]
VectorMap = Callable[[NDArray[np.float64]], ArrayLike]
Service = Callable[[NDArray[np.float64], NDArray[np.float64]], ArrayLike]


# ============================================================================
# METADATA
# ============================================================================


@dataclass(frozen=True, eq=False)
class LipschitzMeta:
    """Lipschitz constants of g° (``l_g_o``), of each utility (``c_s``) and of
    each service constraint in θ (``c_r``)."""

    l_g_o: float
    c_s: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))
    c_r: NDArray[np.float64] = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self) -> None:
        c_s = np.atleast_1d(np.asarray(self.c_s, dtype=np.float64))
        c_r = np.atleast_1d(np.asarray(self.c_r, dtype=np.float64))
        for name, values in (("l_g_o", np.asarray(self.l_g_o)), ("c_s", c_s), ("c_r", c_r)):
            check_nonnegative(name, values)
            if not np.all(np.isfinite(values)):
                raise ValueError(f"{name} must be finite")
        object.__setattr__(self, "c_s", c_s)
        object.__setattr__(self, "c_r", c_r)
        object.__setattr__(self, "l_g_o", float(self.l_g_o))


@dataclass(frozen=True, eq=False)
class AnalyticSmoothing:
    """Closed forms of the smoothed problem functions, where known.

    Each callable takes the point and the smoothing parameter; at μ = 0 it
    must return the unsmoothed value. ``service_mean(θ, μ)`` is
    E_{H,U}[f(φ(H, θ + μU), H)].
    """

    objective: Optional[Callable[[NDArray[np.float64], float], float]] = None
    utility: Optional[Callable[[NDArray[np.float64], float], ArrayLike]] = None
    service_mean: Optional[Callable[[NDArray[np.float64], float], ArrayLike]] = None


class ProbeCounter:
    """Thread-safe tally of service probes."""

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._count = 0

    def increment(self, n: int = 1) -> None:
        with self._lock:
            self._count += n

    def get_count(self) -> int:
        with self._lock:
            return self._count

    def reset(self) -> None:
        with self._lock:
            self._count = 0


# ============================================================================
# PROBLEM
# ============================================================================


class ErgodicProblem:
    """A constrained ergodic resource-allocation program.

    Args:
        objective (Objective): Concave objective g°(x).
        service (Service): Black-box service f(p, h) returning
            ``n_s + len(pinned)`` values.
        fading (FadingSampler): Sampler of the fading state H.
        policy (PolicyBase): Parameterization φ(H, θ).
        n_s (int): Number of free ergodic metrics N_S (length of x).
        objective_grad (Optional[VectorMap]): Analytic ∇g°, needed when μ_S = 0.
        utility (Optional[VectorMap]): Utility constraints g(x) ≥ 0.
        utility_jacobian (Optional[Callable]): Analytic Jacobian of g, an
            (n_s, n_g) matrix, needed when μ_S = 0 and n_g > 0.
        n_g (int): Number of utility constraints.
        x_lower, x_upper (ArrayLike): Box X; defaults 0 and +inf.
        pinned (ArrayLike): Values of the fixed trailing metrics.
        service_weights (Optional[ArrayLike]): Weights w of the traced
            weighted service Σ w_i f_i over the free metrics; defaults to ones.
        lipschitz (Optional[LipschitzMeta]): Known Lipschitz constants.
        closed_forms (Optional[AnalyticSmoothing]): Known smoothed values.
        name (str): Label used in logs and reports.

    Raises:
        ValueError: If dimensions are inconsistent or ``x_lower > x_upper``.
    """

    # ============================================================================
    # INITIALIZATION
    # ============================================================================

    def __init__(
        self,
        objective: Objective,
        service: Service,
        fading: FadingSampler,
        policy: PolicyBase,
        n_s: int,
        *,
        objective_grad: Optional[VectorMap] = None,
        utility: Optional[VectorMap] = None,
        utility_jacobian: Optional[Callable[[NDArray[np.float64]], ArrayLike]] = None,
        n_g: int = 0,
        x_lower: ArrayLike = 0.0,
        x_upper: ArrayLike = np.inf,
        pinned: ArrayLike = (),
        service_weights: Optional[ArrayLike] = None,
        lipschitz: Optional[LipschitzMeta] = None,
        closed_forms: Optional[AnalyticSmoothing] = None,
        name: str = "problem",
    ) -> None:
        if n_s < 1:
            raise ValueError("n_s must be at least 1")
        if n_g < 0:
            raise ValueError("n_g must be nonnegative")
        if n_g > 0 and utility is None:
            raise ValueError("n_g > 0 needs a utility function")
        self._objective = objective
        self._objective_grad = objective_grad
        self._utility = utility
        self._utility_jacobian = utility_jacobian
        self._service = service
        self._fading = fading
        self._policy = policy
        self._n_s = n_s
        self._n_g = n_g
        self._x_lower = broadcast_vector("x_lower", x_lower, n_s)
        self._x_upper = broadcast_vector("x_upper", x_upper, n_s)
        if np.any(self._x_lower > self._x_upper):
            raise ValueError("x_lower must not exceed x_upper")
        self._pinned = np.asarray(pinned, dtype=np.float64).reshape(-1)
        if service_weights is None:
            service_weights = np.ones(n_s)
        self._service_weights = as_vector("service_weights", service_weights, n_s)
        self._lipschitz = lipschitz
        self._closed_forms = closed_forms
        self._name = name
        self._probes = ProbeCounter()

    def __repr__(self) -> str:
        return (
            f"{self.__class__.__name__}(name={self._name!r}, n_s={self._n_s}, "
            f"n_g={self._n_g}, n_pinned={self.get_n_pinned()}, "
            f"n_phi={self.get_n_phi()})"
        )

    # ============================================================================
    # DIMENSIONS AND SETS
    # ============================================================================

    def get_name(self) -> str:
        return self._name

    def get_n_s(self) -> int:
        return self._n_s

    def get_n_g(self) -> int:
        return self._n_g

    def get_n_pinned(self) -> int:
        return int(self._pinned.shape[0])

    def get_n_service(self) -> int:
        """Length of the service vector, free metrics plus pinned ones."""
        return self._n_s + self.get_n_pinned()

    def get_n_phi(self) -> int:
        return self._policy.get_theta_dim()

    def get_x_bounds(self) -> tuple[NDArray[np.float64], NDArray[np.float64]]:
        return self._x_lower.copy(), self._x_upper.copy()

    def get_pinned(self) -> NDArray[np.float64]:
        return self._pinned.copy()

    def get_service_weights(self) -> NDArray[np.float64]:
        return self._service_weights.copy()

    def get_policy(self) -> PolicyBase:
        return self._policy

    def get_fading(self) -> FadingSampler:
        return self._fading

    def get_lipschitz(self) -> Optional[LipschitzMeta]:
        return self._lipschitz

    def get_closed_forms(self) -> Optional[AnalyticSmoothing]:
        return self._closed_forms

    def stack_metrics(self, x: ArrayLike) -> NDArray[np.float64]:
        """The full metric vector [x; pinned] compared against the service."""
        return np.concatenate([as_vector("x", x, self._n_s), self._pinned])

    # ============================================================================
    # OBJECTIVE AND UTILITIES
    # ============================================================================

    def has_objective_grad(self) -> bool:
        return self._objective_grad is not None

    def has_utility_jacobian(self) -> bool:
        return self._n_g == 0 or self._utility_jacobian is not None

    def objective(self, x: NDArray[np.float64]) -> float:
        return float(self._objective(x))

    def objective_grad(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self._objective_grad is None:
            raise ValueError(f"{self._name} has no analytic objective gradient")
        return as_vector("objective gradient", self._objective_grad(x), self._n_s)

    def utility(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        if self._n_g == 0 or self._utility is None:
            return np.zeros(0)
        return as_vector("utility", self._utility(x), self._n_g)

    def utility_jacobian(self, x: NDArray[np.float64]) -> NDArray[np.float64]:
        """Jacobian of g as an (n_s, n_g) matrix."""
        if self._n_g == 0:
            return np.zeros((self._n_s, 0))
        if self._utility_jacobian is None:
            raise ValueError(f"{self._name} has no analytic utility Jacobian")
        return np.asarray(self._utility_jacobian(x), dtype=np.float64).reshape(
            self._n_s, self._n_g
        )

    # ============================================================================
    # SERVICE PROBES
    # ============================================================================

    def probe_service(self, theta: ArrayLike, h: ArrayLike) -> NDArray[np.float64]:
        """Evaluate f(φ(h, θ), h) and count one probe.

        Raises:
            ServiceEvaluationError: If the service evaluator fails.
            ValueError: If the service returns the wrong number of values.
        """
        self._probes.increment()
        return self._evaluate(theta, h)

    def probe_service_batch(self, theta: ArrayLike, hs: ArrayLike) -> NDArray[np.float64]:
        """Probe at each row of ``hs`` (shape (n, dim)); counts n probes."""
        hs = np.atleast_2d(np.asarray(hs, dtype=np.float64))
        self._probes.increment(hs.shape[0])
        return self._evaluate(theta, hs)

    def _evaluate(self, theta: ArrayLike, h: ArrayLike) -> NDArray[np.float64]:
        theta = np.asarray(theta, dtype=np.float64)
        h = np.asarray(h, dtype=np.float64)
        try:
            allocation = self._policy.forward(h, theta)
            values = np.asarray(self._service(allocation, h), dtype=np.float64)
        except Exception as exc:
            raise ServiceEvaluationError(
                f"service evaluation failed in {self._name} at "
                f"|theta|={np.linalg.norm(theta):.6g}, h={np.array2string(h, precision=6)}: {exc}"
            ) from exc
        if values.shape[-1:] != (self.get_n_service(),):
            raise ValueError(
                f"service returned shape {values.shape}, expected trailing {self.get_n_service()}"
            )
        return values

    def get_probe_count(self) -> int:
        return self._probes.get_count()

    def reset_probes(self) -> None:
        self._probes.reset()


def probe_service(prob: ErgodicProblem, theta: ArrayLike, h: ArrayLike) -> NDArray[np.float64]:
    """Functional form of ``prob.probe_service(theta, h)``."""
    return prob.probe_service(theta, h)
