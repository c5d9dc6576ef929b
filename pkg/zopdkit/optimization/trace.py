from __future__ import annotations

import warnings
from dataclasses import dataclass
from typing import Any, Iterator, Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray

from ..utils.exceptions import ZopdWarning


@dataclass(frozen=True, eq=False)
class IterRecord:
    """Quantities observed during one primal-dual iteration.

    ``objective``, ``service``, ``utility`` and ``violation`` refer to the
    iterate the iteration started from, probed with that iteration's fading
    draw; ``violation`` is [x; pinned] − f, positive when violated. The
    multipliers are the updated ones and ``probes`` is cumulative.
    """

    iter: int
    objective: float
    sumrate: float
    service: NDArray[np.float64]
    utility: NDArray[np.float64]
    violation: NDArray[np.float64]
    lambda_s: NDArray[np.float64]
    lambda_r: NDArray[np.float64]
    probes: int


def ergodic_average(series: ArrayLike, window: int) -> NDArray[np.float64]:
    """Trailing moving average along the first axis.

    Entry i averages the last ``min(window, i + 1)`` values, so the first
    ``window`` entries are full-prefix averages.

    Args:
        series (ArrayLike): 1-D series or 2-D array of column series.
        window (int): Window length, ≥ 1.

    Raises:
        ValueError: If the window is smaller than 1.

    Returns:
        NDArray[np.float64]: Averages with the shape of ``series``.
    """
    if window < 1:
        raise ValueError("window must be at least 1")
    values = np.asarray(series, dtype=np.float64)
    n = values.shape[0]
    if n == 0:
        return values.copy()
    if window > n:
        warnings.warn(
            f"Window {window} exceeds series length {n}; using prefix averages.",
            ZopdWarning,
        )
    if window == 1:
        return values.copy()
    cumulative = np.concatenate(
        [np.zeros((1,) + values.shape[1:]), np.cumsum(values, axis=0)], axis=0
    )
    ends = np.arange(1, n + 1)
    starts = np.maximum(ends - window, 0)
    counts = (ends - starts).reshape((n,) + (1,) * (values.ndim - 1))
    return (cumulative[ends] - cumulative[starts]) / counts


class RunTrace:
    """Append-only record of a primal-dual run.

    Columns are exposed through ``get_column`` and the ergodic (moving
    average) versions through ``get_ergodic``.

    Args:
        n_s (int): Number of free metrics; service entries past it are pinned
            (budget) constraints.
        window (int): Moving-average window of the ergodic columns.
        seed (Optional[int]): Seed of the run, recorded for output headers.
    """

    SCALAR_COLUMNS = ("iter", "objective", "sumrate", "probes")

    def __init__(self, n_s: int, window: int = 2000, seed: Optional[int] = None) -> None:
        if window < 1:
            raise ValueError("window must be at least 1")
        self._n_s = n_s
        self._window = window
        self._seed = seed
        self._records: list[IterRecord] = []
        self._final_state: Optional[Any] = None

    def __len__(self) -> int:
        return len(self._records)

    def __iter__(self) -> Iterator[IterRecord]:
        return iter(self._records)

    def __repr__(self) -> str:
        return f"RunTrace(n_iters={len(self)}, window={self._window}, seed={self._seed})"

    # ============================================================================
    # RECORDING
    # ============================================================================

    def append(self, record: IterRecord) -> None:
        if self._records and record.iter <= self._records[-1].iter:
            raise ValueError("iterations must be appended in increasing order")
        self._records.append(record)

    def get_records(self) -> tuple[IterRecord, ...]:
        return tuple(self._records)

    def get_window(self) -> int:
        return self._window

    def get_seed(self) -> Optional[int]:
        return self._seed

    def get_n_s(self) -> int:
        return self._n_s

    def set_final_state(self, state: Any) -> None:
        """Attach the iterate the run ended in (a ``PdState``)."""
        self._final_state = state

    def get_final_state(self) -> Optional[Any]:
        return self._final_state

    # ============================================================================
    # COLUMNS
    # ============================================================================

    def get_column(self, name: str) -> NDArray[np.float64]:
        """Per-iteration values of a trace column.

        Options:
            - "iter", "objective", "sumrate", "probes": 1-D columns
            - "service", "utility", "violation", "lambda_s", "lambda_r": 2-D,
              one column per component

        Raises:
            ValueError: If the column name is unknown.
        """
        vector_columns = ("service", "utility", "violation", "lambda_s", "lambda_r")
        if name in self.SCALAR_COLUMNS:
            return np.array([getattr(r, name) for r in self._records], dtype=np.float64)
        if name in vector_columns:
            if not self._records:
                return np.zeros((0, 0))
            return np.vstack([getattr(r, name) for r in self._records]).astype(np.float64)
        raise ValueError(f"Unknown column: {name}")

    def get_ergodic(self, name: str, window: Optional[int] = None) -> NDArray[np.float64]:
        """Moving average of a column over ``window`` (default: the trace window)."""
        return ergodic_average(self.get_column(name), self._window if window is None else window)

    def get_rate_violation(self) -> NDArray[np.float64]:
        return self.get_column("violation")[:, : self._n_s]

    def get_budget_violation(self) -> NDArray[np.float64]:
        return self.get_column("violation")[:, self._n_s :]

    @property
    def metrics(self) -> TraceMetrics:
        """Accessor for summary statistics, e.g. ``trace.metrics.final_sumrate()``."""
        return TraceMetrics(self)


class TraceMetrics:
    """Organised namespace for summary statistics of a RunTrace.

    Access via ``trace.metrics.<method>()``, e.g.::

        trace.metrics.final_sumrate()
        trace.metrics.final_violation()
    """

    def __init__(self, trace: RunTrace) -> None:
        self._t = trace

    def _final_slice(self, fraction: float) -> slice:
        if not 0 < fraction <= 1:
            raise ValueError("fraction must lie in (0, 1]")
        n = len(self._t)
        if n == 0:
            raise ValueError("trace is empty")
        return slice(n - max(1, int(round(fraction * n))), n)

    def final_sumrate(self, fraction: float = 0.1) -> float:
        """Mean instantaneous weighted service over the final ``fraction`` of iterations."""
        return float(np.mean(self._t.get_column("sumrate")[self._final_slice(fraction)]))

    def final_objective(self, fraction: float = 0.1) -> float:
        """Mean objective over the final ``fraction`` of iterations."""
        return float(np.mean(self._t.get_column("objective")[self._final_slice(fraction)]))

    def final_violation(self, fraction: float = 0.1) -> NDArray[np.float64]:
        """Mean ergodic violation per constraint over the final ``fraction``."""
        return self._t.get_ergodic("violation")[self._final_slice(fraction)].mean(axis=0)

    def complementary_slackness(self) -> NDArray[np.float64]:
        """Per-iteration λ_Sᵀg(x) + λ_Rᵀ(f − [x; pinned])."""
        utility_term = np.einsum(
            "ij,ij->i", self._t.get_column("lambda_s"), self._t.get_column("utility")
        ) if self._t.get_column("utility").size else np.zeros(len(self._t))
        service_term = -np.einsum(
            "ij,ij->i", self._t.get_column("lambda_r"), self._t.get_column("violation")
        )
        return utility_term + service_term

    def final_complementary_slackness(self, fraction: float = 0.1) -> float:
        return float(np.mean(self.complementary_slackness()[self._final_slice(fraction)]))
