from __future__ import annotations

from typing import Any, Optional


class ZopdWarning(UserWarning):
    """Base class for soft conditions reported with ``warnings.warn``."""


class ConfigError(ValueError):
    """Raised when an experiment configuration is invalid.

    The message starts with the ``section.key`` of the offending field.
    """

    def __init__(self, field: str, message: str) -> None:
        self.field = field
        super().__init__(f"{field}: {message}")


class ServiceEvaluationError(RuntimeError):
    """Raised when a black-box service evaluator fails during a probe."""


class NumericalAbort(FloatingPointError):
    """Raised when a primal-dual iterate contains NaN or Inf.

    Attributes:
        iteration (int): Index of the iteration that produced the bad iterate.
        snapshot (dict[str, Any]): Copies of the state and intermediate values.
        partial_trace (Optional[Any]): The trace up to the failing iteration,
            attached by ``run``.
    """

    def __init__(
        self, message: str, iteration: int, snapshot: Optional[dict[str, Any]] = None
    ) -> None:
        self.iteration = iteration
        self.snapshot = snapshot if snapshot is not None else {}
        self.partial_trace: Optional[Any] = None
        super().__init__(f"iteration {iteration}: {message}")
