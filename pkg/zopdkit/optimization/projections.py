import numpy as np
from numpy.typing import ArrayLike, NDArray


def project_box(v: ArrayLike, lower: ArrayLike, upper: ArrayLike) -> NDArray[np.float64]:
    """Euclidean projection onto the box [lower, upper] (entrywise clamp).

    Raises:
        ValueError: If ``lower > upper`` anywhere.
    """
    lower = np.asarray(lower, dtype=np.float64)
    upper = np.asarray(upper, dtype=np.float64)
    if np.any(lower > upper):
        raise ValueError("lower must not exceed upper")
    return np.minimum(np.maximum(np.asarray(v, dtype=np.float64), lower), upper)


def positive_part(v: ArrayLike) -> NDArray[np.float64]:
    """Projection onto the nonnegative orthant, max(v, 0)."""
    return np.maximum(np.asarray(v, dtype=np.float64), 0.0)
