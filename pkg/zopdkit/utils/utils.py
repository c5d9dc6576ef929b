from typing import Optional

import numpy as np
from numpy.typing import ArrayLike, NDArray


def as_vector(
    name: str, values: ArrayLike, length: Optional[int] = None
) -> NDArray[np.float64]:
    """
    Convert ``values`` to a 1-D float array and check its length.

    Raises:
        ValueError: If the array is not 1-D or has the wrong length.
    """
    vector = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if vector.ndim != 1:
        raise ValueError(f"{name} must be a vector, got shape {vector.shape}")
    if length is not None and vector.shape[0] != length:
        raise ValueError(f"{name} must have length {length}, got {vector.shape[0]}")
    return vector


def broadcast_vector(name: str, values: ArrayLike, length: int) -> NDArray[np.float64]:
    """
    Broadcast a scalar or length-1 value to a vector of ``length``.

    Raises:
        ValueError: If the value cannot be broadcast.
    """
    vector = np.atleast_1d(np.asarray(values, dtype=np.float64))
    if vector.shape[0] == 1 and length != 1:
        return np.full(length, vector[0], dtype=np.float64)
    return as_vector(name, vector, length)


def check_nonnegative(name: str, values: ArrayLike) -> None:
    """
    Check that no entry is NaN or negative (+inf is allowed).

    Raises:
        ValueError: If any entry is NaN or negative.
    """
    array = np.asarray(values, dtype=np.float64)
    if np.any(np.isnan(array)):
        raise ValueError(f"{name} contains NaN values.")
    if np.any(array < 0):
        raise ValueError(f"{name} must be nonnegative.")
