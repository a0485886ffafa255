"""Input checks shared by the functional API, the estimators and the CLI."""
from __future__ import annotations

import numpy as np
from sklearn.utils.validation import check_array


def check_sample(X, *, min_size: int = 1, name: str = "data") -> np.ndarray:
    """Return ``X`` as a finite, nonnegative 1-D float array.

    A single-column 2-D array is flattened; wider inputs are rejected.
    """
    arr = check_array(X, ensure_2d=False, dtype=np.float64, input_name=name)
    if arr.ndim == 2:
        if arr.shape[1] != 1:
            raise ValueError(f"{name} must be one column, got shape {arr.shape}")
        arr = arr[:, 0]
    if arr.shape[0] < min_size:
        raise ValueError(f"{name} needs at least {min_size} values, got {arr.shape[0]}")
    if np.any(arr < 0):
        first = int(np.flatnonzero(arr < 0)[0])
        raise ValueError(f"{name} must be nonnegative; entry {first} is {arr[first]!r}")
    return arr


def check_gof_sample(X, n: int) -> np.ndarray:
    arr = check_sample(X, min_size=max(2 * n, 20))
    if not arr.mean() > 0:
        raise ValueError("data mean must be positive")
    if arr.min() == arr.max():
        raise ValueError("data are constant; the sum-versus-maximum comparison is degenerate")
    return arr


def check_subset_size(n: int) -> int:
    if isinstance(n, bool) or not isinstance(n, (int, np.integer)) or n < 2:
        raise ValueError(f"subset size n must be an integer >= 2, got {n!r}")
    return int(n)
