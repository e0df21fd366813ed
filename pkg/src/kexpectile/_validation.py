"""Input checks shared by the library modules."""

import numbers

import numpy as np

from .exceptions import ShapeError


def check_data(data, name="data"):
    """Return ``data`` as a finite 2-D float array with at least one row and column."""
    arr = np.asarray(data, dtype=float)
    if arr.ndim == 1:
        arr = arr.reshape(-1, 1)
    if arr.ndim != 2:
        raise ShapeError(f"{name} must be 2-dimensional, got ndim={arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ShapeError(f"{name} must have at least one row and one column")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} contains NaN or infinite values")
    return arr


def check_series(series):
    arr = np.asarray(series, dtype=float)
    if arr.ndim > 1:
        raise ShapeError(f"series must be 1-dimensional, got ndim={arr.ndim}")
    arr = arr.reshape(-1)
    if arr.size == 0:
        raise ValueError("series must contain at least one value")
    if not np.all(np.isfinite(arr)):
        raise ValueError("series contains NaN or infinite values")
    return arr


def check_tau(tau, name="tau"):
    """Validate an asymmetry level (scalar or array) in the open interval (0, 1)."""
    arr = np.asarray(tau, dtype=float)
    if not np.all((arr > 0.0) & (arr < 1.0)):
        raise ValueError(f"{name} must lie strictly between 0 and 1, got {tau!r}")
    return arr


def check_membership(labels, n_samples=None, n_clusters=None):
    arr = np.asarray(labels)
    if arr.ndim != 1:
        raise ShapeError("membership must be a 1-D sequence of cluster ids")
    if arr.size and not np.issubdtype(arr.dtype, np.integer):
        as_int = arr.astype(np.int64)
        if not np.array_equal(as_int, arr):
            raise ValueError("membership labels must be integers")
        arr = as_int
    arr = arr.astype(np.int64, copy=False)
    if n_samples is not None and arr.shape[0] != n_samples:
        raise ShapeError(f"membership has length {arr.shape[0]}, expected {n_samples}")
    if arr.size and arr.min() < 0:
        raise ValueError("membership labels must be non-negative")
    if n_clusters is not None and arr.size and arr.max() >= n_clusters:
        raise ValueError(f"membership label {arr.max()} out of range for {n_clusters} clusters")
    return arr


def check_n_clusters(k, n_samples):
    if not isinstance(k, numbers.Integral) or isinstance(k, bool):
        raise TypeError(f"number of clusters must be an integer, got {k!r}")
    if k <= 0:
        raise ValueError(f"number of clusters must be positive, got {k}")
    if k > n_samples:
        raise ValueError(f"number of clusters ({k}) exceeds number of samples ({n_samples})")
    return int(k)


def check_seed(seed):
    if not isinstance(seed, numbers.Integral) or isinstance(seed, bool):
        raise TypeError(f"seed must be an integer, got {seed!r}")
    if not 0 <= seed < 2**64:
        raise ValueError(f"seed must be a 64-bit unsigned integer, got {seed}")
    return int(seed)
