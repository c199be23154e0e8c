"""Input validation helpers shared by the library, the estimators and the CLI."""

from __future__ import annotations

import numpy as np


def check_correspondences(X) -> np.ndarray:
    """Coerce correspondences to a float (m, 4) array of (x1, x2, y1, y2) rows.

    Requires m >= 1 and finite entries. A single flat 4-vector is accepted
    and reshaped to one row.
    """
    arr = np.asarray(X, dtype=float)
    if arr.ndim == 1 and arr.shape == (4,):
        arr = arr.reshape(1, 4)
    if arr.ndim != 2 or arr.shape[1] != 4:
        raise ValueError(
            f"correspondences must have shape (m, 4) with rows (x1, x2, y1, y2), got {arr.shape}"
        )
    if arr.shape[0] < 1:
        raise ValueError("need at least one correspondence")
    if not np.all(np.isfinite(arr)):
        raise ValueError("correspondences must contain only finite values")
    return arr


def check_square(M, size: int, name: str = "matrix") -> np.ndarray:
    """Coerce to a float (size, size) array with finite entries."""
    arr = np.asarray(M, dtype=float)
    if arr.shape != (size, size):
        raise ValueError(f"{name} must be {size}x{size}, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_vector(v, size: int, name: str = "vector") -> np.ndarray:
    """Coerce to a float (size,) array with finite entries."""
    arr = np.asarray(v, dtype=float).ravel()
    if arr.shape != (size,):
        raise ValueError(f"{name} must be a {size}-vector, got shape {arr.shape}")
    if not np.all(np.isfinite(arr)):
        raise ValueError(f"{name} must contain only finite values")
    return arr


def check_image_point(x, name: str = "image point") -> np.ndarray:
    """Coerce to a float (2,) image point."""
    return check_vector(x, 2, name)
