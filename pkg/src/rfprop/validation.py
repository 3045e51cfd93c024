"""Input validation helpers shared by the numeric layers."""

from __future__ import annotations

import numpy as np


def check_feature_block(x, n_rows: int | None = None, name: str = "x") -> np.ndarray:
    """Coerce to a C-contiguous float64 matrix and verify finiteness.

    A feature block is a two-dimensional array of shape (n, k) with
    n >= 1, k >= 1 and every entry finite.
    """
    arr = np.ascontiguousarray(x, dtype=np.float64)
    if arr.ndim != 2:
        raise ValueError(f"{name} must be two-dimensional, got ndim = {arr.ndim}")
    if arr.shape[0] < 1 or arr.shape[1] < 1:
        raise ValueError(f"{name} must be non-empty, got shape {arr.shape}")
    if n_rows is not None and arr.shape[0] != n_rows:
        raise ValueError(f"{name} must have {n_rows} rows, got {arr.shape[0]}")
    if not np.isfinite(arr).all():
        raise ValueError(f"{name} contains non-finite entries")
    return arr


def check_orthonormal(x: np.ndarray, tol: float = 1e-8, name: str = "x") -> None:
    gram = x.T @ x
    dev = np.abs(gram - np.eye(x.shape[1])).max()
    if dev > tol:
        raise ValueError(
            f"{name} must have orthonormal columns; max Gram deviation {dev:.3e} "
            f"exceeds {tol:.1e}"
        )
