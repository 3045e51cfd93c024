"""Numeric kernels: sparse products, column normalizations, a dense
eigensolver used as a reference oracle, and principal angles.

Everything here works on float64 and is deterministic for identical inputs.
The dense routines are capped at ORACLE_CAP nodes; they exist to verify the
iterative paths, not to scale.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateColumnError, OracleCapError, RankCollapseError
from .graph import PropagationOperator
from .validation import check_feature_block, check_orthonormal

ORACLE_CAP = 2048

# Entries smaller than this are treated as zero when fixing eigenvector signs.
SIGN_EPS = 1e-12


def spmm(op: PropagationOperator, x: np.ndarray) -> np.ndarray:
    """Multiply a sparse operator into a dense feature block.

    Parameters
    ----------
    op : PropagationOperator
    x : ndarray, shape (n, k)

    Returns
    -------
    ndarray, shape (n, k)
        ``op @ x`` as a C-contiguous float64 array. One pass over the
        stored nonzeros; the operator is never densified.
    """
    if x.ndim != 2:
        raise ValueError(f"x must be two-dimensional, got ndim = {x.ndim}")
    if x.shape[0] != op.n:
        raise ValueError(
            f"row mismatch: operator has n = {op.n}, block has {x.shape[0]} rows"
        )
    out = op.matrix @ np.ascontiguousarray(x, dtype=np.float64)
    return np.ascontiguousarray(out)


def normalize_l2(x: np.ndarray) -> np.ndarray:
    """Scale each column to unit Euclidean norm.

    Raises
    ------
    DegenerateColumnError
        If any column norm is numerically zero.
    """
    x = check_feature_block(x)
    norms = np.linalg.norm(x, axis=0)
    bad = np.flatnonzero(norms < 1e-300)
    if bad.size:
        raise DegenerateColumnError(int(bad[0]), float(norms[bad[0]]))
    return x / norms


def normalize_qr(x: np.ndarray) -> np.ndarray:
    """Orthonormalize the columns of ``x`` by a reduced QR factorization.

    The result spans the same subspace as ``x`` and has a deterministic
    orientation: the diagonal of R is made non-negative. Rank deficiency
    is detected from the R diagonal against ``1e-10 * ||x||_F``.

    Raises
    ------
    RankCollapseError
        If some diagonal entry of R falls below the threshold, or if the
        block has more columns than rows.
    """
    x = check_feature_block(x)
    n, k = x.shape
    fro = float(np.linalg.norm(x))
    threshold = 1e-10 * fro
    if k > n:
        raise RankCollapseError(n, 0.0, threshold)
    q, r = np.linalg.qr(x, mode="reduced")
    diag = np.diagonal(r)
    small = np.flatnonzero(np.abs(diag) <= threshold)
    if small.size:
        j = int(small[0])
        raise RankCollapseError(j, float(abs(diag[j])), threshold)
    return np.ascontiguousarray(q * np.sign(diag))


@dataclass(frozen=True)
class EigenPairs:
    """Leading eigenpairs of a symmetric matrix.

    ``values`` is sorted by descending magnitude, ties broken by descending
    signed value. Each column of ``vectors`` has its first entry of
    magnitude above SIGN_EPS made positive.
    """

    values: np.ndarray
    vectors: np.ndarray


def apply_sign_convention(vectors: np.ndarray) -> np.ndarray:
    """Flip each column so its first non-negligible entry is positive."""
    v = np.array(vectors, dtype=np.float64)
    for j in range(v.shape[1]):
        nz = np.flatnonzero(np.abs(v[:, j]) > SIGN_EPS)
        if nz.size and v[nz[0], j] < 0:
            v[:, j] = -v[:, j]
    return v


def dense_sym_eigen(matrix: np.ndarray, k: int, cap: int = ORACLE_CAP) -> EigenPairs:
    """Top-k eigenpairs of a dense symmetric matrix, magnitude-ordered.

    This is the package's reference oracle. It refuses matrices above the
    size cap and checks symmetry up to 1e-10 before factorizing.

    Parameters
    ----------
    matrix : ndarray, shape (n, n)
    k : int
        Number of leading pairs, 1 <= k <= n.
    cap : int
        Inclusive size limit; raise OracleCapError beyond it.
    """
    m = np.asarray(matrix, dtype=np.float64)
    if m.ndim != 2 or m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix must be square, got shape {m.shape}")
    n = m.shape[0]
    if n > cap:
        raise OracleCapError(n, cap, what="dense eigensolver")
    if np.abs(m - m.T).max() > 1e-10:
        raise ValueError("matrix must be symmetric within 1e-10")
    if not 1 <= k <= n:
        raise ValueError(f"k must satisfy 1 <= k <= {n}, got {k}")
    w, v = np.linalg.eigh(m)
    order = np.lexsort((-w, -np.abs(w)))[:k]
    return EigenPairs(
        values=np.ascontiguousarray(w[order]),
        vectors=apply_sign_convention(v[:, order]),
    )


def principal_angles(u: np.ndarray, v: np.ndarray) -> np.ndarray:
    """Principal angles between the column spans of two orthonormal blocks.

    Returns the angles in ascending order, each in [0, pi/2], computed from
    the singular values of ``u.T @ v`` clipped into [0, 1]. Both blocks
    must have orthonormal columns within 1e-8.
    """
    u = check_feature_block(u, name="u")
    v = check_feature_block(v, name="v")
    if u.shape[0] != v.shape[0]:
        raise ValueError(
            f"blocks must share a row count, got {u.shape[0]} and {v.shape[0]}"
        )
    check_orthonormal(u, name="u")
    check_orthonormal(v, name="v")
    sigma = np.linalg.svd(u.T @ v, compute_uv=False)
    return np.arccos(np.clip(sigma, 0.0, 1.0))


def dense_mirror(op: PropagationOperator, cap: int = ORACLE_CAP) -> np.ndarray:
    """Densify a sparse operator for oracle-side checks, subject to the cap."""
    if op.n > cap:
        raise OracleCapError(op.n, cap, what="dense mirror")
    return op.matrix.toarray()
