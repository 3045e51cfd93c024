"""Convergence diagnostics for propagation trajectories.

A trajectory run with QR normalization is a subspace iteration, so its
blocks should rotate into the operator's dominant eigenspace at a rate set
by the eigenvalue-magnitude ratio across the k/k+1 boundary. The report
measures that rotation directly (principal angles against a dense
reference spectrum) plus an oracle-free eigen-residual, and flags spectra
whose near-ties make the angle criterion unreliable.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .graph import PropagationOperator
from .linalg import ORACLE_CAP, EigenPairs, dense_mirror, dense_sym_eigen, principal_angles, spmm
from .propagation import Trajectory

# Adjacent |eigenvalue| ratios above this count as degenerate.
DEGENERACY_THRESHOLD = 1.0 - 1e-8


@dataclass(frozen=True)
class StepDiagnostics:
    """Measurements at one post-normalization step."""

    p: int
    max_principal_angle: float | None
    eigen_residual: float
    per_column_cosines: np.ndarray | None


@dataclass(frozen=True)
class ConvergenceReport:
    """Per-step convergence measurements plus oracle spectrum summary.

    ``oracle_gap`` is |lambda_{k+1}| / |lambda_k|; ``degenerate`` is set
    when any adjacent magnitude ratio among the top k+1 eigenvalues
    exceeds 1 - 1e-8. Oracle-dependent fields are None when the operator
    exceeds the dense-oracle cap, in which case only residuals appear.
    """

    per_step: tuple
    oracle_gap: float | None
    degenerate: bool | None
    converged_at: int | None
    tolerance: float
    k: int
    n: int

    @property
    def converged(self) -> bool:
        return self.converged_at is not None


def _adjacent_magnitude_ratios(values: np.ndarray) -> np.ndarray:
    mags = np.abs(values)
    with np.errstate(divide="ignore", invalid="ignore"):
        ratios = mags[1:] / mags[:-1]
    # magnitudes are sorted descending, so 0/0 is the only non-finite case:
    # an exact tie at zero, which is degenerate
    return np.where(np.isfinite(ratios), ratios, 1.0)


def convergence_report(
    op: PropagationOperator,
    t: Trajectory,
    tolerance: float = 1e-6,
    cap: int = ORACLE_CAP,
) -> ConvergenceReport:
    """Measure how close each normalized step is to the dominant eigenspace.

    Parameters
    ----------
    op : PropagationOperator
        The operator the trajectory was run on.
    t : Trajectory
        Must come from QR normalization, or L2 with k = 1; other settings
        do not produce orthonormal blocks to compare.
    tolerance : float
        Angle threshold (radians) defining ``converged_at``.
    cap : int
        Dense-oracle size limit. Above it the report carries residuals
        only.

    Returns
    -------
    ConvergenceReport
        One row per post-normalization step (p a multiple of the
        trajectory's normalization interval).
    """
    cfg = t.config
    if cfg.normalization == "none":
        raise ValueError(
            "diagnostics need orthonormal steps; trajectory was run without "
            "normalization"
        )
    if cfg.normalization == "l2" and cfg.k != 1:
        raise ValueError(
            "l2-normalized columns are not mutually orthogonal; use k = 1 "
            "or QR normalization for diagnostics"
        )
    n, k = op.n, cfg.k

    oracle = None
    oracle_gap = None
    degenerate = None
    if n <= cap:
        probe = dense_sym_eigen(dense_mirror(op, cap), min(k + 1, n), cap)
        oracle = EigenPairs(probe.values[:k], probe.vectors[:, :k])
        ratios = _adjacent_magnitude_ratios(probe.values)
        degenerate = bool((ratios > DEGENERACY_THRESHOLD).any())
        if k < n:
            oracle_gap = float(ratios[k - 1])

    rows = []
    converged_at = None
    for p in range(cfg.norm_every, cfg.steps + 1, cfg.norm_every):
        a = t.steps[p]
        sa = spmm(op, a)
        rayleigh = np.einsum("ij,ij->j", a, sa)
        residual = float(np.linalg.norm(sa - a * rayleigh))
        angle = None
        cosines = None
        if oracle is not None:
            angles = principal_angles(a, oracle.vectors)
            angle = float(angles[-1])
            cosines = np.abs(np.einsum("ij,ij->j", a, oracle.vectors))
            if converged_at is None and angle < tolerance:
                converged_at = p
        rows.append(StepDiagnostics(p, angle, residual, cosines))

    return ConvergenceReport(
        per_step=tuple(rows),
        oracle_gap=oracle_gap,
        degenerate=degenerate,
        converged_at=converged_at,
        tolerance=tolerance,
        k=k,
        n=n,
    )


def rate_fit(report: ConvergenceReport) -> float:
    """Per-step angle contraction factor from a least-squares log fit.

    Fits log(max principal angle) against p over the steps whose angle
    lies in (1e-12, 0.5), i.e. past the initial transient but above the
    float noise floor, and returns e^slope. For an operator with a clean
    spectral gap this recovers |lambda_{k+1} / lambda_k|.

    Raises
    ------
    ValueError
        If fewer than 5 steps are usable.
    """
    usable = [
        (row.p, row.max_principal_angle)
        for row in report.per_step
        if row.max_principal_angle is not None
        and 1e-12 < row.max_principal_angle < 0.5
    ]
    if len(usable) < 5:
        raise ValueError(
            f"rate fit needs at least 5 steps with angle in (1e-12, 0.5); "
            f"got {len(usable)}"
        )
    if report.degenerate:
        warnings.warn(
            "spectrum is degenerate at the subspace boundary; the fitted "
            "contraction factor is unreliable",
            RuntimeWarning,
            stacklevel=2,
        )
    ps = np.array([p for p, _ in usable], dtype=np.float64)
    logs = np.log(np.array([a for _, a in usable], dtype=np.float64))
    slope = np.polyfit(ps, logs, 1)[0]
    return float(np.exp(slope))


def sign_align(a: np.ndarray, oracle: EigenPairs) -> np.ndarray:
    """Flip columns of ``a`` to correlate non-negatively with oracle columns.

    Matching is positional: column j of ``a`` is compared with oracle
    vector j (both orderings are by descending eigenvalue magnitude).
    """
    v = oracle.vectors
    if a.shape != v.shape:
        raise ValueError(f"shape mismatch: block {a.shape} vs oracle {v.shape}")
    dots = np.einsum("ij,ij->j", a, v)
    signs = np.where(dots < 0, -1.0, 1.0)
    return a * signs
