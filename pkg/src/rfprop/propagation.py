"""The propagation engine: repeatedly push a random feature block through a
sparse operator, renormalizing on a fixed schedule, and keep every
intermediate block.

For a block ``a`` of shape (n, k) the update at step p is

    a <- op @ a            followed, when p is a multiple of the
    a <- N(a)              normalization interval, by N: per-column
                           scaling to unit norm (``l2``), column
                           orthonormalization (``qr``), or nothing
                           (``none``).

A trajectory is the full sequence of blocks including the initial draw, so
its horizontal concatenation has width k * (steps + 1). With ``qr`` and a
spectral gap the blocks converge, up to column signs, to the operator's
dominant eigenvectors, which is what makes trajectories useful as
positional encodings and as subspace-iteration diagnostics.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from .errors import PropagationOverflowError
from .graph import PropagationOperator
from .linalg import normalize_l2, normalize_qr, spmm
from .validation import check_feature_block

NORMALIZATIONS = ("l2", "qr", "none")
DISTRIBUTIONS = ("normal", "rademacher")


@dataclass(frozen=True)
class RfpConfig:
    """Settings for one batch of propagation runs.

    Attributes
    ----------
    k : int
        Columns per block (k >= 1).
    steps : int
        Number of propagation steps P (>= 1); a trajectory keeps P + 1
        blocks counting the initial draw.
    normalization : str
        One of ``l2``, ``qr``, ``none``.
    norm_every : int
        Normalize after step p when p is a multiple of this interval.
    distribution : str
        Initial block distribution, ``normal`` or ``rademacher``.
    trajectories : int
        Number of independent trajectories B (>= 1).
    seed : int
        Base seed; trajectory b draws from the counter-based stream keyed
        (seed, b), so any subset of trajectories can be reproduced without
        generating the others.
    """

    k: int
    steps: int
    normalization: str = "qr"
    norm_every: int = 1
    distribution: str = "normal"
    trajectories: int = 1
    seed: int = 0

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be at least 1, got {self.k}")
        if self.steps < 1:
            raise ValueError(f"steps must be at least 1, got {self.steps}")
        if self.normalization not in NORMALIZATIONS:
            raise ValueError(
                f"normalization must be one of {NORMALIZATIONS}, "
                f"got {self.normalization!r}"
            )
        if self.norm_every < 1:
            raise ValueError(f"norm_every must be at least 1, got {self.norm_every}")
        if self.distribution not in DISTRIBUTIONS:
            raise ValueError(
                f"distribution must be one of {DISTRIBUTIONS}, "
                f"got {self.distribution!r}"
            )
        if self.trajectories < 1:
            raise ValueError(
                f"trajectories must be at least 1, got {self.trajectories}"
            )
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must fit in an unsigned 64-bit int, got {self.seed}")


def random_block(
    distribution: str, seed: int, stream: int, n: int, k: int
) -> np.ndarray:
    """Draw an (n, k) block from the counter-based stream keyed (seed, stream)."""
    rng = np.random.Generator(np.random.Philox(key=[seed, stream]))
    if distribution == "normal":
        return rng.standard_normal((n, k))
    if distribution == "rademacher":
        return rng.integers(0, 2, size=(n, k)).astype(np.float64) * 2.0 - 1.0
    raise ValueError(f"unknown distribution {distribution!r}")


def sample_init(cfg: RfpConfig, n: int, b: int) -> np.ndarray:
    """Initial block for trajectory ``b`` on a graph with ``n`` nodes."""
    if not 0 <= b < cfg.trajectories:
        raise ValueError(
            f"trajectory index {b} out of range for {cfg.trajectories} trajectories"
        )
    if cfg.k > n:
        raise ValueError(
            f"k = {cfg.k} exceeds n = {n}; at most n columns can stay "
            "independent (and QR requires it)"
        )
    return random_block(cfg.distribution, cfg.seed, b, n, cfg.k)


def rfp_step(
    op: PropagationOperator, a_prev: np.ndarray, p: int, cfg: RfpConfig
) -> np.ndarray:
    """One propagation step: multiply, then normalize when the schedule says so.

    Raises
    ------
    PropagationOverflowError
        If the product leaves the finite range, naming the step ``p``.
    """
    a = spmm(op, a_prev)
    if not np.isfinite(a).all():
        raise PropagationOverflowError(p)
    if cfg.normalization == "l2" and p % cfg.norm_every == 0:
        a = normalize_l2(a)
    elif cfg.normalization == "qr" and p % cfg.norm_every == 0:
        a = normalize_qr(a)
    return a


@dataclass(eq=False)
class Trajectory:
    """All blocks of one propagation run: steps[0] is the initial draw."""

    steps: list
    config: RfpConfig
    index: int

    @cached_property
    def concat(self) -> np.ndarray:
        """Blocks side by side, shape (n, k * (steps + 1)); built lazily."""
        return np.ascontiguousarray(np.hstack(self.steps))

    @property
    def n(self) -> int:
        return self.steps[0].shape[0]


def run_trajectory(op: PropagationOperator, cfg: RfpConfig, b: int = 0) -> Trajectory:
    """Run one trajectory of ``cfg.steps`` propagation steps on ``op``."""
    blocks = [sample_init(cfg, op.n, b)]
    for p in range(1, cfg.steps + 1):
        blocks.append(rfp_step(op, blocks[-1], p, cfg))
    return Trajectory(steps=blocks, config=cfg, index=b)


@dataclass(eq=False)
class TrajectorySet:
    """A batch of trajectories sharing one operator and configuration."""

    trajectories: tuple
    config: RfpConfig
    operator_kind: str
    n: int

    def __iter__(self):
        return iter(self.trajectories)

    def __len__(self):
        return len(self.trajectories)


def run_trajectory_set(
    op: PropagationOperator, cfg: RfpConfig, workers: int = 1
) -> TrajectorySet:
    """Run all ``cfg.trajectories`` runs, optionally on a thread pool.

    Results are ordered by trajectory index and identical for any worker
    count: each trajectory's randomness comes only from its own keyed
    stream.
    """
    if workers < 1:
        raise ValueError(f"workers must be at least 1, got {workers}")
    indices = range(cfg.trajectories)
    if workers == 1:
        runs = [run_trajectory(op, cfg, b) for b in indices]
    else:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            runs = list(pool.map(lambda b: run_trajectory(op, cfg, b), indices))
    return TrajectorySet(
        trajectories=tuple(runs), config=cfg, operator_kind=op.kind, n=op.n
    )


def assemble_features(
    t_set: TrajectorySet, f_in: np.ndarray | None = None
) -> np.ndarray:
    """Concatenate input features (optional) with every trajectory.

    Column layout: ``[f_in | t_0.concat | t_1.concat | ...]``, giving a
    width of ``c_in + B * k * (steps + 1)``.
    """
    parts = []
    if f_in is not None:
        parts.append(check_feature_block(f_in, n_rows=t_set.n, name="f_in"))
    parts.extend(t.concat for t in t_set.trajectories)
    return np.ascontiguousarray(np.hstack(parts))
