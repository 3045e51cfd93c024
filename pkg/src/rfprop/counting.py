"""Randomized trace estimation and exact substructure counts.

The estimators share one identity: a quadratic form z^T S^P z is evaluated
by propagating the probe z with sparse matvecs and taking a dot product of
two intermediate vectors, never by forming S^P. Specializing to the raw
adjacency at P = 3 gives the Monte Carlo triangle counter, whose per-sample
values coincide bitwise with the generic trace estimator because both draw
probes from the same counter-based streams.

Exact counterparts (dense trace powers, neighbor-intersection enumeration,
the closed-form quadrangle count) are capped at oracle size and exist to
validate the estimators.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import OracleCapError, ZeroTraceError
from .graph import Graph, PropagationOperator, degrees, raw_adjacency
from .linalg import ORACLE_CAP, dense_mirror, dense_sym_eigen, spmm
from .propagation import RfpConfig, random_block, run_trajectory

# exact integers in float64 end here; dense walk counts must stay below
_FLOAT_EXACT_LIMIT = 2.0**53

# samples used by count_with_guarantee when the bound is inapplicable
FALLBACK_SAMPLES = 100

RANK_EPS = 1e-8


@dataclass(frozen=True)
class TraceEstimate:
    """Monte Carlo estimate of trace(S^power)."""

    value: float
    samples: int
    per_sample: np.ndarray
    power: int
    operator_kind: str
    exact: float | None = None


@dataclass(frozen=True)
class CountResult:
    """A substructure count, estimated and/or exact, plus sample metadata."""

    estimate: float
    exact: int | None = None
    epsilon: float | None = None
    delta: float | None = None
    m_used: int = 0
    m_required: int | None = None
    warning: str | None = None


def hutchinson_trace(
    op: PropagationOperator, power: int, m: int, seed: int
) -> TraceEstimate:
    """Estimate trace(S^power) with m Rademacher probes.

    Each probe z contributes z^T S^power z, evaluated as the dot product
    of S^floor(power/2) z and S^ceil(power/2) z so that only ``power``
    sparse matvecs are spent per probe. Probe i draws from the stream
    keyed (seed, i), so estimates are reproducible sample by sample.
    """
    if power < 1:
        raise ValueError(f"power must be at least 1, got {power}")
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    lo = power // 2
    hi = power - lo
    per_sample = np.empty(m, dtype=np.float64)
    for i in range(m):
        z = random_block("rademacher", seed, i, op.n, 1)
        left = z
        for _ in range(lo):
            left = spmm(op, left)
        right = z
        for _ in range(hi):
            right = spmm(op, right)
        per_sample[i] = left[:, 0] @ right[:, 0]
    return TraceEstimate(
        value=float(np.mean(per_sample)),
        samples=m,
        per_sample=per_sample,
        power=power,
        operator_kind=op.kind,
    )


def triangle_estimate(g: Graph, m: int, seed: int) -> CountResult:
    """Monte Carlo triangle count: mean of (A r)^T A (A r) / 6 over m probes.

    Each sample is the dot product of the first two propagated blocks of
    an unnormalized trajectory over the raw adjacency, i.e. a trace
    estimate of A^3 divided by 6 (every triangle is a closed 3-walk in 6
    orientations). Per-sample values match hutchinson_trace on the same
    seed bitwise.
    """
    if m < 1:
        raise ValueError(f"m must be at least 1, got {m}")
    op = raw_adjacency(g)
    cfg = RfpConfig(
        k=1,
        steps=2,
        normalization="none",
        distribution="rademacher",
        trajectories=m,
        seed=seed,
    )
    raw = np.empty(m, dtype=np.float64)
    for b in range(m):
        t = run_trajectory(op, cfg, b)
        raw[b] = t.steps[1][:, 0] @ t.steps[2][:, 0]
    return CountResult(estimate=float(np.mean(raw)) / 6.0, m_used=m)


def triangle_exact(g: Graph, cap: int = ORACLE_CAP) -> int:
    """Exact triangle count by sorted-neighbor intersection.

    Under the oracle cap the dense trace(A^3)/6 is computed as well and
    the two paths must agree.
    """
    total = 0
    for u, v in g.edges():
        total += np.intersect1d(
            g.neighbors(u), g.neighbors(v), assume_unique=True
        ).size
    if total % 3 != 0:
        raise RuntimeError("per-edge triangle tally not divisible by 3")
    by_enum = total // 3
    if g.n <= cap:
        a = dense_mirror(raw_adjacency(g), cap)
        tr = float(np.trace(a @ a @ a))
        by_trace = tr / 6.0
        if abs(by_trace - by_enum) > 1e-6:
            raise RuntimeError(
                f"triangle paths disagree: trace gives {by_trace}, "
                f"enumeration gives {by_enum}"
            )
    return int(by_enum)


def quadrangle_exact(g: Graph, cap: int = ORACLE_CAP) -> int:
    """Exact 4-cycle count via (trace(A^4) + trace(A^2) - 2 sum(deg^2)) / 8."""
    if g.n > cap:
        raise OracleCapError(g.n, cap, what="quadrangle count")
    a = dense_mirror(raw_adjacency(g), cap)
    a2 = a @ a
    t4 = float(np.trace(a2 @ a2))
    t2 = float(np.trace(a2))
    deg = degrees(g).astype(np.float64)
    raw = (t4 + t2 - 2.0 * float(deg @ deg)) / 8.0
    rounded = round(raw)
    if abs(raw - rounded) > 1e-6:
        raise RuntimeError(f"quadrangle closed form gave non-integer {raw}")
    return int(rounded)


def closed_walks(g: Graph, length: int, cap: int = ORACLE_CAP) -> int:
    """Exact number of closed walks of the given length, trace(A^length)."""
    if length < 1:
        raise ValueError(f"length must be at least 1, got {length}")
    if g.n > cap:
        raise OracleCapError(g.n, cap, what="closed-walk count")
    a = dense_mirror(raw_adjacency(g), cap)
    acc = a
    for _ in range(length - 1):
        acc = acc @ a
        if acc.max() >= _FLOAT_EXACT_LIMIT:
            raise OverflowError(
                f"walk counts exceed the exact float64 integer range at "
                f"length {length}"
            )
    trace = float(np.trace(acc))
    if trace >= _FLOAT_EXACT_LIMIT:
        raise OverflowError(
            f"total closed-walk count exceeds the exact float64 integer "
            f"range at length {length}"
        )
    return int(round(trace))


def required_samples(epsilon: float, delta: float, rho: float, rank: int) -> int:
    """Smallest sample count meeting the trace-estimator tail bound.

    Evaluates ceil(6 * epsilon^-2 * rho^2 * ln(2 * rank / delta)).
    """
    if not 0.0 < epsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    if rho < 1.0:
        raise ValueError(f"rho must be at least 1, got {rho}")
    if rank < 1:
        raise ValueError(f"rank must be at least 1, got {rank}")
    bound = 6.0 * epsilon**-2 * rho * rho * math.log(2.0 * rank / delta)
    return max(1, math.ceil(bound))


def spectral_rho(op: PropagationOperator, power: int, cap: int = ORACLE_CAP) -> float:
    """Spectral ratio sum|lambda^power| / sum(lambda^power) from the dense oracle.

    Raises
    ------
    ZeroTraceError
        When |trace(S^power)| <= 1e-10, where the ratio is undefined.
    """
    if power < 1:
        raise ValueError(f"power must be at least 1, got {power}")
    values = dense_sym_eigen(dense_mirror(op, cap), op.n, cap).values
    powered = values**power
    trace = float(powered.sum())
    if abs(trace) <= 1e-10:
        raise ZeroTraceError(
            f"trace of the {power}-th operator power is {trace:.3e}; the "
            "spectral ratio is undefined"
        )
    return float(np.abs(powered).sum() / trace)


def count_with_guarantee(
    g: Graph, epsilon: float, delta: float, seed: int, cap: int = ORACLE_CAP
) -> CountResult:
    """Triangle estimate with enough samples for an (epsilon, delta) guarantee.

    The sample count comes from the tail bound with rho and rank taken
    from the oracle spectrum of A^3. When the graph is triangle-free the
    relative-error guarantee is vacuous; a warning is attached and a
    fixed fallback sample count is used.
    """
    if g.n > cap:
        raise OracleCapError(g.n, cap, what="guaranteed triangle count")
    exact = triangle_exact(g, cap)
    if exact == 0:
        est = triangle_estimate(g, FALLBACK_SAMPLES, seed)
        return CountResult(
            estimate=est.estimate,
            exact=0,
            epsilon=epsilon,
            delta=delta,
            m_used=est.m_used,
            m_required=None,
            warning=(
                "graph has no triangles; the relative-error guarantee is "
                "inapplicable, falling back to a fixed sample count"
            ),
        )
    op = raw_adjacency(g)
    rho = spectral_rho(op, 3, cap)
    values = dense_sym_eigen(dense_mirror(op, cap), g.n, cap).values
    rank = int((np.abs(values**3) > RANK_EPS).sum())
    m_required = required_samples(epsilon, delta, rho, rank)
    est = triangle_estimate(g, m_required, seed)
    return CountResult(
        estimate=est.estimate,
        exact=exact,
        epsilon=epsilon,
        delta=delta,
        m_used=m_required,
        m_required=m_required,
    )
