"""Undirected graphs in compressed sparse row form and the propagation
operators built from them.

A graph stores only its connectivity: ``row_offsets`` and ``col_indices``
describe the sorted adjacency lists of a simple undirected graph with no
self-loops. Operators derived from a graph (normalized adjacency, normalized
Laplacian, raw adjacency) carry their own CSR value arrays and may contain
diagonal entries even though the underlying graph does not.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from functools import cached_property
from typing import Iterable, Sequence

import numpy as np
import scipy.sparse as sp

from .errors import EdgeListError

OPERATOR_KINDS = ("adj-norm", "lap-norm", "adj-raw", "custom")


@dataclass(eq=False)
class Graph:
    """Simple undirected graph in CSR form.

    Attributes
    ----------
    n : int
        Number of nodes, indexed 0..n-1.
    row_offsets : ndarray of int64, shape (n + 1,)
        CSR row pointer; ``col_indices[row_offsets[u]:row_offsets[u+1]]``
        are the neighbors of node ``u`` in increasing order.
    col_indices : ndarray of int64, shape (2 * m,)
        Flattened adjacency lists; every undirected edge appears in both
        orientations.
    """

    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray

    def __post_init__(self):
        self.row_offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        self.col_indices = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        self.row_offsets.setflags(write=False)
        self.col_indices.setflags(write=False)

    @property
    def m(self) -> int:
        """Number of undirected edges."""
        return self.col_indices.shape[0] // 2

    def neighbors(self, u: int) -> np.ndarray:
        return self.col_indices[self.row_offsets[u] : self.row_offsets[u + 1]]

    def edges(self) -> np.ndarray:
        """Return the m edges as an (m, 2) array with u < v, lexicographic."""
        rows = np.repeat(np.arange(self.n, dtype=np.int64), degrees(self))
        keep = rows < self.col_indices
        return np.column_stack([rows[keep], self.col_indices[keep]])


def degrees(g: Graph) -> np.ndarray:
    """Node degrees as an int64 array of shape (n,)."""
    return np.diff(g.row_offsets)


def build_graph(n: int, edges: Iterable[Sequence[int]]) -> Graph:
    """Build a graph from an iterable of (u, v) pairs.

    Duplicate pairs and reversed orientations collapse to a single
    undirected edge. Self-loops and out-of-range endpoints are rejected.
    """
    if n < 1:
        raise EdgeListError(f"node count must be at least 1, got {n}")
    pairs = np.asarray(list(edges), dtype=np.int64)
    if pairs.size == 0:
        pairs = pairs.reshape(0, 2)
    if pairs.ndim != 2 or pairs.shape[1] != 2:
        raise EdgeListError("edges must be (u, v) pairs")
    if pairs.size:
        if pairs.min() < 0 or pairs.max() >= n:
            bad = pairs[(pairs.min(axis=1) < 0) | (pairs.max(axis=1) >= n)][0]
            raise EdgeListError(
                f"edge ({bad[0]}, {bad[1]}) out of range for n = {n}"
            )
        if (pairs[:, 0] == pairs[:, 1]).any():
            u = int(pairs[pairs[:, 0] == pairs[:, 1]][0, 0])
            raise EdgeListError(f"self-loop at node {u} not allowed")
    canon = np.sort(pairs, axis=1)
    canon = np.unique(canon, axis=0)
    return Graph(n, *_csr_from_canonical(n, canon))


def _csr_from_canonical(n: int, canon: np.ndarray):
    # canon holds deduplicated edges with u < v; emit both orientations.
    src = np.concatenate([canon[:, 0], canon[:, 1]])
    dst = np.concatenate([canon[:, 1], canon[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    counts = np.bincount(src, minlength=n)
    row_offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    return row_offsets, dst.astype(np.int64)


def load_edge_list(source) -> Graph:
    """Parse a whitespace-separated edge list into a Graph.

    Parameters
    ----------
    source : path-like or file object
        Text or binary stream. Each meaningful line holds two integer
        endpoints ``u v``. Blank lines and lines starting with ``#`` are
        skipped. The first meaningful line may instead be ``n <N>`` to
        declare the node count; otherwise the count is one past the
        largest endpoint seen.

    Returns
    -------
    Graph

    Raises
    ------
    EdgeListError
        On self-loops, non-integer tokens, wrong token counts, negative
        endpoints, or endpoints at or above a declared node count. The
        error message carries the offending line number.
    """
    if hasattr(source, "read"):
        return _parse_edge_lines(source)
    with open(os.fspath(source), "rb") as fh:
        return _parse_edge_lines(fh)


def _parse_edge_lines(stream) -> Graph:
    declared_n = None
    pairs = []
    first_meaningful = True
    for lineno, raw in enumerate(stream, start=1):
        if isinstance(raw, bytes):
            try:
                raw = raw.decode("utf-8")
            except UnicodeDecodeError:
                raise EdgeListError("not valid UTF-8 text", line=lineno)
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if first_meaningful and tokens[0] == "n":
            if len(tokens) != 2:
                raise EdgeListError("node-count header must be 'n <N>'", line=lineno)
            declared_n = _parse_int(tokens[1], lineno)
            if declared_n < 1:
                raise EdgeListError(
                    f"declared node count {declared_n} must be at least 1",
                    line=lineno,
                )
            first_meaningful = False
            continue
        first_meaningful = False
        if len(tokens) != 2:
            raise EdgeListError(
                f"expected two endpoints, got {len(tokens)} tokens", line=lineno
            )
        u = _parse_int(tokens[0], lineno)
        v = _parse_int(tokens[1], lineno)
        if u < 0 or v < 0:
            raise EdgeListError(f"negative endpoint in edge ({u}, {v})", line=lineno)
        if u == v:
            raise EdgeListError(f"self-loop at node {u} not allowed", line=lineno)
        if declared_n is not None and (u >= declared_n or v >= declared_n):
            raise EdgeListError(
                f"edge ({u}, {v}) out of range for declared n = {declared_n}",
                line=lineno,
            )
        pairs.append((u, v))
    if declared_n is not None:
        n = declared_n
    elif pairs:
        n = int(max(max(p) for p in pairs)) + 1
    else:
        raise EdgeListError("empty edge list and no node-count header")
    return build_graph(n, pairs)


def _parse_int(token: str, lineno: int) -> int:
    try:
        return int(token)
    except ValueError:
        raise EdgeListError(f"not an integer: {token!r}", line=lineno) from None


def from_adjacency(matrix) -> Graph:
    """Build a graph from a symmetric binary adjacency matrix.

    Accepts a dense array or any scipy sparse matrix. Off-diagonal nonzeros
    become edges; diagonal entries must be zero.
    """
    a = sp.csr_matrix(matrix)
    if a.shape[0] != a.shape[1]:
        raise EdgeListError(f"adjacency matrix must be square, got {a.shape}")
    if (a != a.T).nnz != 0:
        raise EdgeListError("adjacency matrix must be symmetric")
    if a.diagonal().any():
        raise EdgeListError("adjacency matrix must have an empty diagonal")
    coo = sp.triu(a, k=1).tocoo()
    return build_graph(a.shape[0], np.column_stack([coo.row, coo.col]))


@dataclass(eq=False)
class PropagationOperator:
    """A sparse symmetric operator stored in CSR form.

    ``kind`` is one of ``adj-norm`` (degree-normalized adjacency with
    implicit self-loops), ``lap-norm`` (its Laplacian complement),
    ``adj-raw`` (plain 0/1 adjacency) or ``custom``.
    """

    kind: str
    n: int
    row_offsets: np.ndarray
    col_indices: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        if self.kind not in OPERATOR_KINDS:
            raise ValueError(f"unknown operator kind {self.kind!r}")
        self.row_offsets = np.ascontiguousarray(self.row_offsets, dtype=np.int64)
        self.col_indices = np.ascontiguousarray(self.col_indices, dtype=np.int64)
        self.values = np.ascontiguousarray(self.values, dtype=np.float64)
        for arr in (self.row_offsets, self.col_indices, self.values):
            arr.setflags(write=False)

    @cached_property
    def matrix(self) -> sp.csr_matrix:
        """The operator as a scipy CSR matrix, built once and cached."""
        return sp.csr_matrix(
            (self.values, self.col_indices, self.row_offsets), shape=(self.n, self.n)
        )

    @property
    def nnz(self) -> int:
        return self.values.shape[0]


def _loop_augmented_coo(g: Graph):
    # structure of A + I: adjacency entries plus one diagonal entry per row
    deg = degrees(g)
    rows = np.concatenate(
        [np.repeat(np.arange(g.n, dtype=np.int64), deg), np.arange(g.n, dtype=np.int64)]
    )
    cols = np.concatenate([g.col_indices, np.arange(g.n, dtype=np.int64)])
    order = np.lexsort((cols, rows))
    return rows[order], cols[order], deg


def sym_norm_adjacency(g: Graph) -> PropagationOperator:
    """Symmetrically normalized adjacency with implicit self-loops.

    Entry (u, v) is ``1 / sqrt((deg(u) + 1) * (deg(v) + 1))`` wherever
    ``A + I`` is nonzero. The spectrum lies in [-1, 1] and the vector
    ``sqrt(deg + 1)`` is fixed with eigenvalue 1.
    """
    rows, cols, deg = _loop_augmented_coo(g)
    dinv = 1.0 / np.sqrt(deg.astype(np.float64) + 1.0)
    values = dinv[rows] * dinv[cols]
    counts = np.bincount(rows, minlength=g.n)
    row_offsets = np.zeros(g.n + 1, dtype=np.int64)
    np.cumsum(counts, out=row_offsets[1:])
    return PropagationOperator("adj-norm", g.n, row_offsets, cols, values)


def sym_norm_laplacian(g: Graph) -> PropagationOperator:
    """Normalized Laplacian, the exact complement ``I - adj-norm``.

    Shares the structure of the normalized adjacency; each value is
    negated, with 1 added on the diagonal. The spectrum lies in [0, 2].
    """
    base = sym_norm_adjacency(g)
    values = -base.values.copy()
    diag = base.col_indices == np.repeat(
        np.arange(g.n, dtype=np.int64), np.diff(base.row_offsets)
    )
    values[diag] += 1.0
    return PropagationOperator(
        "lap-norm", g.n, base.row_offsets.copy(), base.col_indices.copy(), values
    )


def raw_adjacency(g: Graph) -> PropagationOperator:
    """Plain 0/1 adjacency, sharing the graph's CSR structure."""
    return PropagationOperator(
        "adj-raw",
        g.n,
        g.row_offsets.copy(),
        g.col_indices.copy(),
        np.ones(g.col_indices.shape[0], dtype=np.float64),
    )


def custom_operator(matrix, symmetry_tol: float = 1e-10) -> PropagationOperator:
    """Wrap an arbitrary symmetric matrix (dense or sparse) as an operator."""
    m = sp.csr_matrix(matrix)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"operator matrix must be square, got {m.shape}")
    asym = abs(m - m.T)
    if asym.nnz and asym.max() > symmetry_tol:
        raise ValueError("operator matrix must be symmetric")
    m.sort_indices()
    return PropagationOperator(
        "custom",
        m.shape[0],
        m.indptr.astype(np.int64),
        m.indices.astype(np.int64),
        m.data.astype(np.float64),
    )


def random_regular_graph(n: int, d: int, seed: int, max_tries: int = 100) -> Graph:
    """Sample a simple d-regular graph by configuration-model rejection.

    Pairs up node stubs uniformly at random and rejects pairings with
    self-loops or repeated edges, up to ``max_tries`` attempts.
    """
    if n < 2 or d < 1 or d >= n:
        raise ValueError(f"need 1 <= d < n with n >= 2, got n = {n}, d = {d}")
    if (n * d) % 2 != 0:
        raise ValueError(f"n * d must be even, got n = {n}, d = {d}")
    rng = np.random.Generator(np.random.Philox(key=[seed, 0]))
    stubs = np.repeat(np.arange(n, dtype=np.int64), d)
    for _ in range(max_tries):
        perm = rng.permutation(stubs)
        u, v = perm[0::2], perm[1::2]
        if (u == v).any():
            continue
        lo, hi = np.minimum(u, v), np.maximum(u, v)
        key = lo * n + hi
        if np.unique(key).size != key.size:
            continue
        return build_graph(n, np.column_stack([lo, hi]))
    raise RuntimeError(
        f"no simple {d}-regular graph on {n} nodes found in {max_tries} "
        "pairing attempts"
    )


def operator_from_name(name: str, g: Graph) -> PropagationOperator:
    makers = {
        "adj-norm": sym_norm_adjacency,
        "lap-norm": sym_norm_laplacian,
        "adj-raw": raw_adjacency,
    }
    if name not in makers:
        raise ValueError(
            f"unknown operator {name!r}; expected one of {sorted(makers)}"
        )
    return makers[name](g)
