"""Shared graph builders and independent reference implementations.

Everything here is deliberately written from scratch against the
mathematical definitions (dense matrices, brute-force enumeration, exact
integer arithmetic) so the package's sparse and randomized paths are
checked against code that shares nothing with them.
"""

from itertools import combinations, permutations

import numpy as np
import pytest

import rfprop as r


# ---------------------------------------------------------------- builders


def k3():
    return r.build_graph(3, [(0, 1), (1, 2), (0, 2)])


def k4():
    return r.build_graph(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)])


def c4():
    return r.build_graph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])


def path3():
    return r.build_graph(3, [(0, 1), (1, 2)])


def single_edge():
    return r.build_graph(2, [(0, 1)])


def er_edges(rng, n, p):
    """Edge array of a G(n, p) draw."""
    iu = np.triu_indices(n, k=1)
    mask = rng.random(iu[0].size) < p
    return np.column_stack([iu[0][mask], iu[1][mask]])


def is_connected(n, edges):
    adj = [[] for _ in range(n)]
    for u, v in edges:
        adj[u].append(v)
        adj[v].append(u)
    seen = {0}
    stack = [0]
    while stack:
        u = stack.pop()
        for v in adj[u]:
            if v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == n


def random_connected_edges(rng, n_lo, n_hi, p=None):
    """Keep drawing G(n, p) until the draw is connected."""
    while True:
        n = int(rng.integers(n_lo, n_hi + 1))
        prob = p if p is not None else min(0.9, max(0.15, 2.5 * np.log(n) / n))
        edges = er_edges(rng, n, prob)
        if len(edges) >= n - 1 and is_connected(n, edges):
            return n, edges


# ------------------------------------------------- dense reference operators


def dense_adjacency(n, edges):
    a = np.zeros((n, n))
    for u, v in edges:
        a[u, v] = a[v, u] = 1.0
    return a


def ref_sym_norm_adjacency(n, edges):
    a = dense_adjacency(n, edges)
    dinv = 1.0 / np.sqrt(a.sum(axis=1) + 1.0)
    return dinv[:, None] * (a + np.eye(n)) * dinv[None, :]


def ref_sym_norm_laplacian(n, edges):
    return np.eye(n) - ref_sym_norm_adjacency(n, edges)


# ------------------------------------------------------ brute-force counters


def brute_triangles(n, edges):
    edge_set = {(min(u, v), max(u, v)) for u, v in edges}
    count = 0
    for a, b, c in combinations(range(n), 3):
        if (a, b) in edge_set and (b, c) in edge_set and (a, c) in edge_set:
            count += 1
    return count


def brute_quadrangles(n, edges):
    """4-cycles counted as closed vertex sequences divided by symmetry (8)."""
    edge_set = {(min(u, v), max(u, v)) for u, v in edges}

    def adjacent(u, v):
        return (min(u, v), max(u, v)) in edge_set

    sequences = 0
    for quad in combinations(range(n), 4):
        for seq in permutations(quad):
            if (
                adjacent(seq[0], seq[1])
                and adjacent(seq[1], seq[2])
                and adjacent(seq[2], seq[3])
                and adjacent(seq[3], seq[0])
            ):
                sequences += 1
    assert sequences % 8 == 0
    return sequences // 8


def dp_closed_walks(n, edges, length):
    """trace(A^length) with exact Python integers."""
    a = [[0] * n for _ in range(n)]
    for u, v in edges:
        a[u][v] = a[v][u] = 1
    acc = a
    for _ in range(length - 1):
        acc = [
            [sum(acc[i][t] * a[t][j] for t in range(n)) for j in range(n)]
            for i in range(n)
        ]
    return sum(acc[i][i] for i in range(n))


# -------------------------------------------------------------------- misc


def graph_edges_array(g):
    return g.edges()


@pytest.fixture
def rng():
    return np.random.default_rng(20250815)
