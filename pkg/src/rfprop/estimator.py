"""Scikit-learn style front end for producing positional encodings.

The transformer is stateless in the sklearn sense (like Normalizer): fit
only validates parameters, transform derives everything from the graph it
is given, and identical inputs yield identical outputs because all
randomness flows from the seed.
"""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp
from sklearn.base import BaseEstimator, TransformerMixin

from .graph import Graph, build_graph, from_adjacency, operator_from_name
from .propagation import RfpConfig, assemble_features, run_trajectory_set


def as_graph(X) -> Graph:
    """Coerce common graph representations to a Graph.

    Accepts a Graph, an ``(n, edges)`` pair, a square symmetric adjacency
    matrix (dense or scipy sparse), or an (m, 2) integer edge array whose
    node count is inferred as max index + 1. Square arrays are read as
    adjacency matrices.
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, tuple) and len(X) == 2:
        n, edges = X
        return build_graph(int(n), edges)
    if sp.issparse(X):
        return from_adjacency(X)
    arr = np.asarray(X)
    if arr.ndim == 2 and arr.shape[0] == arr.shape[1]:
        return from_adjacency(arr)
    if arr.ndim == 2 and arr.shape[1] == 2:
        return build_graph(int(arr.max()) + 1, arr)
    raise TypeError(
        "expected a Graph, an (n, edges) pair, a square adjacency matrix, "
        f"or an (m, 2) edge array; got {type(X).__name__} with shape "
        f"{getattr(arr, 'shape', None)}"
    )


class RandomFeaturePropagation(BaseEstimator, TransformerMixin):
    """Positional encodings from propagated random node features.

    For a graph with n nodes, draws ``trajectories`` random (n, k) blocks,
    pushes each through ``steps`` applications of the chosen operator with
    periodic renormalization, and concatenates every intermediate block.

    Parameters
    ----------
    operator : str, default "adj-norm"
        "adj-norm" (normalized adjacency with self-loops), "lap-norm"
        (normalized Laplacian) or "adj-raw".
    k : int, default 8
        Random feature columns per trajectory.
    steps : int, default 16
        Propagation steps; output width per trajectory is k * (steps + 1).
    normalization : str, default "qr"
        "l2", "qr" or "none".
    norm_every : int, default 1
        Steps between renormalizations.
    distribution : str, default "normal"
        "normal" or "rademacher" initial features.
    trajectories : int, default 1
        Independent trajectories; widths add up.
    seed : int, default 0
        Base seed for the counter-based streams.
    workers : int, default 1
        Thread count for running trajectories; does not affect output.

    Examples
    --------
    >>> from rfprop import RandomFeaturePropagation, build_graph
    >>> g = build_graph(3, [(0, 1), (1, 2), (0, 2)])
    >>> pe = RandomFeaturePropagation(k=2, steps=3, seed=7).fit_transform(g)
    >>> pe.shape
    (3, 8)
    """

    def __init__(
        self,
        operator: str = "adj-norm",
        k: int = 8,
        steps: int = 16,
        normalization: str = "qr",
        norm_every: int = 1,
        distribution: str = "normal",
        trajectories: int = 1,
        seed: int = 0,
        workers: int = 1,
    ):
        self.operator = operator
        self.k = k
        self.steps = steps
        self.normalization = normalization
        self.norm_every = norm_every
        self.distribution = distribution
        self.trajectories = trajectories
        self.seed = seed
        self.workers = workers

    def _config(self) -> RfpConfig:
        return RfpConfig(
            k=self.k,
            steps=self.steps,
            normalization=self.normalization,
            norm_every=self.norm_every,
            distribution=self.distribution,
            trajectories=self.trajectories,
            seed=self.seed,
        )

    def fit(self, X, y=None):
        """Validate parameters against the graph; the transform is stateless."""
        graph = as_graph(X)
        cfg = self._config()
        if cfg.k > graph.n:
            raise ValueError(f"k = {cfg.k} exceeds the graph's n = {graph.n}")
        operator_from_name(self.operator, graph)
        self.n_nodes_ = graph.n
        self.n_features_out_ = cfg.trajectories * cfg.k * (cfg.steps + 1)
        return self

    def transform(self, X) -> np.ndarray:
        """Return the (n, trajectories * k * (steps + 1)) encoding for X."""
        graph = as_graph(X)
        cfg = self._config()
        op = operator_from_name(self.operator, graph)
        runs = run_trajectory_set(op, cfg, workers=self.workers)
        return assemble_features(runs)

    def get_feature_names_out(self, input_features=None) -> np.ndarray:
        cfg = self._config()
        names = [
            f"t{b}_s{p}_c{c}"
            for b in range(cfg.trajectories)
            for p in range(cfg.steps + 1)
            for c in range(cfg.k)
        ]
        return np.asarray(names, dtype=object)
