"""Erdos-Renyi ground-truth graph sampling."""

from __future__ import annotations

import numpy as np

from ..dataset import Adjacency
from ..errors import InvalidConfigError


def sample_graph(
    n_nodes: int, edge_prob: float = 0.5, directed: bool = False, seed: int = 0
) -> Adjacency:
    """Draw an Erdos-Renyi graph with zero diagonal.

    Draw order is documented so tests can replay it: ``default_rng(seed)``
    produces one uniform per pair, iterating the strict upper triangle
    row-major.  Undirected graphs mirror the upper triangle; directed graphs
    draw a second uniform block for the strict lower triangle, again
    row-major.
    """
    if n_nodes < 2:
        raise InvalidConfigError("n_nodes must be at least 2")
    if not 0 < edge_prob <= 1:
        raise InvalidConfigError("edge_prob must lie in (0, 1]")
    rng = np.random.default_rng(seed)
    edges = np.zeros((n_nodes, n_nodes), dtype=np.uint8)
    iu = np.triu_indices(n_nodes, k=1)
    upper = (rng.random(iu[0].size) < edge_prob).astype(np.uint8)
    edges[iu] = upper
    if directed:
        il = np.tril_indices(n_nodes, k=-1)
        edges[il] = (rng.random(il[0].size) < edge_prob).astype(np.uint8)
    else:
        edges |= edges.T
    return Adjacency(n_nodes, edges, directed=directed)
