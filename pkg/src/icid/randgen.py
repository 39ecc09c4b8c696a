"""Seeded random mixed-graph instances for benchmarks and property tests."""

from __future__ import annotations

import numpy as np

from .graph import MixedGraph

__all__ = ["random_mixed_graph"]


def random_mixed_graph(
    n: int,
    edge_density: float = 0.2,
    confounder_density: float = 0.1,
    seed: int = 0,
    prefix: str = "v",
) -> MixedGraph:
    """Random DAG with latent confounding.

    Vertices ``v0..v{n-1}`` in index order; each ordered pair (i < j) gets a
    directed edge with probability ``edge_density`` and a bidirected edge
    with probability ``confounder_density``, independently.
    """
    rng = np.random.default_rng(seed)
    names = [f"{prefix}{i}" for i in range(n)]
    directed = []
    bidirected = []
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < edge_density:
                directed.append((names[i], names[j]))
            if rng.random() < confounder_density:
                bidirected.append((names[i], names[j]))
    return MixedGraph(names, directed, bidirected)


def random_mixed_graph_by_count(
    n: int, n_directed: int, n_bidirected: int, seed: int = 0, prefix: str = "v"
) -> MixedGraph:
    """Random DAG with exact edge counts (sampled without replacement)."""
    rng = np.random.default_rng(seed)
    names = [f"{prefix}{i}" for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    if n_directed > len(pairs) or n_bidirected > len(pairs):
        raise ValueError("more edges requested than vertex pairs")
    d_pick = rng.choice(len(pairs), size=n_directed, replace=False)
    b_pick = rng.choice(len(pairs), size=n_bidirected, replace=False)
    directed = [(names[pairs[i][0]], names[pairs[i][1]]) for i in sorted(d_pick)]
    bidirected = [(names[pairs[i][0]], names[pairs[i][1]]) for i in sorted(b_pick)]
    return MixedGraph(names, directed, bidirected)
