"""Synthetic graphs for tests and scaling experiments."""
from __future__ import annotations

import numpy as np

from .graph import Graph, from_edges


def gnp(n: int, p: float, seed: int = 0, num_labels: int = 0) -> Graph:
    """Erdos-Renyi G(n, p); optional uniform labels in ``[0, num_labels)``."""
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    keep = rng.random(iu.shape[0]) < p
    edges = np.column_stack([iu[keep], ju[keep]])
    labels = rng.integers(0, num_labels, n) if num_labels else None
    return from_edges(edges, n, labels=labels)


def sparse_random(n: int, avg_degree: float, seed: int = 0) -> Graph:
    """G(n, m) with ``m = n * avg_degree / 2`` sampled edges (duplicates merged)."""
    rng = np.random.default_rng(seed)
    m = int(n * avg_degree / 2)
    u = rng.integers(0, n, m)
    v = rng.integers(0, n, m)
    return from_edges(np.column_stack([u, v]), n)


def rmat(scale: int, avg_degree: float, a: float = 0.4, b: float = 0.2, c: float = 0.2,
         seed: int = 0) -> Graph:
    """Recursive-matrix graph on ``2**scale`` vertices.

    Each edge descends ``scale`` quadrant choices with probabilities
    ``(a, b, c, 1 - a - b - c)``. Self-loops and duplicates are dropped by
    the CSR builder, so the realized average degree is slightly lower.
    """
    if not 0 < a + b + c < 1:
        raise ValueError("quadrant probabilities must sum below 1")
    rng = np.random.default_rng(seed)
    n = 1 << scale
    m = int(n * avg_degree / 2)
    u = np.zeros(m, dtype=np.int64)
    v = np.zeros(m, dtype=np.int64)
    cdf = np.array([a, a + b, a + b + c])
    for bit in range(scale):
        q = np.searchsorted(cdf, rng.random(m), side="right")
        u |= (q >> 1).astype(np.int64) << bit
        v |= (q & 1).astype(np.int64) << bit
    # shuffle ids so high degree is not tied to small ids
    perm = rng.permutation(n)
    return from_edges(np.column_stack([perm[u], perm[v]]), n)
