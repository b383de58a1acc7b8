"""Random and structured graph generators.

All random generators take an integer seed and are reproducible: the same seed
yields an identical graph.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, GraphError, from_edges

__all__ = [
    "generate_er",
    "generate_ba",
    "generate_sbm",
    "generate_barbell",
    "Barbell",
    "complete_graph",
    "path_graph",
    "cycle_graph",
    "star_graph",
]


def _bernoulli_pairs(rng: np.random.Generator, rows: np.ndarray, cols_lo: np.ndarray,
                     cols_hi: np.ndarray, p: float) -> np.ndarray:
    # Per row r, sample every column c in [lo, hi) independently with probability p.
    out = []
    for r, lo, hi in zip(rows, cols_lo, cols_hi):
        if hi <= lo:
            continue
        hit = np.flatnonzero(rng.random(hi - lo) < p) + lo
        if hit.size:
            out.append(np.column_stack([np.full(hit.size, r), hit]))
    return np.concatenate(out) if out else np.empty((0, 2), dtype=np.int64)


def generate_er(n: int, p: float, seed: int | None = None) -> Graph:
    """Erdos-Renyi G(n, p): every unordered pair is an edge with probability p."""
    if n < 2 or not 0.0 < p <= 1.0:
        raise ValueError("need n >= 2 and 0 < p <= 1")
    rng = np.random.default_rng(seed)
    rows = np.arange(n)
    edges = _bernoulli_pairs(rng, rows, rows + 1, np.full(n, n), p)
    return from_edges(n, edges)


def generate_ba(n: int, k: int, seed: int | None = None) -> Graph:
    """Barabasi-Albert preferential attachment.

    Starts from ``k`` isolated seed nodes; every later node attaches ``k`` edges
    to distinct existing nodes chosen proportionally to degree (the first arrival
    links to all seeds). The result has exactly ``k (n - k)`` edges.
    """
    if not n > k >= 1:
        raise ValueError("need n > k >= 1")
    rng = np.random.default_rng(seed)
    # Each node appears in `pool` once per incident edge endpoint.
    pool = np.empty(2 * k * (n - k), dtype=np.int64)
    size = 0
    edges = np.empty((k * (n - k), 2), dtype=np.int64)
    targets = np.arange(k)
    for new in range(k, n):
        base = (new - k) * k
        edges[base:base + k, 0] = new
        edges[base:base + k, 1] = targets
        pool[size:size + k] = targets
        pool[size + k:size + 2 * k] = new
        size += 2 * k
        chosen: set[int] = set()
        while len(chosen) < k:
            chosen.update(pool[rng.integers(0, size, size=k - len(chosen))].tolist())
        targets = np.fromiter(chosen, dtype=np.int64, count=k)
    return from_edges(n, edges)


def generate_sbm(block_sizes, p_intra: float, p_inter: float, seed: int | None = None) -> Graph:
    """Stochastic block model with one intra- and one inter-block edge probability."""
    sizes = np.asarray(block_sizes, dtype=np.int64)
    if sizes.size == 0 or np.any(sizes <= 0):
        raise ValueError("block sizes must be positive")
    if not (0.0 < p_intra <= 1.0 and 0.0 < p_inter <= 1.0):
        raise ValueError("probabilities must lie in (0, 1]")
    n = int(sizes.sum())
    bounds = np.concatenate([[0], np.cumsum(sizes)])
    block_end = np.repeat(bounds[1:], sizes)
    rng = np.random.default_rng(seed)
    rows = np.arange(n)
    intra = _bernoulli_pairs(rng, rows, rows + 1, block_end, p_intra)
    inter = _bernoulli_pairs(rng, rows, block_end, np.full(n, n), p_inter)
    return from_edges(n, np.concatenate([intra, inter]))


@dataclass(frozen=True)
class Barbell:
    """Star-path-clique graph plus the node ids of its landmarks."""

    graph: Graph
    clique: np.ndarray
    path: np.ndarray  # path[0] = u_1 (next to the clique), path[-1] = u_n (star center)
    leaves: np.ndarray

    @property
    def u1(self) -> int:
        return int(self.path[0])

    @property
    def un(self) -> int:
        return int(self.path[-1])

    @property
    def y1(self) -> int:
        return int(self.clique[0])

    def landmarks(self) -> dict:
        return {
            "u1": self.u1,
            "un": self.un,
            "y1": self.y1,
            "clique": self.clique.tolist(),
            "path": self.path.tolist(),
            "leaves": self.leaves.tolist(),
        }


def generate_barbell(n: int) -> Barbell:
    """Clique ``K_n`` -- path ``y_1 - u_1 - ... - u_n`` -- star with ``n^2`` leaves at ``u_n``.

    Node ids: clique ``0..n-1`` (``y_1 = 0``), path ``n..2n-1`` (``u_1 = n``),
    leaves ``2n..2n+n^2-1``. Total ``2n + n^2`` nodes.
    """
    if n < 3:
        raise ValueError("barbell needs n >= 3")
    clique = np.arange(n)
    path = np.arange(n, 2 * n)
    leaves = np.arange(2 * n, 2 * n + n * n)
    iu, ju = np.triu_indices(n, k=1)
    e = [np.column_stack([iu, ju])]
    e.append(np.array([[clique[0], path[0]]]))
    e.append(np.column_stack([path[:-1], path[1:]]))
    e.append(np.column_stack([np.full(n * n, path[-1]), leaves]))
    G = from_edges(2 * n + n * n, np.concatenate(e))
    return Barbell(graph=G, clique=clique, path=path, leaves=leaves)


def complete_graph(n: int) -> Graph:
    if n < 1:
        raise GraphError("need n >= 1")
    iu, ju = np.triu_indices(n, k=1)
    return from_edges(n, np.column_stack([iu, ju]))


def path_graph(n: int) -> Graph:
    a = np.arange(n - 1)
    return from_edges(n, np.column_stack([a, a + 1]))


def cycle_graph(n: int) -> Graph:
    if n < 3:
        raise GraphError("cycle needs n >= 3")
    a = np.arange(n)
    return from_edges(n, np.column_stack([a, (a + 1) % n]))


def star_graph(leaves: int) -> Graph:
    """``K_{1,leaves}`` with the center at node 0."""
    a = np.arange(1, leaves + 1)
    return from_edges(leaves + 1, np.column_stack([np.zeros_like(a), a]))
