"""Drawing (u, v) node pairs for benchmarks."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .graph import Graph, pagerank

STRATEGIES = ("uniform", "degree-prop", "degree-invprop", "pagerank-prop", "pagerank-invprop")


@dataclass(frozen=True)
class PairSampler:
    strategy: str = "uniform"
    seed: int | None = None

    def __post_init__(self):
        if self.strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {self.strategy!r}; choose from {STRATEGIES}")


def pair_weights(G: Graph, strategy: str) -> np.ndarray:
    """Per-node weights w with P(u, v) proportional to w(u) w(v)."""
    if strategy == "uniform":
        w = np.ones(G.n)
    elif strategy.startswith("degree"):
        w = G.degrees.astype(float)
    elif strategy.startswith("pagerank"):
        w = pagerank(G)
    else:
        raise ValueError(f"unknown strategy {strategy!r}")
    if np.any(w <= 0):
        raise ValueError("pair weights must be strictly positive (isolated node?)")
    if strategy.endswith("invprop"):
        w = 1.0 / w
    return w / w.sum()


def sample_pairs(G: Graph, sampler: PairSampler, count: int) -> list[tuple[int, int]]:
    """Ordered pairs with ``u != v`` drawn with probability proportional to ``w(u) w(v)``.

    Both endpoints are drawn independently from ``w``; pairs with ``u == v`` are
    redrawn, which leaves the law on ``u != v`` proportional to the product.
    """
    if count < 1:
        raise ValueError("count must be >= 1")
    if G.n < 2:
        raise ValueError("need at least two nodes")
    w = pair_weights(G, sampler.strategy)
    rng = np.random.default_rng(sampler.seed)
    out: list[tuple[int, int]] = []
    while len(out) < count:
        need = count - len(out)
        u = rng.choice(G.n, size=2 * need, p=w)
        v = rng.choice(G.n, size=2 * need, p=w)
        ok = u != v
        out.extend(zip(u[ok].tolist(), v[ok].tolist()))
    return out[:count]
