"""Seedable random-walk engine: single steps, first-hit walks, ensembles, endpoints."""
from __future__ import annotations

import contextlib
import os
from dataclasses import dataclass

import numba
import numpy as np

from . import _kernels as K
from .graph import Graph, GraphError

__all__ = [
    "HitRecord",
    "WalkEnsemble",
    "step",
    "walk_until_hit",
    "new_ensemble",
    "advance_ensemble",
    "endpoint_distribution",
    "sample_endpoints",
    "sample_hitting_times",
    "as_seed",
    "threads",
]

THREADS_ENV = "LOCALHIT_THREADS"


def _init_threads():
    val = os.environ.get(THREADS_ENV)
    if val:
        numba.set_num_threads(min(int(val), numba.config.NUMBA_NUM_THREADS))


_init_threads()


@contextlib.contextmanager
def threads(k: int | None):
    """Temporarily run the parallel kernels on ``k`` threads (``None`` = unchanged).

    Numba caps the count at the size of its thread pool, i.e. the number of
    cores unless ``NUMBA_NUM_THREADS`` is set before import.
    """
    if k is None:
        yield numba.get_num_threads()
        return
    old = numba.get_num_threads()
    k = max(1, min(int(k), numba.config.NUMBA_NUM_THREADS))
    numba.set_num_threads(k)
    try:
        yield k
    finally:
        numba.set_num_threads(old)


def as_seed(rng) -> int:
    """Integer seed from an int, ``None`` or a ``numpy.random.Generator``."""
    if rng is None:
        return int(np.random.default_rng().integers(2**63))
    if isinstance(rng, np.random.Generator):
        return int(rng.integers(2**63))
    return int(rng)


@dataclass(frozen=True)
class HitRecord:
    hit: bool
    steps: int
    truncated_at: int


def step(G: Graph, node: int, rng: np.random.Generator) -> int:
    """One transition of the (possibly lazy) walk. Consumes exactly one ``rng.random()``."""
    if G.degree(node) == 0:
        raise GraphError(f"node {node} is isolated")
    return int(K.next_node(G.offsets, G.neighbors, G.laziness, node, rng.random()))


def walk_until_hit(G: Graph, start: int, target: int, cap: int,
                   rng: np.random.Generator) -> HitRecord:
    """Walk from ``start`` until ``target`` is reached or ``cap`` steps were taken."""
    if cap < 0:
        raise ValueError("cap must be >= 0")
    node, t = start, 0
    while node != target and t < cap:
        node = step(G, node, rng)
        t += 1
    return HitRecord(hit=node == target, steps=t, truncated_at=cap)


def sample_hitting_times(G: Graph, start: int, target: int, count: int, cap: int,
                         seed=0) -> np.ndarray:
    """First-hit step counts of ``count`` independent walks; ``-1`` marks truncation."""
    return K.hit_times(G.offsets, G.neighbors, G.laziness, int(start), int(target),
                       int(count), int(cap), K.seed_key(as_seed(seed)), 0)


@dataclass(frozen=True, eq=False)
class WalkEnsemble:
    """Positions of ``len(positions)`` walkers after ``t`` steps.

    Walker ``i`` draws its randomness from stream ``(seed, stream_offset + i)``
    so an ensemble evolves identically however its walkers are scheduled.
    """

    positions: np.ndarray
    alive: np.ndarray
    t: int
    seed: int
    stream_offset: int = 0

    @property
    def size(self) -> int:
        return len(self.positions)

    def kill(self, walkers) -> WalkEnsemble:
        alive = self.alive.copy()
        alive[np.asarray(walkers, dtype=np.int64)] = False
        return WalkEnsemble(self.positions, alive, self.t, self.seed, self.stream_offset)


def new_ensemble(start, size: int, seed=0, stream_offset: int = 0) -> WalkEnsemble:
    pos = np.broadcast_to(np.asarray(start, dtype=np.int64), (size,)).copy()
    return WalkEnsemble(pos, np.ones(size, dtype=bool), 0, as_seed(seed), stream_offset)


def advance_ensemble(G: Graph, ens: WalkEnsemble) -> WalkEnsemble:
    """Every alive walker takes one step; dead walkers stay where they died."""
    pos = ens.positions.copy()
    ids = np.flatnonzero(ens.alive).astype(np.int64)
    K.advance_ids(G.offsets, G.neighbors, G.laziness, pos, ids, len(ids),
                  K.seed_key(ens.seed), 1, ens.stream_offset, ens.t)
    return WalkEnsemble(pos, ens.alive.copy(), ens.t + 1, ens.seed, ens.stream_offset)


def sample_endpoints(G: Graph, start, length: int, count: int | None = None,
                     seed=0, stream0: int = 0) -> np.ndarray:
    """Endpoints of independent length-``length`` walks.

    ``start`` is either one node (then ``count`` walks are run) or an array of
    per-walk start nodes.
    """
    if length < 0:
        raise ValueError("length must be >= 0")
    key = K.seed_key(as_seed(seed))
    if np.ndim(start) == 0:
        if count is None or count < 1:
            raise ValueError("count must be >= 1")
        return K.endpoints(G.offsets, G.neighbors, G.laziness, int(start), int(length),
                           int(count), key, int(stream0))
    starts = np.ascontiguousarray(start, dtype=np.int64)
    return K.endpoints_multi(G.offsets, G.neighbors, G.laziness, starts, int(length),
                             key, int(stream0))


def endpoint_distribution(G: Graph, start: int, length: int, r: int, rng=0) -> np.ndarray:
    """Empirical law of the endpoint of ``r`` independent walks of length ``length``."""
    if r < 1:
        raise ValueError("r must be >= 1")
    ends = sample_endpoints(G, start, length, r, seed=rng)
    return np.bincount(ends, minlength=G.n) / r
