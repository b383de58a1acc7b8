"""Local mixing times, l1 closeness testing and truncated resistance series."""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import breadth_first_order

from .exact import SPECTRAL_CAP, OracleCapError
from .graph import Graph
from .walks import as_seed, sample_endpoints

__all__ = [
    "ClosenessVerdict",
    "LocalMixing",
    "MixingVerdict",
    "local_pair_distances",
    "local_pair_mixing_exact",
    "closeness_budget",
    "l1_closeness_test",
    "categorical_sampler",
    "mixing_test",
    "binary_search_mixing",
    "diameter_bound",
    "effres_partial_sums",
    "effres_truncated_series",
    "fit_geometric_decay",
    "series_cutoff_length",
    "effres_local",
]

# Tuned by simulation: null pairs (uniform, heavy-tailed) and pairs at l1 distance
# exactly eps, n in [5, 1000], eps in [0.1, 1.9], delta in {0.1, 0.5}.
SAMPLE_CONST = 16.0
REPEAT_CONST = 1.0
Z_THRESHOLD = 1.5
# Above this many nodes the mixing test checks a random subset of start vertices.
MAX_STARTS = 10_000

Sampler = Callable[[int, np.random.Generator], np.ndarray]


@dataclass(frozen=True)
class LocalMixing:
    t_min: int
    epsilon: float
    exact: bool


def local_pair_distances(G: Graph, u: int, v: int, t_max: int) -> np.ndarray:
    """``||e_u P^i - e_v P^i||_1`` for ``i = 0..t_max``."""
    PT = sp.csr_matrix(G.transition_matrix().T)
    pu = np.zeros(G.n)
    pv = np.zeros(G.n)
    pu[u] = 1.0
    pv[v] = 1.0
    out = np.empty(t_max + 1)
    for i in range(t_max + 1):
        out[i] = np.abs(pu - pv).sum()
        if i < t_max:
            pu = PT @ pu
            pv = PT @ pv
    return out


def local_pair_mixing_exact(G: Graph, u: int, v: int, epsilon: float, t_cap: int = 10**6,
                            dense_cap: int = SPECTRAL_CAP) -> LocalMixing:
    """Smallest ``i`` with ``||e_u P^i - e_v P^i||_1 <= epsilon``, by linear scan.

    The distance need not be monotone in ``i``, so the scan does not bisect.
    """
    if G.n > dense_cap:
        raise OracleCapError("exact local mixing is capped; use binary_search_mixing")
    PT = sp.csr_matrix(G.transition_matrix().T)
    pu = np.zeros(G.n)
    pv = np.zeros(G.n)
    pu[u] = 1.0
    pv[v] = 1.0
    for i in range(t_cap + 1):
        if np.abs(pu - pv).sum() <= epsilon:
            return LocalMixing(i, epsilon, True)
        pu = PT @ pu
        pv = PT @ pv
    raise RuntimeError(f"pair not {epsilon}-mixed within {t_cap} steps")


# --------------------------------------------------------------------------------------
# l1 closeness testing
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class ClosenessVerdict:
    """Outcome of a boosted closeness test.

    ``statistic_value`` is the median over repeats of the standardized
    collision statistic; ``samples_used`` counts draws from both distributions.
    """

    accept: bool
    samples_used: int
    statistic_value: float
    repeats: int
    samples_per_repeat: int

    @property
    def verdict(self) -> str:
        return "accept" if self.accept else "reject"


def closeness_budget(n: int, epsilon: float, delta: float) -> tuple[int, int]:
    """``(m, k)``: draws per distribution per repeat and the (odd) number of repeats.

    ``m = c * max(n^(2/3) eps^(-4/3), n^(1/2) eps^(-2))`` and
    ``k = 2 ceil(c' ln(1/delta)) + 1``.
    """
    m = math.ceil(SAMPLE_CONST * max(n ** (2 / 3) * epsilon ** (-4 / 3), math.sqrt(n) / epsilon**2))
    k = 2 * math.ceil(REPEAT_CONST * math.log(1.0 / delta)) + 1
    return m, k


def _standardized_stats(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    # X, Y: (k, n) count tables. Per row: Z = sum ((X-Y)^2 - X - Y) / (X+Y) over
    # occupied bins, divided by its null sd sqrt(sum 2 (1 - 1/S)) given S = X+Y.
    S = X + Y
    occ = S > 0
    Ssafe = np.where(occ, S, 1)
    Z = np.where(occ, ((X - Y) ** 2 - S) / Ssafe, 0.0).sum(axis=1)
    var = np.where(occ, 2.0 * (1.0 - 1.0 / Ssafe), 0.0).sum(axis=1)
    return np.where(var > 0, Z / np.sqrt(np.where(var > 0, var, 1.0)), 0.0)


def _verdict_from_counts(X, Y, m, k) -> ClosenessVerdict:
    z = _standardized_stats(X.astype(float), Y.astype(float))
    rejects = int(np.count_nonzero(z > Z_THRESHOLD))
    return ClosenessVerdict(rejects * 2 < k, 2 * m * k, float(np.median(z)), k, m)


def l1_closeness_test(sampler_p: Sampler, sampler_q: Sampler, n: int, epsilon: float,
                      delta: float, rng=None) -> ClosenessVerdict:
    """Accept when ``p = q``, reject when ``||p - q||_1 >= epsilon``, each with
    probability at least ``1 - delta``.

    Each repeat draws ``m`` samples from both laws and computes the collision
    statistic ``Z = sum_i ((X_i - Y_i)^2 - X_i - Y_i) / (X_i + Y_i)``. Under
    ``p = q`` and given the bin totals, ``Z`` has mean 0 and a known variance;
    a repeat rejects when the standardized ``Z`` exceeds ``Z_THRESHOLD``. The
    final verdict is a majority vote over ``k`` repeats.

    Samplers are called as ``sampler(size, rng)`` and return ints in ``[0, n)``.
    """
    rng = np.random.default_rng(rng)
    m, k = closeness_budget(n, epsilon, delta)
    if epsilon > 2.0:
        # ||p - q||_1 <= 2 always, so the reject condition is vacuous.
        return ClosenessVerdict(True, 0, 0.0, 0, 0)
    xs = np.asarray(sampler_p(m * k, rng), dtype=np.int64)
    ys = np.asarray(sampler_q(m * k, rng), dtype=np.int64)
    rows = np.repeat(np.arange(k), m)
    X = np.bincount(rows * n + xs, minlength=k * n).reshape(k, n)
    Y = np.bincount(rows * n + ys, minlength=k * n).reshape(k, n)
    return _verdict_from_counts(X, Y, m, k)


def categorical_sampler(p) -> Sampler:
    p = np.asarray(p, dtype=float)
    p = p / p.sum()
    return lambda size, rng: rng.choice(len(p), size=size, p=p)


# --------------------------------------------------------------------------------------
# (epsilon, t)-mixing test
# --------------------------------------------------------------------------------------


@dataclass(frozen=True)
class MixingVerdict:
    accept: bool
    t: int
    starts_tested: int
    subsampled: bool
    samples_used: int
    rejected_at: int | None = None


def mixing_test(G: Graph, t: int, epsilon: float, delta: float, seed=None,
                max_starts: int = MAX_STARTS) -> MixingVerdict:
    """Decide whether the walk is ``(epsilon, t)``-mixing.

    For every start vertex u the t-step law ``e_u P^t`` is compared, with the
    closeness tester at confidence ``delta / #starts``, against the law of a
    t-step walk from a uniformly random start. Acceptance requires every
    comparison to accept. With more than ``max_starts`` nodes a random subset of
    starts is tested (``subsampled=True``) and the guarantee covers only it.
    """
    if t < 0:
        raise ValueError("t must be >= 0")
    rng = np.random.default_rng(as_seed(seed))
    subsampled = G.n > max_starts
    starts = np.sort(rng.choice(G.n, size=max_starts, replace=False)) if subsampled else np.arange(G.n)
    m, k = closeness_budget(G.n, epsilon, delta / len(starts))
    if epsilon > 2.0:
        return MixingVerdict(True, t, len(starts), subsampled, 0)
    key = as_seed(rng)
    per = m * k
    rows = np.repeat(np.arange(k), m)
    ref_starts = rng.integers(0, G.n, size=per)
    ref = sample_endpoints(G, ref_starts, t, seed=key, stream0=0)
    Y = np.bincount(rows * G.n + ref, minlength=k * G.n).reshape(k, G.n)
    used = per
    for idx, u in enumerate(starts):
        ends = sample_endpoints(G, int(u), t, per, seed=key, stream0=(idx + 1) * per)
        used += per
        X = np.bincount(rows * G.n + ends, minlength=k * G.n).reshape(k, G.n)
        if not _verdict_from_counts(X, Y, m, k).accept:
            return MixingVerdict(False, t, len(starts), subsampled, used, int(u))
    return MixingVerdict(True, t, len(starts), subsampled, used)


def diameter_bound(G: Graph) -> int:
    """Upper bound ``2 * ecc(0)`` on the diameter of a connected graph."""
    order, pred = breadth_first_order(G.adjacency(), 0, directed=False)
    depth = np.zeros(G.n, dtype=np.int64)
    for w in order[1:]:
        depth[w] = depth[pred[w]] + 1
    return max(1, 2 * int(depth.max()))


def binary_search_mixing(G: Graph, epsilon: float, delta: float, t_hi: int | None = None,
                         seed=None) -> int:
    """Smallest ``t`` in ``[1, t_hi]`` accepted by ``mixing_test``; ``t_hi + 1`` if none.

    Each probe runs at confidence ``delta / (number of probes)``.
    """
    if t_hi is None:
        t_hi = diameter_bound(G)
    if t_hi < 1:
        raise ValueError("t_hi must be >= 1")
    probes = math.ceil(math.log2(t_hi)) + 1 if t_hi > 1 else 1
    d = delta / probes
    rng = np.random.default_rng(as_seed(seed))
    if not mixing_test(G, t_hi, epsilon, d, seed=as_seed(rng)).accept:
        return t_hi + 1
    lo, hi = 1, t_hi
    while lo < hi:
        mid = (lo + hi) // 2
        if mixing_test(G, mid, epsilon, d, seed=as_seed(rng)).accept:
            hi = mid
        else:
            lo = mid + 1
    return lo


# --------------------------------------------------------------------------------------
# truncated effective-resistance series
# --------------------------------------------------------------------------------------


def effres_partial_sums(G: Graph, u: int, v: int, ell: int) -> np.ndarray:
    """``S_k = sum_{i<k} chi^T P^i D^-1 chi`` for ``k = 1..ell`` by matvecs."""
    P = G.transition_matrix()
    deg = G.degrees.astype(float)
    y = np.zeros(G.n)
    y[u] += 1.0 / deg[u]
    y[v] -= 1.0 / deg[v]
    out = np.empty(ell)
    s = 0.0
    for i in range(ell):
        s += y[u] - y[v]
        out[i] = s
        y = P @ y
    return out


def effres_truncated_series(G: Graph, u: int, v: int, ell: int, mode: str = "exact",
                            r: int = 100_000, seed=0) -> float:
    """``sum_{i<ell} chi^T P^i D^-1 chi``.

    ``mode="exact"`` uses matvecs; ``mode="sampled"`` estimates the four
    return/transfer probabilities of each term from ``r`` walks out of u and of v.
    """
    if ell < 1:
        raise ValueError("ell must be >= 1")
    if u == v:
        return 0.0
    if mode == "exact":
        return float(effres_partial_sums(G, u, v, ell)[-1])
    if mode != "sampled":
        raise ValueError(f"unknown mode {mode!r}")
    du, dv = G.degree(u), G.degree(v)
    key = as_seed(seed)
    total = 0.0
    for i in range(ell):
        eu = sample_endpoints(G, u, i, r, seed=key, stream0=2 * i * r)
        ev = sample_endpoints(G, v, i, r, seed=key, stream0=(2 * i + 1) * r)
        p_uu, p_uv = np.mean(eu == u), np.mean(eu == v)
        p_vu, p_vv = np.mean(ev == u), np.mean(ev == v)
        total += p_uu / du - p_uv / dv - p_vu / du + p_vv / dv
    return float(total)


@dataclass(frozen=True)
class DecayFit:
    alpha: float
    C: float
    r2: float


def fit_geometric_decay(partial_sums: np.ndarray, floor: float = 1e-13) -> DecayFit:
    """Fit ``|S_{k+1} - S_k| ~ C alpha^k`` by least squares on the log scale.

    Increments below ``floor`` (round-off) are dropped.
    """
    inc = np.abs(np.diff(np.asarray(partial_sums, dtype=float)))
    k = np.arange(1, len(inc) + 1)
    keep = inc > floor
    if keep.sum() < 3:
        raise ValueError("need at least three increments above the floor")
    k, y = k[keep], np.log(inc[keep])
    slope, icept = np.polyfit(k, y, 1)
    pred = slope * k + icept
    ss_tot = float(((y - y.mean()) ** 2).sum())
    r2 = 1.0 - float(((y - pred) ** 2).sum()) / ss_tot if ss_tot > 0 else 1.0
    return DecayFit(float(np.exp(slope)), float(np.exp(icept)), r2)


def series_cutoff_length(t_min: int, alpha: float | None = None, C: float | None = None,
                         eps_prime: float | None = None) -> int:
    """Series length from a local mixing time, optionally with the tail correction
    ``log(C / (eps' (1 - alpha))) / (-log alpha)`` when ``(alpha, C)`` are known."""
    ell = max(1, int(t_min))
    if alpha is not None and C is not None and eps_prime is not None:
        if not 0.0 < alpha < 1.0:
            raise ValueError("alpha must lie in (0, 1)")
        extra = math.log(C / (eps_prime * (1.0 - alpha))) / -math.log(alpha)
        ell += max(0, math.ceil(extra))
    return ell


def effres_local(G: Graph, u: int, v: int, epsilon: float, mode: str = "exact", factor: float = 1.0,
                 alpha: float | None = None, C: float | None = None, r: int = 100_000,
                 delta: float = 0.1, t_hi: int | None = None, seed=0) -> tuple[float, int]:
    """Effective resistance with the series cut at a local mixing time.

    The cut is ``factor * t_min`` where ``t_min`` is the ``epsilon/4`` local
    mixing time of (u, v): exact in ``mode="exact"``, otherwise bounded by
    bisection over the ``(epsilon/8, t)``-mixing test. ``(alpha, C)`` add the
    tail correction when supplied. Returns ``(estimate, ell)``.
    """
    if mode == "exact":
        t_min = local_pair_mixing_exact(G, u, v, epsilon / 4).t_min
    else:
        t_min = binary_search_mixing(G, epsilon / 8, delta, t_hi=t_hi, seed=seed)
    ell = series_cutoff_length(math.ceil(factor * max(1, t_min)), alpha, C,
                               None if alpha is None else epsilon / 4)
    return effres_truncated_series(G, u, v, ell, mode=mode, r=r, seed=seed), ell
