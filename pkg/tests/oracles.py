"""Independent reference computations used to derive and freeze expected values.

Nothing here touches the package's solvers or walk kernels: hitting times come
from exact rational elimination, meeting tails from enumerating joint moves,
and Monte Carlo checks from a plain numpy simulator.
"""
from __future__ import annotations

from fractions import Fraction
from itertools import product

import numpy as np


def adjacency_lists(n, edges):
    adj = [set() for _ in range(n)]
    for a, b in edges:
        if a != b:
            adj[a].add(b)
            adj[b].add(a)
    return [sorted(s) for s in adj]


def solve_fraction(A, b):
    """Gauss-Jordan elimination over the rationals."""
    n = len(A)
    M = [[Fraction(x) for x in row] + [Fraction(y)] for row, y in zip(A, b)]
    for c in range(n):
        piv = next(r for r in range(c, n) if M[r][c] != 0)
        M[c], M[piv] = M[piv], M[c]
        pv = M[c][c]
        M[c] = [x / pv for x in M[c]]
        for r in range(n):
            if r != c and M[r][c] != 0:
                f = M[r][c]
                M[r] = [x - f * y for x, y in zip(M[r], M[c])]
    return [M[r][n] for r in range(n)]


def hitting_times_fraction(adj, target, laziness=Fraction(0)):
    """h[u] = 1 + sum_w P[u,w] h[w] (u != target), h[target] = 0, in exact arithmetic."""
    n = len(adj)
    rest = [u for u in range(n) if u != target]
    idx = {u: i for i, u in enumerate(rest)}
    A = [[Fraction(0)] * len(rest) for _ in rest]
    for u in rest:
        i = idx[u]
        A[i][i] += 1
        if laziness:
            A[i][i] -= laziness
        for w in adj[u]:
            if w != target:
                A[i][idx[w]] -= (1 - laziness) / len(adj[u])
    h = solve_fraction(A, [1] * len(rest))
    out = [Fraction(0)] * n
    for u, val in zip(rest, h):
        out[u] = val
    return out


def resistance_fraction(adj, u, v):
    """Effective resistance from the grounded Laplacian (ground at v), exactly."""
    n = len(adj)
    rest = [w for w in range(n) if w != v]
    idx = {w: i for i, w in enumerate(rest)}
    L = [[Fraction(0)] * len(rest) for _ in rest]
    for w in rest:
        L[idx[w]][idx[w]] = Fraction(len(adj[w]))
        for x in adj[w]:
            if x != v:
                L[idx[w]][idx[x]] -= 1
    b = [Fraction(1) if w == u else Fraction(0) for w in rest]
    phi = solve_fraction(L, b)
    return phi[idx[u]]


def meeting_survival_bruteforce(adj, u, v, t_max):
    """Pr[T > t], t = 0..t_max, by enumerating joint moves of two simple walks."""
    dist = {(u, v): Fraction(1)}
    out = []
    for t in range(t_max + 1):
        dist = {k: p for k, p in dist.items() if k[0] != k[1]}
        out.append(sum(dist.values(), Fraction(0)))
        if t == t_max:
            break
        nxt: dict = {}
        for (a, b), p in dist.items():
            q = p / (len(adj[a]) * len(adj[b]))
            for a2, b2 in product(adj[a], adj[b]):
                nxt[(a2, b2)] = nxt.get((a2, b2), Fraction(0)) + q
        dist = nxt
    return out


def numpy_walk_hits(adj, start, target, count, cap, seed):
    """First-hit times of `count` simple walks simulated with numpy's Generator."""
    rng = np.random.default_rng(seed)
    deg = np.array([len(a) for a in adj])
    width = deg.max()
    table = np.array([a + [a[0]] * (width - len(a)) for a in adj])
    pos = np.full(count, start)
    hit = np.full(count, -1)
    hit[pos == target] = 0
    for t in range(1, cap + 1):
        live = hit < 0
        if not live.any():
            break
        p = pos[live]
        pos[live] = table[p, (rng.random(p.size) * deg[p]).astype(int)]
        hit[live & (pos == target)] = t
    return hit


def paired_walk_occupancy_sum(adj, u, v, count, seed, t_cap=100_000):
    """Per pair: sum over t < T of (1[Y_t = v] - 1[X_t = v]) for independent walks
    X from u and Y from v that stop at their first meeting time T."""
    rng = np.random.default_rng(seed)
    deg = np.array([len(a) for a in adj])
    width = deg.max()
    table = np.array([a + [a[0]] * (width - len(a)) for a in adj])
    x = np.full(count, u)
    y = np.full(count, v)
    acc = np.zeros(count)
    live = x != y
    for _ in range(t_cap):
        if not live.any():
            break
        acc[live] += (y[live] == v).astype(float) - (x[live] == v)
        xi, yi = x[live], y[live]
        x[live] = table[xi, (rng.random(xi.size) * deg[xi]).astype(int)]
        y[live] = table[yi, (rng.random(yi.size) * deg[yi]).astype(int)]
        live &= x != y
    if live.any():
        raise RuntimeError("pairs did not meet within t_cap")
    return acc


def numpy_meeting_times(adj, u, v, count, seed, t_cap=100_000):
    """First time T with X_T = Y_T for independent simple walks from u and v."""
    rng = np.random.default_rng(seed)
    deg = np.array([len(a) for a in adj])
    width = deg.max()
    table = np.array([a + [a[0]] * (width - len(a)) for a in adj])
    x = np.full(count, u)
    y = np.full(count, v)
    T = np.where(x == y, 0, -1)
    for t in range(1, t_cap + 1):
        live = T < 0
        if not live.any():
            break
        xi, yi = x[live], y[live]
        x[live] = table[xi, (rng.random(xi.size) * deg[xi]).astype(int)]
        y[live] = table[yi, (rng.random(yi.size) * deg[yi]).astype(int)]
        T[live & (x == y)] = t
    return T
