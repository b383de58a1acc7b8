"""Ground-truth linear-algebra oracles for hitting times, resistances and mixing."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp
import scipy.sparse.linalg as spla

from .graph import Graph, GraphError, stationary

__all__ = [
    "HittingVector",
    "SpectralInfo",
    "OracleCapError",
    "exact_hitting_to",
    "hitting_time",
    "exact_effective_resistance",
    "laplacian_resistance",
    "spectral_info",
    "mixing_time",
    "meeting_survival",
    "meeting_tail_exact",
    "hitting_series",
    "series_cutoff",
]

DENSE_SOLVE_CAP = 2000
SPECTRAL_CAP = 5000
KRON_CAP = 4_000_000


class OracleCapError(GraphError):
    """The exact oracle is too expensive for this graph size."""


@dataclass(frozen=True)
class HittingVector:
    target: int
    h: np.ndarray
    residual: float


def _require_connected(G: Graph):
    if not G.is_connected():
        raise GraphError("graph is not connected")


def _residual(G: Graph, h: np.ndarray, target: int) -> float:
    r = h - 1.0 - G.transition_matrix() @ h
    r[target] = 0.0
    return float(np.abs(r).max()) if G.n > 1 else 0.0


def exact_hitting_to(G: Graph, target: int, tol: float = 1e-9,
                     dense_cap: int = DENSE_SOLVE_CAP) -> HittingVector:
    """Expected steps to reach ``target`` from every node.

    Solves ``h[u] = 1 + sum_w P[u, w] h[w]`` for ``u != target`` with
    ``h[target] = 0``: dense LU up to ``dense_cap`` nodes, sparse LU on the
    grounded Laplacian above. The residual is checked against
    ``tol * max(1, max(h))``.
    """
    _require_connected(G)
    n = G.n
    rest = np.delete(np.arange(n), target)
    h = np.zeros(n)
    if n > 1:
        if n <= dense_cap:
            P = G.transition_matrix().toarray()
            M = np.eye(n - 1) - P[np.ix_(rest, rest)]
            h[rest] = np.linalg.solve(M, np.ones(n - 1))
        else:
            L = sp.diags(G.degrees.astype(float)) - G.adjacency()
            L = sp.csc_matrix(L[rest][:, rest])
            h[rest] = spla.spsolve(L, G.degrees[rest].astype(float)) / (1.0 - G.laziness)
    res = _residual(G, h, target)
    if res > tol * max(1.0, float(h.max())):
        raise RuntimeError(f"hitting-time solve residual {res:.3e} exceeds tolerance")
    return HittingVector(target=target, h=h, residual=res)


def hitting_time(G: Graph, u: int, v: int, **kw) -> float:
    if u == v:
        return 0.0
    return float(exact_hitting_to(G, v, **kw).h[u])


def laplacian_resistance(G: Graph, u: int, v: int, dense_cap: int = DENSE_SOLVE_CAP) -> float:
    """``chi^T L^+ chi`` from the dense pseudo-inverse, scaled by ``1/(1 - laziness)``.

    The scaling makes it the resistance of the walk actually simulated, i.e. the
    value of ``(H(u,v) + H(v,u)) / 2m`` for the lazy chain.
    """
    if G.n > dense_cap:
        raise OracleCapError(f"pseudo-inverse limited to {dense_cap} nodes")
    L = np.diag(G.degrees.astype(float)) - G.adjacency().toarray()
    chi = np.zeros(G.n)
    chi[u] += 1.0
    chi[v] -= 1.0
    return float(chi @ np.linalg.pinv(L, hermitian=True) @ chi) / (1.0 - G.laziness)


def exact_effective_resistance(G: Graph, u: int, v: int, check: bool = True,
                               dense_cap: int = DENSE_SOLVE_CAP) -> float:
    """``(H(u,v) + H(v,u)) / 2m``, cross-checked against the Laplacian pseudo-inverse."""
    _require_connected(G)
    if u == v:
        return 0.0
    r = (hitting_time(G, u, v) + hitting_time(G, v, u)) / (2.0 * G.m)
    if check and G.n <= dense_cap:
        r2 = laplacian_resistance(G, u, v)
        if abs(r - r2) > 1e-8 * max(1.0, abs(r)):
            raise RuntimeError(f"resistance routes disagree: {r!r} vs {r2!r}")
    return r


@dataclass(frozen=True)
class SpectralInfo:
    """Spectrum summary of the walk kernel.

    ``lam = max(|lambda2|, |lambda_n|)``; ``degenerate`` flags ``lam`` equal to 1
    (periodic or disconnected walk), in which case ``t_mix`` is ``None``.
    """

    eigenvalues: np.ndarray
    lambda2: float
    lambda_n: float
    lam: float
    t_mix: int | None
    degenerate: bool


def spectral_info(G: Graph, tol: float = 1e-10, dense_cap: int = SPECTRAL_CAP,
                  mixing_eps: float = 1 / 8, with_t_mix: bool = True) -> SpectralInfo:
    if G.n > dense_cap:
        raise OracleCapError(
            f"spectral decomposition limited to {dense_cap} nodes; supply lambda and t_mix manually")
    if G.n < 2:
        raise GraphError("need at least two nodes")
    d = 1.0 / np.sqrt(G.degrees.astype(float))
    S = d[:, None] * G.adjacency().toarray() * d[None, :]
    mu = np.linalg.eigvalsh(S)[::-1]
    ev = G.laziness + (1.0 - G.laziness) * mu
    lam2, lamn = float(ev[1]), float(ev[-1])
    lam = max(abs(lam2), abs(lamn))
    degenerate = lam >= 1.0 - tol
    t_mix = None
    if with_t_mix and not degenerate:
        t_mix = mixing_time(G, mixing_eps)
    return SpectralInfo(ev, lam2, lamn, min(lam, 1.0), t_mix, degenerate)


def mixing_time(G: Graph, eps: float = 1 / 8, t_cap: int = 10**7,
                dense_cap: int = SPECTRAL_CAP) -> int:
    """Smallest ``t`` with ``max_u TV(e_u P^t, pi) <= eps`` by repeated products."""
    if G.n > dense_cap:
        raise OracleCapError(f"exact mixing time limited to {dense_cap} nodes")
    pi = stationary(G).pi
    PT = sp.csr_matrix(G.transition_matrix().T)
    X = np.eye(G.n)  # column u holds the law of X_t given X_0 = u
    for t in range(t_cap + 1):
        if 0.5 * np.abs(X - pi[:, None]).sum(axis=0).max() <= eps:
            return t
        X = PT @ X
    raise RuntimeError(f"walk not {eps}-mixed after {t_cap} steps")


def meeting_survival(G: Graph, u: int, v: int, t_max: int, cap: int = KRON_CAP) -> np.ndarray:
    """``Pr[T > t]`` for ``t = 0..t_max`` where T is the meeting time of two
    independent walks from ``u`` and ``v``.

    Evolves the law of the pair on the Kronecker product chain ``P (x) P`` with
    the diagonal (meeting) states absorbing.
    """
    n = G.n
    if n * n > cap:
        raise OracleCapError(f"product chain has {n * n} states, cap is {cap}")
    P = G.transition_matrix()
    KT = sp.csr_matrix(sp.kron(P, P).T)
    diag = np.arange(n) * (n + 1)
    p = np.zeros(n * n)
    p[u * n + v] = 1.0
    out = np.empty(t_max + 1)
    for t in range(t_max + 1):
        p[diag] = 0.0
        out[t] = p.sum()
        if t < t_max:
            p = KT @ p
    return out


def meeting_tail_exact(G: Graph, u: int, v: int, t: int, cap: int = KRON_CAP) -> float:
    return float(meeting_survival(G, u, v, t, cap)[-1])


def hitting_series(G: Graph, u: int, v: int, terms: int) -> np.ndarray:
    """Partial sums ``S_k = sum_{i<k} (1 - e_v / pi(v))^T W^i chi_uv`` for ``k = 1..terms``.

    ``W = P^T``. The sums converge to ``H(u, v)`` on connected aperiodic graphs.
    """
    pi_v = G.degree(v) / (2.0 * G.m)
    W = sp.csr_matrix(G.transition_matrix().T)
    x = np.zeros(G.n)
    x[u] += 1.0
    x[v] -= 1.0
    out = np.empty(terms)
    s = 0.0
    for i in range(terms):
        s += x.sum() - x[v] / pi_v
        out[i] = s
        x = W @ x
    return out


def series_cutoff(lam: float, n: int, tol: float) -> int:
    """Smallest ``i >= 1`` with ``lam^i n^1.5 / (1 - lam) < tol``: summing terms
    ``0..i-1`` leaves a tail below ``tol``."""
    if not 0.0 <= lam < 1.0:
        raise ValueError("need 0 <= lam < 1")
    if lam == 0.0:
        return 1
    bound = n**1.5 / (1.0 - lam)
    i = max(1, math.floor(math.log(tol / bound) / math.log(lam)) + 1)
    while i > 1 and lam ** (i - 1) * bound < tol:  # guard against round-off in the log
        i -= 1
    while lam**i * bound >= tol:
        i += 1
    return i
