"""Immutable CSR graph, edge-list ingestion and node-level statistics."""
from __future__ import annotations

import io
import os
from dataclasses import dataclass, field, replace

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

__all__ = [
    "Graph",
    "GraphError",
    "EdgeListParseError",
    "StationaryDist",
    "from_edges",
    "from_edge_list",
    "read_edge_list",
    "write_edge_list",
    "save_graph",
    "load_graph",
    "kronecker_product",
    "largest_component",
    "stationary",
    "pagerank",
]

MAX_NODES = 2**31 - 1


class GraphError(ValueError):
    pass


class EdgeListParseError(GraphError):
    def __init__(self, lineno: int, line: str, reason: str = "expected two integer ids"):
        self.lineno = lineno
        self.line = line
        super().__init__(f"line {lineno}: {reason}: {line!r}")


def _frozen(a: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a)
    a.setflags(write=False)
    return a


@dataclass(frozen=True, eq=False)
class Graph:
    """Simple undirected graph in compressed sparse row form.

    Attributes
    ----------
    n : int
        Number of nodes.
    m : int
        Number of undirected edges, each counted once.
    offsets : ndarray of int64, shape (n + 1,)
        Neighbors of node ``u`` are ``neighbors[offsets[u]:offsets[u + 1]]``.
    neighbors : ndarray of int64, shape (2m,)
        Flat, per-node sorted neighbor lists.
    laziness : float
        Probability that a walker stays put at a step. The default 0 gives the
        simple random walk ``P = D^-1 A``; a value ``b`` gives ``b I + (1 - b) P``,
        which removes periodicity on bipartite graphs.
    labels : ndarray or None
        Original node ids for graphs read from an edge list.
    """

    n: int
    m: int
    offsets: np.ndarray
    neighbors: np.ndarray
    laziness: float = 0.0
    labels: np.ndarray | None = field(default=None, repr=False)

    def __post_init__(self):
        object.__setattr__(self, "offsets", _frozen(np.asarray(self.offsets, dtype=np.int64)))
        object.__setattr__(self, "neighbors", _frozen(np.asarray(self.neighbors, dtype=np.int64)))
        if self.labels is not None:
            object.__setattr__(self, "labels", _frozen(np.asarray(self.labels, dtype=np.int64)))
        if self.offsets.shape != (self.n + 1,):
            raise GraphError("offsets must have length n + 1")
        if self.neighbors.shape != (2 * self.m,) or self.offsets[-1] != 2 * self.m:
            raise GraphError("neighbors must have length 2m and offsets[n] == 2m")
        if not 0.0 <= self.laziness < 1.0:
            raise GraphError("laziness must lie in [0, 1)")

    @property
    def degrees(self) -> np.ndarray:
        return np.diff(self.offsets)

    def degree(self, u: int) -> int:
        return int(self.offsets[u + 1] - self.offsets[u])

    def neighbors_of(self, u: int) -> np.ndarray:
        return self.neighbors[self.offsets[u]:self.offsets[u + 1]]

    def with_laziness(self, beta: float) -> Graph:
        return replace(self, laziness=float(beta))

    def adjacency(self) -> sp.csr_matrix:
        data = np.ones(2 * self.m)
        return sp.csr_matrix((data, self.neighbors, self.offsets), shape=(self.n, self.n))

    def transition_matrix(self) -> sp.csr_matrix:
        """Row-stochastic kernel of the (possibly lazy) walk as a sparse matrix."""
        deg = self.degrees.astype(float)
        if np.any(deg == 0):
            raise GraphError("transition matrix undefined for isolated nodes")
        P = sp.diags(1.0 / deg) @ self.adjacency()
        if self.laziness:
            P = self.laziness * sp.identity(self.n, format="csr") + (1.0 - self.laziness) * P
        return sp.csr_matrix(P)

    def is_connected(self) -> bool:
        if self.n == 0:
            return False
        ncomp, _ = connected_components(self.adjacency(), directed=False)
        return ncomp == 1

    def is_bipartite(self) -> bool:
        color = np.full(self.n, -1, dtype=np.int64)
        for s in range(self.n):
            if color[s] >= 0:
                continue
            color[s] = 0
            stack = [s]
            while stack:
                u = stack.pop()
                for w in self.neighbors_of(u):
                    if color[w] < 0:
                        color[w] = 1 - color[u]
                        stack.append(int(w))
                    elif color[w] == color[u]:
                        return False
        return True

    def is_aperiodic(self) -> bool:
        """For a connected graph: the walk is aperiodic unless bipartite and non-lazy."""
        return self.laziness > 0 or not self.is_bipartite()

    def edges(self) -> np.ndarray:
        """Edge array of shape (m, 2) with ``u < v``, sorted lexicographically."""
        src = np.repeat(np.arange(self.n, dtype=np.int64), self.degrees)
        keep = src < self.neighbors
        return np.column_stack([src[keep], self.neighbors[keep]])

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return (
            self.n == other.n
            and self.m == other.m
            and self.laziness == other.laziness
            and np.array_equal(self.offsets, other.offsets)
            and np.array_equal(self.neighbors, other.neighbors)
        )

    __hash__ = None


def from_edges(n: int, edges, laziness: float = 0.0, labels=None) -> Graph:
    """Build a simple graph on ``n`` nodes from an (k, 2) array of endpoint pairs.

    Self-loops are dropped and repeated or reversed pairs collapse into one edge.
    """
    if n < 0 or n > MAX_NODES:
        raise GraphError(f"node count {n} out of range")
    e = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
    if e.size and (e.min() < 0 or e.max() >= n):
        raise GraphError("edge endpoint out of range")
    e = e[e[:, 0] != e[:, 1]]
    e = np.sort(e, axis=1)
    e = np.unique(e, axis=0) if e.size else e
    m = len(e)
    src = np.concatenate([e[:, 0], e[:, 1]])
    dst = np.concatenate([e[:, 1], e[:, 0]])
    order = np.lexsort((dst, src))
    src, dst = src[order], dst[order]
    offsets = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(src, minlength=n), out=offsets[1:])
    return Graph(n=n, m=m, offsets=offsets, neighbors=dst, laziness=laziness, labels=labels)


def largest_component(G: Graph) -> Graph:
    """Induced subgraph on the largest connected component, ids remapped densely."""
    _, comp = connected_components(G.adjacency(), directed=False)
    biggest = np.argmax(np.bincount(comp))
    keep = np.flatnonzero(comp == biggest)
    if len(keep) == G.n:
        return G
    remap = np.full(G.n, -1, dtype=np.int64)
    remap[keep] = np.arange(len(keep))
    e = G.edges()
    e = remap[e]
    e = e[(e >= 0).all(axis=1)]
    labels = G.labels[keep] if G.labels is not None else keep
    return from_edges(len(keep), e, laziness=G.laziness, labels=labels)


def _parse_pairs(lines) -> np.ndarray:
    pairs = []
    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) < 2:
            raise EdgeListParseError(lineno, line)
        try:
            pairs.append((int(parts[0]), int(parts[1])))
        except ValueError:
            raise EdgeListParseError(lineno, line) from None
    return np.asarray(pairs, dtype=np.int64).reshape(-1, 2)


def from_edge_list(text: str, largest_cc: bool = False) -> Graph:
    """Parse whitespace-separated id pairs (SNAP style, ``#`` comments).

    Ids are remapped to ``0..n-1`` in increasing order of the original id; the
    original ids are kept in ``Graph.labels``.
    """
    pairs = _parse_pairs(io.StringIO(text))
    if len(pairs) == 0:
        raise GraphError("edge list contains no edges")
    labels, inverse = np.unique(pairs, return_inverse=True)
    G = from_edges(len(labels), inverse.reshape(-1, 2), labels=labels)
    if G.m == 0:
        raise GraphError("edge list contains only self-loops")
    return largest_component(G) if largest_cc else G


def read_edge_list(path: str | os.PathLike, largest_cc: bool = False) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return from_edge_list(fh.read(), largest_cc=largest_cc)


def write_edge_list(G: Graph, path: str | os.PathLike, header: str | None = None,
                    use_labels: bool = False) -> None:
    e = G.edges()
    if use_labels and G.labels is not None:
        e = G.labels[e]
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"# n={G.n} m={G.m}\n")
        if header:
            for line in header.splitlines():
                fh.write(f"# {line}\n")
        np.savetxt(fh, e, fmt="%d")


def save_graph(G: Graph, path: str | os.PathLike) -> None:
    """Lossless binary round-trip format (numpy ``.npz`` with an (n, m) header)."""
    arrays = dict(header=np.array([G.n, G.m], dtype=np.int64), offsets=G.offsets,
                  neighbors=G.neighbors, laziness=np.array([G.laziness]))
    if G.labels is not None:
        arrays["labels"] = G.labels
    with open(path, "wb") as fh:
        np.savez(fh, **arrays)


def load_graph(path: str | os.PathLike) -> Graph:
    with np.load(path) as z:
        n, m = (int(x) for x in z["header"])
        labels = z["labels"] if "labels" in z.files else None
        return Graph(n=n, m=m, offsets=z["offsets"], neighbors=z["neighbors"],
                     laziness=float(z["laziness"][0]), labels=labels)


def kronecker_product(G: Graph, H: Graph) -> Graph:
    """Tensor product graph; node ``(u, v)`` has id ``u * H.n + v``.

    ``(u, v) ~ (w, z)`` iff ``u ~ w`` in G and ``v ~ z`` in H, so a simple walk on
    the product is a pair of independent simple walks.
    """
    if G.n == 0 or H.n == 0:
        raise GraphError("kronecker product of an empty graph")
    if G.n * H.n > MAX_NODES:
        raise GraphError(f"product has {G.n * H.n} nodes, more than {MAX_NODES}")
    K = sp.kron(G.adjacency(), H.adjacency(), format="coo")
    e = np.column_stack([K.row, K.col])
    return from_edges(G.n * H.n, e[e[:, 0] < e[:, 1]])


@dataclass(frozen=True)
class StationaryDist:
    pi: np.ndarray
    pi_norm_sq: float


def stationary(G: Graph) -> StationaryDist:
    """Degree-proportional stationary law ``deg(v) / 2m``."""
    if not G.is_connected():
        raise GraphError("stationary distribution requires a connected graph")
    pi = G.degrees / (2.0 * G.m)
    return StationaryDist(pi=pi, pi_norm_sq=float(pi @ pi))


def pagerank(G: Graph, damping: float = 0.85, tol: float = 1e-12, max_iter: int = 10_000) -> np.ndarray:
    if G.n == 0:
        raise GraphError("pagerank of an empty graph")
    if not 0.0 < damping < 1.0:
        raise ValueError("damping must lie in (0, 1)")
    deg = G.degrees.astype(float)
    dangling = deg == 0
    inv = np.where(dangling, 0.0, 1.0 / np.where(dangling, 1.0, deg))
    A = G.adjacency()
    x = np.full(G.n, 1.0 / G.n)
    resid = np.inf
    for _ in range(max_iter):
        nxt = damping * (A @ (x * inv)) + (damping * x[dangling].sum() + 1.0 - damping) / G.n
        nxt /= nxt.sum()
        resid = np.abs(nxt - x).sum()
        x = nxt
        if resid <= tol:
            return x
    raise RuntimeError(f"pagerank did not converge in {max_iter} iterations (residual {resid:.3e})")
