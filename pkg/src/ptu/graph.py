"""Proximity graphs over point sets and shortest-path primitives."""

from __future__ import annotations

import heapq
import warnings
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .core import PointSet
from .errors import (
    DegenerateInput,
    GraphDisconnected,
    InvalidParam,
    IsolatedVertexWarning,
    SmallComponentWarning,
)

#: predecessor sentinel for the source and for unreached vertices
NO_PRED = -1


@dataclass(frozen=True)
class ProximityGraph:
    """Undirected weighted graph in CSR form.

    Row ``i`` of the CSR arrays lists the neighbours of vertex ``i`` sorted
    by index, with weights equal to the Euclidean edge lengths. Every edge
    is stored in both directions.
    """

    indptr: np.ndarray
    indices: np.ndarray
    weights: np.ndarray

    @property
    def n(self) -> int:
        return len(self.indptr) - 1

    @property
    def n_edges(self) -> int:
        return len(self.indices) // 2

    def degree(self) -> np.ndarray:
        return np.diff(self.indptr)

    def neighbors(self, i: int) -> np.ndarray:
        return self.indices[self.indptr[i]:self.indptr[i + 1]]

    def adjacency(self, i: int) -> list[tuple[int, float]]:
        lo, hi = self.indptr[i], self.indptr[i + 1]
        return [(int(j), float(w)) for j, w in zip(self.indices[lo:hi], self.weights[lo:hi])]

    def slot(self, i: int, j: int) -> int:
        """CSR position of the directed edge i -> j, or -1 if absent."""
        lo, hi = self.indptr[i], self.indptr[i + 1]
        pos = lo + int(np.searchsorted(self.indices[lo:hi], j))
        if pos < hi and self.indices[pos] == j:
            return pos
        return -1

    def has_edge(self, i: int, j: int) -> bool:
        return self.slot(i, j) >= 0

    def edges(self) -> np.ndarray:
        """(m, 2) array of undirected edges (i < j), lexicographically sorted."""
        rows = np.repeat(np.arange(self.n), self.degree())
        keep = rows < self.indices
        return np.column_stack([rows[keep], self.indices[keep]])

    def edge_sources(self) -> np.ndarray:
        """Row index of every CSR slot."""
        return np.repeat(np.arange(self.n), self.degree())

    @classmethod
    def from_edges(cls, n: int, edges, weights) -> "ProximityGraph":
        """Build from undirected (i, j) pairs; duplicates and self-loops rejected."""
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        weights = np.asarray(weights, dtype=float).reshape(-1)
        if len(edges) != len(weights):
            raise InvalidParam("edges and weights differ in length")
        if len(edges) and (edges.min() < 0 or edges.max() >= n):
            raise InvalidParam("edge endpoint out of range")
        if np.any(edges[:, 0] == edges[:, 1]):
            raise InvalidParam("self-loops are not allowed")
        if np.any(weights <= 0) or not np.all(np.isfinite(weights)):
            raise InvalidParam("edge weights must be finite and positive")
        src = np.concatenate([edges[:, 0], edges[:, 1]])
        dst = np.concatenate([edges[:, 1], edges[:, 0]])
        w = np.concatenate([weights, weights])
        order = np.lexsort((dst, src))
        src, dst, w = src[order], dst[order], w[order]
        if len(src) > 1 and np.any((np.diff(src) == 0) & (np.diff(dst) == 0)):
            raise InvalidParam("duplicate edges")
        indptr = np.zeros(n + 1, dtype=np.int64)
        np.add.at(indptr, src + 1, 1)
        np.cumsum(indptr, out=indptr)
        return cls(indptr, dst.astype(np.int64), w)

    def to_scipy(self):
        from scipy.sparse import csr_matrix

        return csr_matrix((self.weights, self.indices, self.indptr), shape=(self.n, self.n))


def _edge_lengths(X: np.ndarray, edges: np.ndarray) -> np.ndarray:
    diff = X[edges[:, 1]] - X[edges[:, 0]]
    return np.sqrt(np.einsum("ij,ij->i", diff, diff))


def _from_pairs(X: np.ndarray, pairs: np.ndarray) -> ProximityGraph:
    pairs = np.sort(pairs, axis=1)
    pairs = np.unique(pairs, axis=0)
    w = _edge_lengths(X, pairs)
    zero = np.flatnonzero(w == 0)
    if len(zero):
        i, j = pairs[zero[0]]
        raise DegenerateInput(f"points {i} and {j} coincide (zero-length edge)")
    return ProximityGraph.from_edges(len(X), pairs, w)


def _sq_dist_block(X: np.ndarray, lo: int, hi: int, sq: np.ndarray) -> np.ndarray:
    block = sq[lo:hi, None] + sq[None, :] - 2.0 * (X[lo:hi] @ X.T)
    np.maximum(block, 0.0, out=block)
    return block


def knn_indices(X: np.ndarray, k: int, chunk: int = 512) -> np.ndarray:
    """(n, k) indices of each row's k nearest other rows (brute force).

    Ties are broken by smaller index.
    """
    n = len(X)
    sq = np.einsum("ij,ij->i", X, X)
    out = np.empty((n, k), dtype=np.int64)
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = _sq_dist_block(X, lo, hi, sq)
        rows = np.arange(hi - lo)
        block[rows, rows + lo] = -1.0  # self always sorts first
        order = np.argsort(block, axis=1, kind="stable")
        out[lo:hi] = order[:, 1:k + 1]
    return out


def build_knn_graph(points: PointSet, k: int, mutual: bool = False) -> ProximityGraph:
    """k-nearest-neighbour graph, symmetrized by union (or intersection if `mutual`)."""
    n = points.n
    if not 1 <= k < n:
        raise InvalidParam(f"k must satisfy 1 <= k < n={n}, got {k}")
    X = points.rows
    nbrs = knn_indices(X, k)
    src = np.repeat(np.arange(n), k)
    pairs = np.column_stack([src, nbrs.ravel()])
    if mutual:
        key = np.minimum(pairs[:, 0], pairs[:, 1]) * n + np.maximum(pairs[:, 0], pairs[:, 1])
        uniq, counts = np.unique(key, return_counts=True)
        both = uniq[counts == 2]
        pairs = np.column_stack([both // n, both % n])
        # zero-length pairs must still be reported in mutual mode
        _from_pairs(X, np.column_stack([src, nbrs.ravel()]))
    return _from_pairs(X, pairs)


def build_eps_graph(points: PointSet, eps: float, chunk: int = 512):
    """Epsilon-ball graph: edge (i, j) iff ||x_i - x_j|| < eps.

    Returns ``(graph, isolated)`` where `isolated` lists vertices with no
    neighbour; an IsolatedVertexWarning is emitted when it is non-empty.
    """
    if not eps > 0:
        raise InvalidParam(f"eps must be positive, got {eps}")
    X = points.rows
    n = len(X)
    sq = np.einsum("ij,ij->i", X, X)
    # expansion round-off is relative to the squared norms
    slack = 1e-6 * np.sqrt(sq.max()) if n else 0.0
    found = []
    for lo in range(0, n, chunk):
        hi = min(lo + chunk, n)
        block = _sq_dist_block(X, lo, hi, sq)
        # generous candidate filter, then exact lengths decide
        ii, jj = np.nonzero(block < (eps + slack) ** 2)
        ii = ii + lo
        keep = ii < jj
        found.append(np.column_stack([ii[keep], jj[keep]]))
    pairs = np.concatenate(found) if found else np.empty((0, 2), dtype=np.int64)
    if len(pairs):
        w = _edge_lengths(X, pairs)
        pairs = pairs[w < eps]
    g = _from_pairs(X, pairs) if len(pairs) else ProximityGraph.from_edges(n, pairs, [])
    isolated = [int(i) for i in np.flatnonzero(g.degree() == 0)]
    if isolated:
        warnings.warn(f"{len(isolated)} isolated vertices: {isolated[:10]}", IsolatedVertexWarning)
    return g, isolated


def connected_components(g: ProximityGraph) -> list[list[int]]:
    """Vertex sets of the connected components, ordered by smallest member."""
    label = np.full(g.n, -1, dtype=np.int64)
    comps = []
    for start in range(g.n):
        if label[start] >= 0:
            continue
        label[start] = len(comps)
        members = [start]
        stack = [start]
        while stack:
            v = stack.pop()
            for u in g.neighbors(v):
                if label[u] < 0:
                    label[u] = len(comps)
                    members.append(int(u))
                    stack.append(int(u))
        comps.append(sorted(members))
    return comps


def require_connected(g: ProximityGraph) -> None:
    comps = connected_components(g)
    if len(comps) > 1:
        raise GraphDisconnected(len(c) for c in comps)


@dataclass(frozen=True)
class ShortestPathTree:
    source: int
    dist: np.ndarray
    pred: np.ndarray
    order: np.ndarray

    def path_to(self, target: int) -> list[int]:
        """Vertex list from the source to `target` following predecessors."""
        if not np.isfinite(self.dist[target]):
            raise ValueError(f"vertex {target} is not reachable from {self.source}")
        path = [int(target)]
        while path[-1] != self.source:
            path.append(int(self.pred[path[-1]]))
        return path[::-1]


def dijkstra(g: ProximityGraph, source: int) -> ShortestPathTree:
    """Exact single-source shortest paths; unreachable vertices get inf."""
    if not 0 <= source < g.n:
        raise InvalidParam(f"source {source} out of range")
    n = g.n
    dist = np.empty(n)
    pred = np.empty(n, dtype=np.int64)
    slot = np.empty(n, dtype=np.int64)
    order = np.empty(n, dtype=np.int64)
    count = _kernels.sssp(g.indptr, g.indices, g.weights, source, dist, pred, slot, order)
    return ShortestPathTree(source, dist, pred, order[:count].copy())


def geodesic_knn(g: ProximityGraph, i: int, K: int) -> list[tuple[int, float]]:
    """The K vertices closest to `i` in graph distance, excluding `i` itself.

    Truncated Dijkstra: stops once K vertices have been settled.
    """
    if K < 1:
        raise InvalidParam(f"K must be >= 1, got {K}")
    dist = {i: 0.0}
    done = set()
    heap = [(0.0, i)]
    out = []
    while heap and len(out) < K:
        d, r = heapq.heappop(heap)
        if r in done or d > dist[r]:
            continue
        done.add(r)
        if r != i:
            out.append((r, d))
        lo, hi = g.indptr[r], g.indptr[r + 1]
        for j, w in zip(g.indices[lo:hi].tolist(), g.weights[lo:hi].tolist()):
            if j in done:
                continue
            t = d + w
            if t < dist.get(j, np.inf):
                dist[j] = t
                heapq.heappush(heap, (t, j))
    if len(out) < K:
        warnings.warn(
            f"vertex {i}: component has only {len(out)} other vertices (< K={K})",
            SmallComponentWarning,
        )
    return out


def default_k(d: int) -> int:
    """Neighbour count heuristic: about 4d."""
    return 4 * d
