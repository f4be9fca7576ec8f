"""Path unfolding by parallel transport and the transport-augmented Dijkstra.

A graph path x_1, ..., x_m is developed into the tangent space at x_1:
each edge is projected onto the tangent frame at its tail and carried back
to the first frame through the accumulated product of edge connections.
The distance estimate is the length of the resulting vector. Inside
Dijkstra the accumulated product and vector are stored per settled vertex,
so every prefix is computed once.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from . import _kernels
from .connection import ConnectionCache
from .core import PointSet
from .errors import AsymmetryWarning, InvalidParam, NotAPath, UnreachedVertex, ZeroProjection
from .graph import ProximityGraph, ShortestPathTree, connected_components, dijkstra
from .tangent import TangentFrameSet

#: relative |span_ij - span_ji| above which a pair is reported as asymmetric
ASYMMETRY_THRESHOLD = 0.05
ZERO_PROJECTION = 1e-12


@dataclass(frozen=True)
class UnfoldedPath:
    source: int
    vertices: list
    positions: np.ndarray

    @property
    def span(self) -> float:
        return float(np.linalg.norm(self.positions[-1] - self.positions[0]))

    @property
    def segment_lengths(self) -> np.ndarray:
        return np.linalg.norm(np.diff(self.positions, axis=0), axis=1)

    def max_deviation(self) -> float:
        """Largest distance from the unfolded polyline to its chord, over chord length."""
        y = self.positions
        chord = y[-1] - y[0]
        length = np.linalg.norm(chord)
        if length == 0:
            return 0.0
        u = chord / length
        rel = y - y[0]
        t = np.clip(rel @ u, 0.0, length)
        off = np.linalg.norm(rel - t[:, None] * u, axis=1)
        return float(off.max() / length)


@dataclass(frozen=True)
class GeodesicMatrix:
    """Symmetric matrix of squared geodesic distance estimates.

    raw keeps the unsquared, pre-symmetrization estimates (row = source)
    and hops the edge count of each source's shortest path.
    """

    d2: np.ndarray
    method: str
    raw: np.ndarray | None = field(default=None, repr=False)
    hops: np.ndarray | None = field(default=None, repr=False)

    @property
    def n(self) -> int:
        return self.d2.shape[0]

    @property
    def dist(self) -> np.ndarray:
        return np.sqrt(self.d2)

    def asymmetry(self) -> np.ndarray:
        """|span_ij - span_ji| / mean span, zero where undefined."""
        if self.raw is None:
            return np.zeros_like(self.d2)
        diff = np.abs(self.raw - self.raw.T)
        mean = 0.5 * (self.raw + self.raw.T)
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(mean > 0, diff / mean, 0.0)


def edge_projections(points: PointSet, frames: TangentFrameSet, g: ProximityGraph,
                     rescale: bool = False) -> np.ndarray:
    """T_q^t (x_r - x_q) for every directed CSR slot q -> r, shape (slots, d)."""
    X = points.rows
    q = g.edge_sources()
    e = X[g.indices] - X[q]
    v = np.einsum("sDa,sD->sa", frames.frames[q], e)
    if rescale:
        v = _rescale(v, np.linalg.norm(e, axis=1), q, g.indices)
    return v


def _rescale(v, elen, tails, heads):
    vlen = np.linalg.norm(v, axis=1)
    bad = np.flatnonzero(vlen < ZERO_PROJECTION * elen)
    if len(bad):
        s = bad[0]
        raise ZeroProjection(
            f"edge ({tails[s]}, {heads[s]}) projects to zero on the tangent frame; "
            "cannot rescale"
        )
    return v * (elen / vlen)[:, None]


def unfold_path(points: PointSet, frames: TangentFrameSet, cache: ConnectionCache,
                path, rescale: bool = False) -> UnfoldedPath:
    """Develop a graph path into the tangent space at its first vertex."""
    path = [int(v) for v in path]
    if len(path) < 2:
        raise InvalidParam("a path needs at least two vertices")
    g = cache.graph
    X = points.rows
    T = frames.frames
    d = frames.d
    positions = np.zeros((len(path), d))
    acc = np.eye(d)
    for s in range(len(path) - 1):
        a, b = path[s], path[s + 1]
        if not g.has_edge(a, b):
            raise NotAPath(f"vertices {a} and {b} are not adjacent")
        e = X[b] - X[a]
        local = T[a].T @ e
        if rescale:
            local = _rescale(local[None, :], np.array([np.linalg.norm(e)]), [a], [b])[0]
        positions[s + 1] = positions[s] + acc @ local
        acc = acc @ cache.lookup(a, b)
    return UnfoldedPath(path[0], path, positions)


class TransportEngine:
    """Precomputed per-edge data shared by every single-source run."""

    def __init__(self, points: PointSet, frames: TangentFrameSet, cache: ConnectionCache,
                 rescale: bool = False):
        g = cache.graph
        if not (points.n == frames.n == g.n):
            raise InvalidParam("points, frames and graph sizes differ")
        self.points = points
        self.frames = frames
        self.cache = cache
        self.graph = g
        self.rescale = rescale
        self.edge_vec = np.ascontiguousarray(edge_projections(points, frames, g, rescale))
        self.edge_rot = cache.per_slot()

    def rows(self, sources) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(spans, graph distances, hop counts), one row per source."""
        g = self.graph
        sources = np.asarray(sources, dtype=np.int64)
        return _kernels.transport_rows(g.indptr, g.indices, g.weights,
                                       self.edge_vec, self.edge_rot, sources)


def ptu_dijkstra_from(source: int, points: PointSet, frames: TangentFrameSet,
                      cache: ConnectionCache, rescale: bool = False,
                      engine: TransportEngine | None = None) -> tuple[np.ndarray, ShortestPathTree]:
    """Spans from `source` to every vertex plus the shortest-path tree used."""
    engine = engine or TransportEngine(points, frames, cache, rescale)
    spans, _, _ = engine.rows([source])
    return spans[0], dijkstra(engine.graph, source)


def _check_reached(m: np.ndarray, g: ProximityGraph) -> None:
    if not np.all(np.isfinite(m)):
        sizes = [len(c) for c in connected_components(g)]
        raise UnreachedVertex(f"graph is disconnected (component sizes {sizes})")


def _warn_asymmetry(raw: np.ndarray) -> None:
    mean = 0.5 * (raw + raw.T)
    with np.errstate(divide="ignore", invalid="ignore"):
        rel = np.where(mean > 0, np.abs(raw - raw.T) / mean, 0.0)
    count = int(np.count_nonzero(np.triu(rel > ASYMMETRY_THRESHOLD, 1)))
    if count:
        i, j = np.unravel_index(np.argmax(rel), rel.shape)
        warnings.warn(
            f"{count} pairs differ by more than {ASYMMETRY_THRESHOLD:.0%} between directions "
            f"(worst ({i}, {j}): {rel[i, j]:.3g}); sampling may be too sparse for the curvature",
            AsymmetryWarning,
        )


def all_pairs_geodesics(points: PointSet, frames: TangentFrameSet, cache: ConnectionCache,
                        rescale: bool = False, engine: TransportEngine | None = None) -> GeodesicMatrix:
    engine = engine or TransportEngine(points, frames, cache, rescale)
    n = engine.graph.n
    raw, _, hops = engine.rows(np.arange(n))
    _check_reached(raw, engine.graph)
    _warn_asymmetry(raw)
    sym = 0.5 * (raw + raw.T)
    np.fill_diagonal(sym, 0.0)
    return GeodesicMatrix(sym * sym, "ptu", raw=raw, hops=hops)


def all_pairs_dijkstra(g: ProximityGraph) -> GeodesicMatrix:
    dist, hops = _kernels.dijkstra_rows(g.indptr, g.indices, g.weights, np.arange(g.n))
    _check_reached(dist, g)
    # reversed paths sum in a different order; averaging makes symmetry exact
    sym = 0.5 * (dist + dist.T)
    return GeodesicMatrix(sym * sym, "isomap", raw=dist, hops=hops)


def landmark_geodesics(landmarks, g: ProximityGraph, method: str = "ptu",
                       engine: TransportEngine | None = None) -> np.ndarray:
    """n x l unsquared distances from each landmark (column) to every point."""
    landmarks = np.asarray(landmarks, dtype=np.int64)
    if len(np.unique(landmarks)) != len(landmarks):
        raise InvalidParam("landmarks must be distinct")
    if len(landmarks) and (landmarks.min() < 0 or landmarks.max() >= g.n):
        raise InvalidParam("landmark index out of range")
    if method == "ptu":
        if engine is None:
            raise InvalidParam("ptu landmark distances need a TransportEngine")
        rows, _, _ = engine.rows(landmarks)
    elif method in ("dijkstra", "isomap"):
        rows, _ = _kernels.dijkstra_rows(g.indptr, g.indices, g.weights, landmarks)
    else:
        raise InvalidParam(f"unknown method {method!r}")
    _check_reached(rows, g)
    block = rows[:, landmarks]
    rows[:, landmarks] = 0.5 * (block + block.T)
    return np.ascontiguousarray(rows.T)


def path_diagnostics(points: PointSet, frames: TangentFrameSet, cache: ConnectionCache,
                     geo: GeodesicMatrix, pairs, rescale: bool = False) -> list[dict]:
    """Deviation from straightness and direction asymmetry for chosen pairs."""
    asym = geo.asymmetry()
    out = []
    trees = {}
    for i, j in pairs:
        i, j = int(i), int(j)
        if i not in trees:
            trees[i] = dijkstra(cache.graph, i)
        dev = 0.0
        if i != j:
            dev = unfold_path(points, frames, cache, trees[i].path_to(j), rescale).max_deviation()
        out.append({"i": i, "j": j, "max_deviation": dev, "asymmetry": float(asym[i, j])})
    return out
