"""End-to-end embedding: graph, frames, connection, distances, MDS."""

from __future__ import annotations

import time
from contextlib import contextmanager
from dataclasses import asdict, dataclass, field

import numpy as np

from . import _kernels
from .connection import ConnectionCache, connection_cache
from .core import PointSet
from .errors import InvalidParam
from .graph import ProximityGraph, build_knn_graph, default_k, require_connected
from .landmark import LandmarkSet, embed_landmarks, place_points, select_landmarks
from .mds import Embedding, double_center, spectral_embed
from .tangent import TangentFrameSet, estimate_frames
from .transport import (
    GeodesicMatrix,
    TransportEngine,
    all_pairs_dijkstra,
    all_pairs_geodesics,
    landmark_geodesics,
)

METHODS = ("ptu", "isomap")


@dataclass
class PipelineConfig:
    method: str = "ptu"
    k: int | None = None
    K: int | None = None
    d: int = 2
    landmarks: int = 0
    landmark_strategy: str = "fps"
    rescale: bool = False
    mutual: bool = False
    seed: int = 0
    threads: int = 0

    def resolved(self) -> "PipelineConfig":
        """Copy with defaults filled in (k = 4d, K = max(k, d)) and checked."""
        c = PipelineConfig(**asdict(self))
        if c.method not in METHODS:
            raise InvalidParam(f"method must be one of {METHODS}, got {c.method!r}")
        if c.d < 1:
            raise InvalidParam(f"d must be >= 1, got {c.d}")
        if c.k is None:
            c.k = default_k(c.d)
        if c.K is None:
            c.K = max(c.k, c.d)
        if c.k < 1:
            raise InvalidParam(f"k must be >= 1, got {c.k}")
        if c.K < c.d:
            raise InvalidParam(f"K={c.K} must be at least d={c.d}")
        if c.landmarks < 0:
            raise InvalidParam("landmarks must be >= 0")
        if c.landmarks and c.landmarks < c.d + 1:
            raise InvalidParam(f"need at least d+1={c.d + 1} landmarks, got {c.landmarks}")
        if c.landmark_strategy not in ("fps", "random"):
            raise InvalidParam(f"unknown landmark strategy {c.landmark_strategy!r}")
        if c.threads < 0:
            raise InvalidParam("threads must be >= 0")
        return c


@dataclass
class PipelineResult:
    config: PipelineConfig
    embedding: Embedding
    graph: ProximityGraph
    frames: TangentFrameSet | None = None
    cache: ConnectionCache | None = None
    geodesics: GeodesicMatrix | None = None
    landmarks: LandmarkSet | None = None
    landmark_distances: np.ndarray | None = None
    timings: dict = field(default_factory=dict)


@contextmanager
def _stage(timings: dict, name: str):
    start = time.perf_counter()
    try:
        yield
    finally:
        timings[name] = timings.get(name, 0.0) + time.perf_counter() - start


def run_pipeline(points: PointSet, config: PipelineConfig | None = None, *,
                 distances_only: bool = False, **overrides) -> PipelineResult:
    """Embed `points` with PTU or Isomap, optionally through landmarks.

    With `distances_only` the run stops after the full geodesic matrix and
    ``result.embedding`` stays None.
    """
    cfg = PipelineConfig(**{**asdict(config or PipelineConfig()), **overrides}).resolved()
    if points.n < 2:
        raise InvalidParam("need at least two points")
    if cfg.d >= points.n:
        raise InvalidParam(f"d={cfg.d} must be below n={points.n}")
    if cfg.landmarks > points.n:
        raise InvalidParam(f"landmarks={cfg.landmarks} exceeds n={points.n}")
    _kernels.set_threads(cfg.threads)
    t: dict = {}
    res = PipelineResult(cfg, None, None, timings=t)

    with _stage(t, "graph"):
        g = build_knn_graph(points, min(cfg.k, points.n - 1), mutual=cfg.mutual)
        require_connected(g)
    res.graph = g

    engine = None
    if cfg.method == "ptu":
        if cfg.d > points.D:
            raise InvalidParam(f"d={cfg.d} exceeds the ambient dimension {points.D}")
        with _stage(t, "frames"):
            res.frames = estimate_frames(points, g, cfg.d, cfg.K)
        with _stage(t, "connection"):
            res.cache = connection_cache(res.frames, g)
            engine = TransportEngine(points, res.frames, res.cache, cfg.rescale)

    if distances_only and cfg.landmarks:
        raise InvalidParam("distances_only computes the full matrix; landmarks must be 0")
    if cfg.landmarks:
        with _stage(t, "landmarks"):
            res.landmarks = select_landmarks(points, g, cfg.landmarks, cfg.landmark_strategy,
                                             cfg.seed, cfg.d)
        lm = res.landmarks.indices
        with _stage(t, "geodesics"):
            res.landmark_distances = landmark_geodesics(lm, g, cfg.method, engine)
        with _stage(t, "mds"):
            d2 = res.landmark_distances**2
            le = embed_landmarks(d2[lm], cfg.d)
            z = place_points(le, d2)
            z[:, lm] = le.z_landmarks
        res.embedding = Embedding(z, le.eigenvalues)
    else:
        with _stage(t, "geodesics"):
            if cfg.method == "ptu":
                res.geodesics = all_pairs_geodesics(points, res.frames, res.cache, cfg.rescale, engine)
            else:
                res.geodesics = all_pairs_dijkstra(g)
        if distances_only:
            return res
        with _stage(t, "mds"):
            res.embedding = spectral_embed(double_center(res.geodesics.d2), cfg.d)
    return res


def lptu_pipeline(points: PointSet, k=None, K=None, d: int = 2, l: int = 20, strategy: str = "fps",
                  method: str = "ptu", seed: int = 0, **kw) -> PipelineResult:
    """Landmark variant of :func:`run_pipeline`."""
    return run_pipeline(points, k=k, K=K, d=d, landmarks=l, landmark_strategy=strategy,
                        method=method, seed=seed, **kw)
