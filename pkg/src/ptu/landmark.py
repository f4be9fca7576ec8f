"""Landmark MDS: embed a few landmarks, place everything else in closed form."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import PointSet, make_rng
from .errors import DegenerateSpectrum, InvalidParam
from .graph import ProximityGraph, dijkstra
from .mds import double_center, top_eigenpairs
from .tangent import canonical_signs

STRATEGIES = ("fps", "random")
SPECTRUM_FLOOR = 1e-12


@dataclass(frozen=True)
class LandmarkSet:
    indices: np.ndarray
    method: str

    def __len__(self):
        return len(self.indices)


@dataclass(frozen=True)
class LandmarkEmbedding:
    """MDS layout of the landmarks plus what is needed to place other points.

    z_landmarks is d x l, pseudoinverse is the l x d matrix Q_d Lambda_d^{-1/2}
    and dbar holds the column means of the landmark squared-distance block.
    """

    z_landmarks: np.ndarray
    pseudoinverse: np.ndarray
    dbar: np.ndarray
    eigenvalues: np.ndarray


def _strategy(name: str) -> str:
    aliases = {"fps": "fps", "farthest-point": "fps", "random": "random"}
    if name not in aliases:
        raise InvalidParam(f"unknown landmark strategy {name!r}; choose from {STRATEGIES}")
    return aliases[name]


def select_landmarks(points: PointSet, g: ProximityGraph, l: int, strategy: str = "fps",
                     seed: int = 0, d: int = 1) -> LandmarkSet:
    """Choose l landmarks by farthest-point sampling on graph distance, or at random.

    The first farthest-point landmark is drawn from the seeded generator;
    each following one maximizes the graph distance to those already chosen
    (ties go to the smaller index).
    """
    n = points.n
    strategy = _strategy(strategy)
    if not d + 1 <= l <= n:
        raise InvalidParam(f"landmark count must satisfy d+1={d + 1} <= l <= n={n}, got {l}")
    rng = make_rng(seed)
    if strategy == "random":
        idx = rng.choice(n, size=l, replace=False)
        return LandmarkSet(np.asarray(idx, dtype=np.int64), "random")
    chosen = [int(rng.integers(n))]
    nearest = dijkstra(g, chosen[0]).dist.copy()
    while len(chosen) < l:
        nearest[chosen] = -1.0
        nxt = int(np.argmax(nearest))
        chosen.append(nxt)
        np.minimum(nearest, dijkstra(g, nxt).dist, out=nearest)
    return LandmarkSet(np.array(chosen, dtype=np.int64), "fps")


def embed_landmarks(d2_ll, d: int) -> LandmarkEmbedding:
    """Classical MDS on the l x l squared-distance block of the landmarks."""
    D = np.asarray(d2_ll, dtype=float)
    l = len(D)
    if not 1 <= d <= l - 1:
        raise InvalidParam(f"need at least d+1={d + 1} landmarks, got {l}")
    w, Q = top_eigenpairs(double_center(D), d)
    if not w[d - 1] > SPECTRUM_FLOOR * max(w[0], 0.0):
        raise DegenerateSpectrum(
            f"landmark Gram spectrum is degenerate (eigenvalues {w}); "
            "landmarks do not span d dimensions"
        )
    Q = canonical_signs(Q)
    root = np.sqrt(w)
    return LandmarkEmbedding(root[:, None] * Q.T, Q / root[None, :], D.mean(axis=0), w)


def place_point(le: LandmarkEmbedding, d_i) -> np.ndarray:
    """Position from squared distances to the landmarks: 1/2 Z^+t (dbar - d_i)."""
    return 0.5 * (le.pseudoinverse.T @ (le.dbar - np.asarray(d_i, dtype=float)))


def place_points(le: LandmarkEmbedding, d2_nl) -> np.ndarray:
    """Vectorized place_point over the rows of an n x l squared-distance matrix; d x n."""
    d2_nl = np.asarray(d2_nl, dtype=float)
    return 0.5 * (le.pseudoinverse.T @ (le.dbar[:, None] - d2_nl.T))
