"""Discrete metric connection between adjacent tangent frames."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .errors import IllConditionedWarning, InvalidParam
from .graph import ProximityGraph
from .tangent import TangentFrameSet

#: smallest singular value of T_i^t T_j below which a warning is raised
ILL_CONDITIONED = 0.1


def _procrustes(M: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """For M = U S V^t (stacked), return (V U^t, S)."""
    U, s, Vt = np.linalg.svd(M)
    return np.swapaxes(Vt, -1, -2) @ np.swapaxes(U, -1, -2), s


def discrete_connection(Ti: np.ndarray, Tj: np.ndarray) -> np.ndarray:
    """Orthogonal R_{j,i} minimizing ||Ti - Tj R||_F over O(d).

    R_{j,i} maps coordinates in frame i to coordinates in frame j.
    """
    Ti = np.asarray(Ti, dtype=float)
    Tj = np.asarray(Tj, dtype=float)
    if Ti.shape != Tj.shape:
        raise InvalidParam(f"frame shapes differ: {Ti.shape} vs {Tj.shape}")
    R, s = _procrustes(Ti.T @ Tj)
    if s[-1] < ILL_CONDITIONED:
        warnings.warn(
            f"tangent frames nearly orthogonal (sigma_min={s[-1]:.3g})", IllConditionedWarning
        )
    return R


@dataclass(frozen=True)
class ConnectionCache:
    """One connection matrix per undirected edge.

    rotations[e] is R_{i,j} for edges[e] = (i, j) with i < j; the opposite
    direction is its transpose.
    """

    graph: ProximityGraph
    edges: np.ndarray
    rotations: np.ndarray
    sigma_min: np.ndarray

    def _edge_index(self, i: int, j: int) -> int:
        a, b = (i, j) if i < j else (j, i)
        lo = np.searchsorted(self.edges[:, 0], a, side="left")
        hi = np.searchsorted(self.edges[:, 0], a, side="right")
        pos = lo + int(np.searchsorted(self.edges[lo:hi, 1], b))
        if pos >= hi or self.edges[pos, 1] != b:
            raise KeyError(f"({i}, {j}) is not an edge")
        return pos

    def lookup(self, i: int, j: int) -> np.ndarray:
        """R_{i,j}: carries frame-j coordinates into frame i."""
        R = self.rotations[self._edge_index(i, j)]
        return R if i < j else R.T

    def per_slot(self) -> np.ndarray:
        """R_{q,r} for every directed CSR slot q -> r of the graph."""
        g = self.graph
        q = g.edge_sources()
        r = g.indices
        a = np.minimum(q, r)
        b = np.maximum(q, r)
        # edges are lexicographically sorted, so a flat key search finds them
        key = self.edges[:, 0] * g.n + self.edges[:, 1]
        idx = np.searchsorted(key, a * g.n + b)
        R = self.rotations[idx]
        flip = q > r
        R[flip] = np.swapaxes(R[flip], -1, -2)
        return np.ascontiguousarray(R)

    def ill_conditioned(self) -> np.ndarray:
        return self.edges[self.sigma_min < ILL_CONDITIONED]


def connection_cache(frames: TangentFrameSet, g: ProximityGraph) -> ConnectionCache:
    if frames.n != g.n:
        raise InvalidParam("frames and graph sizes differ")
    edges = g.edges()
    T = frames.frames
    # R_{i,j} = discrete_connection(T_j, T_i), from the SVD of T_j^t T_i
    M = np.einsum("eDa,eDb->eab", T[edges[:, 1]], T[edges[:, 0]])
    R, s = _procrustes(M)
    smin = s[:, -1] if len(s) else np.empty(0)
    bad = np.flatnonzero(smin < ILL_CONDITIONED)
    if len(bad):
        shown = ", ".join(f"({a}, {b})" for a, b in edges[bad[:5]])
        warnings.warn(
            f"{len(bad)} edges join nearly orthogonal tangent frames, e.g. {shown}",
            IllConditionedWarning,
        )
    return ConnectionCache(g, edges, R, smin)
