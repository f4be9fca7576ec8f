"""Tangent frames from truncated SVD of geodesic neighbourhoods."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

from .core import PointSet
from .errors import InvalidParam, NeighborhoodTooSmall, RankDeficient, SmallComponentWarning
from .graph import ProximityGraph, geodesic_knn

RANK_TOL = 1e-10


@dataclass(frozen=True)
class TangentFrameSet:
    """Per-point orthonormal tangent bases.

    frames has shape (n, D, d); frames[i] is the D x d matrix whose columns
    span the estimated tangent space at point i. singular_values[i] holds
    the full spectrum of the centred neighbourhood, largest first.
    """

    frames: np.ndarray
    singular_values: np.ndarray

    @property
    def d(self) -> int:
        return self.frames.shape[2]

    @property
    def n(self) -> int:
        return self.frames.shape[0]

    def gap_ratio(self) -> np.ndarray:
        """sigma_{d+1} / sigma_d per point (0 when the spectrum stops at d)."""
        d = self.d
        s = self.singular_values
        if s.shape[1] <= d:
            return np.zeros(len(s))
        with np.errstate(divide="ignore", invalid="ignore"):
            return np.where(s[:, d - 1] > 0, s[:, d] / s[:, d - 1], np.inf)


def canonical_signs(vectors: np.ndarray) -> np.ndarray:
    """Flip columns so each one's largest-magnitude entry is positive.

    Works on a single (m, c) matrix or a stack (..., m, c).
    """
    idx = np.argmax(np.abs(vectors), axis=-2)
    peak = np.take_along_axis(vectors, idx[..., None, :], axis=-2)
    signs = np.where(peak < 0, -1.0, 1.0)
    return vectors * signs


def neighborhoods(g: ProximityGraph, K: int) -> np.ndarray:
    """(n, K) geodesic K-neighbourhoods, closest first; centre excluded."""
    out = np.empty((g.n, K), dtype=np.int64)
    with warnings.catch_warnings():
        warnings.simplefilter("error", SmallComponentWarning)
        for i in range(g.n):
            try:
                nb = geodesic_knn(g, i, K)
            except SmallComponentWarning:
                raise NeighborhoodTooSmall(
                    f"point {i}: its connected component has fewer than K+1={K + 1} points"
                ) from None
            out[i] = [j for j, _ in nb]
    return out


def _centred_stack(X: np.ndarray, nbr: np.ndarray) -> np.ndarray:
    """(n, D, K) stack of neighbour offsets x_j - x_i as columns."""
    return np.transpose(X[nbr] - X[:, None, :], (0, 2, 1))


def estimate_frames(points: PointSet, g: ProximityGraph, d: int, K: int) -> TangentFrameSet:
    """Tangent frame at every point from its K graph-nearest neighbours.

    The frame is the d leading left singular vectors of the D x K matrix of
    neighbour offsets, with canonicalized signs.
    """
    if not 1 <= d <= points.D:
        raise InvalidParam(f"d={d} must be between 1 and the ambient dimension {points.D}")
    if K < d:
        raise InvalidParam(f"K={K} must be at least d={d}")
    if g.n != points.n:
        raise InvalidParam("graph and point set sizes differ")
    nbr = neighborhoods(g, K)
    A = _centred_stack(points.rows, nbr)
    U, s, _ = np.linalg.svd(A, full_matrices=False)
    smax = s[:, 0]
    bad = np.flatnonzero(~(s[:, d - 1] > RANK_TOL * smax))
    if len(bad):
        i = int(bad[0])
        raise RankDeficient(
            f"point {i}: neighbourhood spans fewer than d={d} directions "
            f"(singular values {np.array2string(s[i], precision=3)})"
        )
    frames = canonical_signs(np.ascontiguousarray(U[:, :, :d]))
    return TangentFrameSet(frames, s)


@dataclass(frozen=True)
class DimensionReport:
    """Normalized neighbourhood spectra (sigma_m / sigma_1) per point."""

    spectra: np.ndarray

    @property
    def median_spectrum(self) -> np.ndarray:
        return np.median(self.spectra, axis=0)

    def suggested_gap(self) -> int:
        """Index m maximizing median sigma_m / sigma_{m+1}; advisory only."""
        med = self.median_spectrum
        ratios = med[:-1] / np.maximum(med[1:], 1e-300)
        return int(np.argmax(ratios)) + 1


def estimate_intrinsic_dim_hint(points: PointSet, g: ProximityGraph, K: int) -> DimensionReport:
    if K < 2:
        raise InvalidParam(f"K must be >= 2, got {K}")
    nbr = neighborhoods(g, K)
    s = np.linalg.svd(_centred_stack(points.rows, nbr), compute_uv=False)
    s = s / np.maximum(s[:, :1], 1e-300)
    return DimensionReport(s)


def subspace_angles(F1: np.ndarray, F2: np.ndarray) -> np.ndarray:
    """Largest principal angle (radians) between paired frame stacks."""
    M = np.einsum("nDa,nDb->nab", F1, F2)
    s = np.linalg.svd(M, compute_uv=False)
    return np.arccos(np.clip(s[:, -1], -1.0, 1.0))
