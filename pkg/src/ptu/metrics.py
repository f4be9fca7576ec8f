"""Error measures for geodesic estimates and embeddings."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateConfig, InvalidParam

#: pairs with reference distance below this fraction of the diameter are skipped
NEAR_PAIR = 1e-9


@dataclass(frozen=True)
class ErrorReport:
    mean_rel_error: float
    median_rel_error: float
    max_rel_error: float
    min_rel_error: float
    count: int
    per_pair_errors: np.ndarray | None = None
    binned_by_path_length: dict | None = None

    def to_dict(self, prefix: str = "") -> dict:
        out = {
            f"{prefix}mean_rel_error": self.mean_rel_error,
            f"{prefix}median_rel_error": self.median_rel_error,
            f"{prefix}max_rel_error": self.max_rel_error,
            f"{prefix}min_rel_error": self.min_rel_error,
            f"{prefix}count": self.count,
        }
        for hops, err in sorted((self.binned_by_path_length or {}).items()):
            out[f"{prefix}hops_{hops}_mean_rel_error"] = err
        return out


def _summary(errors: np.ndarray, **extra) -> ErrorReport:
    if len(errors) == 0:
        raise InvalidParam("no pairs to evaluate")
    return ErrorReport(float(errors.mean()), float(np.median(errors)), float(errors.max()),
                       float(errors.min()), int(len(errors)), **extra)


def _unsquared(est) -> np.ndarray:
    if hasattr(est, "d2"):
        return est.dist
    return np.asarray(est, dtype=float)


def geodesic_error(est, truth, hop_counts=None, keep_pairs: bool = False) -> ErrorReport:
    """Relative error |est - truth| / truth over all pairs i < j.

    est is a GeodesicMatrix (squared, as used by MDS) or an unsquared n x n
    array; truth is an unsquared n x n array or a callable truth(i, j) taking
    index arrays. hop_counts (n x n) adds a per-hop-count breakdown.
    """
    E = _unsquared(est)
    n = len(E)
    iu, ju = np.triu_indices(n, 1)
    if callable(truth):
        t = np.asarray(truth(iu, ju), dtype=float)
    else:
        T = np.asarray(truth, dtype=float)
        if T.shape != E.shape:
            raise InvalidParam(f"estimate {E.shape} and truth {T.shape} differ in shape")
        t = T[iu, ju]
    e = E[iu, ju]
    keep = t > NEAR_PAIR * t.max()
    rel = np.abs(e[keep] - t[keep]) / t[keep]
    bins = None
    if hop_counts is not None:
        h = np.asarray(hop_counts)
        hh = np.minimum(h[iu, ju], h[ju, iu])[keep]
        bins = {int(b): float(rel[hh == b].mean()) for b in np.unique(hh)}
    return _summary(rel, per_pair_errors=rel if keep_pairs else None, binned_by_path_length=bins)


def rigid_align(a, b) -> tuple[np.ndarray, np.ndarray, float]:
    """Orthogonal Q and translation t minimizing ||Q a + t - b|| (reflections allowed).

    a and b are d x n. Returns (Q, t, rms) where rms is the root mean
    square per-point distance after alignment.
    """
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    if a.shape != b.shape:
        raise InvalidParam(f"shapes differ: {a.shape} vs {b.shape}")
    d, n = a.shape
    if n < d + 1:
        raise DegenerateConfig(f"need at least d+1={d + 1} points, got {n}")
    ca = a.mean(axis=1, keepdims=True)
    cb = b.mean(axis=1, keepdims=True)
    A = a - ca
    B = b - cb
    for name, M in (("first", A), ("second", B)):
        s = np.linalg.svd(M, compute_uv=False)
        if s[-1] <= 1e-12 * max(s[0], 1e-300):
            raise DegenerateConfig(f"{name} configuration spans fewer than {d} dimensions")
    U, _, Vt = np.linalg.svd(B @ A.T)
    Q = U @ Vt
    t = (cb - Q @ ca).ravel()
    resid = Q @ a + t[:, None] - b
    rms = float(np.sqrt(np.mean(np.sum(resid**2, axis=0))))
    return Q, t, rms


def bbox_diagonal(x) -> float:
    x = np.asarray(x, dtype=float)
    return float(np.linalg.norm(x.max(axis=1) - x.min(axis=1)))


def aligned(z, truth) -> np.ndarray:
    """z rigidly moved onto truth."""
    Q, t, _ = rigid_align(z, truth)
    return Q @ np.asarray(z, dtype=float) + t[:, None]


def embedding_distortion(z, truth) -> tuple[ErrorReport, np.ndarray]:
    """Per-point position error after rigid alignment, relative to the truth's bbox diagonal."""
    z = np.asarray(getattr(z, "z", z), dtype=float)
    truth = np.asarray(truth, dtype=float)
    per_point = np.linalg.norm(aligned(z, truth) - truth, axis=0) / bbox_diagonal(truth)
    return _summary(per_point), per_point


def stress(z, d2) -> float:
    """sqrt(sum (|z_i - z_j| - d_ij)^2 / sum d_ij^2) over i < j."""
    z = np.asarray(getattr(z, "z", z), dtype=float)
    target = _unsquared(d2)
    n = z.shape[1]
    iu, ju = np.triu_indices(n, 1)
    emb = np.linalg.norm(z[:, iu] - z[:, ju], axis=0)
    t = target[iu, ju]
    return float(np.sqrt(np.sum((emb - t) ** 2) / np.sum(t**2)))
