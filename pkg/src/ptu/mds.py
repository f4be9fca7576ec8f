"""Classical multidimensional scaling."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.linalg
import scipy.sparse.linalg

from .core import make_rng
from .errors import EigFailure, InvalidParam, NegativeEigenvalueWarning, NonEuclideanWarning
from .tangent import canonical_signs

#: largest n solved with a dense symmetric eigensolver
DENSE_LIMIT = 2000
EIG_TOL = 1e-10
NON_EUCLIDEAN = 0.01


@dataclass(frozen=True)
class Embedding:
    """d x n coordinates with the eigenvalues that produced them."""

    z: np.ndarray
    eigenvalues: np.ndarray
    residual_spectrum_hint: float | None = None

    @property
    def d(self) -> int:
        return self.z.shape[0]

    @property
    def n(self) -> int:
        return self.z.shape[1]

    @property
    def coords(self) -> np.ndarray:
        """n x d, one embedded point per row."""
        return np.ascontiguousarray(self.z.T)


def double_center(d2) -> np.ndarray:
    """Gram matrix -1/2 J D J with J = I - ee^t/n, by mean subtraction."""
    D = np.asarray(getattr(d2, "d2", d2), dtype=float)
    if D.ndim != 2 or D.shape[0] != D.shape[1]:
        raise InvalidParam(f"expected a square matrix, got shape {D.shape}")
    row = D.mean(axis=1)
    col = D.mean(axis=0)
    G = D - row[:, None] - col[None, :] + row.mean()
    G *= -0.5
    return G


def _start_vector(n: int) -> np.ndarray:
    # fixed Krylov start keeps iterative solves reproducible
    return make_rng(0).standard_normal(n)


def top_eigenpairs(G: np.ndarray, m: int) -> tuple[np.ndarray, np.ndarray]:
    """m algebraically largest eigenpairs of symmetric G, descending."""
    n = len(G)
    if n <= DENSE_LIMIT:
        w, Q = scipy.linalg.eigh(G, subset_by_index=[n - m, n - 1], driver="evr")
    else:
        try:
            w, Q = scipy.sparse.linalg.eigsh(G, k=m, which="LA", tol=EIG_TOL, v0=_start_vector(n))
        except scipy.sparse.linalg.ArpackNoConvergence as exc:
            raise EigFailure(f"Lanczos eigensolver did not converge: {exc}") from None
        resid = np.linalg.norm(G @ Q - Q * w, axis=0) / max(abs(w).max(), 1e-300)
        if resid.max() > 1e3 * EIG_TOL:
            raise EigFailure(f"eigenpair residual {resid.max():.3g} above tolerance")
    order = np.argsort(w)[::-1]
    return w[order], Q[:, order]


def _most_negative(G: np.ndarray) -> float | None:
    n = len(G)
    if n <= 3:
        return float(np.linalg.eigvalsh(G)[0])
    try:
        w = scipy.sparse.linalg.eigsh(G, k=1, which="SA", tol=1e-6,
                                      return_eigenvectors=False, v0=_start_vector(n))
    except scipy.sparse.linalg.ArpackError:
        return None
    return float(w[0])


def spectral_embed(gram: np.ndarray, d: int, check_euclidean: bool = True) -> Embedding:
    """Z = sqrt(Lambda_d) Q_d^t from the d largest eigenpairs of the Gram matrix."""
    G = np.asarray(gram, dtype=float)
    n = len(G)
    if not 1 <= d <= n - 1:
        raise InvalidParam(f"d must satisfy 1 <= d <= n-1={n - 1}, got {d}")
    m = min(d + 1, n)
    try:
        w, Q = top_eigenpairs(G, m)
    except np.linalg.LinAlgError as exc:
        raise EigFailure(str(exc)) from None
    lam = w[:d].copy()
    hint = float(w[d]) if m > d else None
    if lam[0] > 0 and check_euclidean:
        low = _most_negative(G)
        if low is not None and -low > NON_EUCLIDEAN * lam[0]:
            warnings.warn(
                f"Gram matrix has eigenvalue {low:.3g} (largest {lam[0]:.3g}); "
                "distances are far from Euclidean",
                NonEuclideanWarning,
            )
    neg = lam < 0
    if neg.any():
        warnings.warn(
            f"clamping {neg.sum()} negative retained eigenvalues (most negative {lam.min():.3g}) to 0",
            NegativeEigenvalueWarning,
        )
        lam[neg] = 0.0
    Q = canonical_signs(Q[:, :d])
    z = np.sqrt(lam)[:, None] * Q.T
    return Embedding(z, lam, hint)


def embed(dist, d: int) -> Embedding:
    """Double-centre a squared-distance matrix and embed it in d dimensions."""
    return spectral_embed(double_center(dist), d)
