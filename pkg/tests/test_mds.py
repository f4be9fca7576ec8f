import warnings

import numpy as np
import pytest

from ptu import mds
from ptu.datasets import gen_swiss_roll
from ptu.errors import InvalidParam, NegativeEigenvalueWarning, NonEuclideanWarning, PTUWarning
from ptu.metrics import rigid_align, stress
from ptu.mds import double_center, embed, spectral_embed, top_eigenpairs
from ptu.pipeline import run_pipeline


def sqdist(Z):
    return np.sum((Z[:, :, None] - Z[:, None, :]) ** 2, axis=0)


def explicit_gram(D):
    n = len(D)
    J = np.eye(n) - np.ones((n, n)) / n
    return -0.5 * J @ D @ J


def test_two_points_by_hand():
    s = 2.5
    np.testing.assert_allclose(double_center(np.array([[0, s], [s, 0]])), [[s / 4, -s / 4], [-s / 4, s / 4]])


def test_zero_matrix():
    assert np.array_equal(double_center(np.zeros((4, 4))), np.zeros((4, 4)))


@pytest.mark.parametrize("n", [3, 10, 57])
def test_centering_matches_explicit_product(rng, n):
    A = rng.uniform(size=(n, n))
    D = A + A.T
    np.fill_diagonal(D, 0)
    G = double_center(D)
    assert np.abs(G - explicit_gram(D)).max() <= 1e-10
    assert np.linalg.norm(G @ np.ones(n)) <= 1e-8 * np.linalg.norm(G)


def test_non_square_rejected():
    with pytest.raises(InvalidParam):
        double_center(np.zeros((2, 3)))


def test_planar_configuration_recovered(rng):
    Z0 = rng.standard_normal((2, 40))
    emb = embed(sqdist(Z0), 2)
    _, _, rms = rigid_align(emb.z, Z0)
    assert rms <= 1e-8
    np.testing.assert_allclose(emb.z.mean(axis=1), 0, atol=1e-10)
    iu = np.triu_indices(40, 1)
    np.testing.assert_allclose(np.sqrt(sqdist(emb.z))[iu], np.sqrt(sqdist(Z0))[iu], rtol=1e-8)


def test_rank_one_gram(rng):
    x = rng.standard_normal((1, 20))
    emb = spectral_embed(double_center(sqdist(x)), 2)
    assert emb.eigenvalues[1] <= 1e-10 * emb.eigenvalues[0]
    assert np.abs(emb.z[1]).max() <= 1e-6


def test_345_triangle():
    D = np.array([[0, 3, 4], [3, 0, 5], [4, 5, 0]], dtype=float) ** 2
    z = embed(D, 2).z
    sides = sorted(np.sqrt(sqdist(z))[np.triu_indices(3, 1)])
    np.testing.assert_allclose(sides, [3, 4, 5], atol=1e-9)


@pytest.mark.parametrize("seed", range(4))
def test_top_pairs_match_full_eigensolver(seed):
    r = np.random.default_rng(seed)
    n = int(r.integers(20, 201))
    B = r.standard_normal((n, n))
    G = B @ B.T
    w, Q = top_eigenpairs(G, 3)
    full = np.linalg.eigvalsh(G)[::-1][:3]
    np.testing.assert_allclose(w, full, rtol=1e-8)
    np.testing.assert_allclose(G @ Q, Q * w, atol=1e-8 * full[0])


def test_lanczos_branch_matches_dense(rng, monkeypatch):
    Z = rng.standard_normal((3, 300))
    G = double_center(sqdist(Z))
    dense_w, _ = top_eigenpairs(G, 3)
    monkeypatch.setattr(mds, "DENSE_LIMIT", 100)
    w, Q = top_eigenpairs(G, 3)
    np.testing.assert_allclose(w, dense_w, rtol=1e-9)
    assert np.array_equal(top_eigenpairs(G, 3)[1], Q)


def test_sign_canonical(rng):
    z = embed(sqdist(rng.standard_normal((2, 30))), 2).z
    idx = np.argmax(np.abs(z), axis=1)
    assert np.all(z[np.arange(2), idx] > 0)


def test_perturbation_never_improves_objective(rng):
    Z0 = rng.standard_normal((4, 25))
    D = sqdist(Z0)
    D = D * (1 + 0.05 * np.abs(rng.standard_normal(D.shape)))
    D = 0.5 * (D + D.T)
    np.fill_diagonal(D, 0)
    G = double_center(D)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", PTUWarning)
        z = spectral_embed(G, 2).z
    base = np.linalg.norm(z.T @ z - G)
    for _ in range(100):
        zp = z + 1e-4 * rng.standard_normal(z.shape)
        assert np.linalg.norm(zp.T @ zp - G) >= base - 1e-12


def test_non_euclidean_and_negative_warnings():
    # squared distances of a 4-cycle metric with long diagonals: strongly non-Euclidean
    D = np.array([[0, 1, 9, 1], [1, 0, 1, 9], [9, 1, 0, 1], [1, 9, 1, 0]], dtype=float)
    with pytest.warns(NonEuclideanWarning):
        spectral_embed(double_center(D), 1)
    with pytest.warns(NegativeEigenvalueWarning):
        emb = spectral_embed(-np.eye(3) + 1 / 3, 1, check_euclidean=False)
    assert np.all(emb.eigenvalues >= 0)


def test_d_range():
    with pytest.raises(InvalidParam):
        spectral_embed(np.eye(3), 3)


def test_swiss_roll_stress():
    ds = gen_swiss_roll(1200, seed=3)
    res = run_pipeline(ds.points, k=10, K=10, d=2)
    assert stress(res.embedding.z, res.geodesics) <= 0.02
