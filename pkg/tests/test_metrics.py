import numpy as np
import pytest
from scipy.stats import ortho_group

from ptu.errors import DegenerateConfig, InvalidParam
from ptu.metrics import embedding_distortion, geodesic_error, rigid_align, stress
from ptu.transport import GeodesicMatrix


def pdist(X):
    return np.linalg.norm(X[:, :, None] - X[:, None, :], axis=0)


@pytest.fixture
def truth(rng):
    return pdist(rng.standard_normal((3, 30)))


def test_exact_estimate_zero_error(truth):
    rep = geodesic_error(truth, truth)
    assert rep.mean_rel_error == rep.max_rel_error == 0.0
    assert rep.count == 30 * 29 // 2


def test_uniform_overestimate(truth):
    rep = geodesic_error(1.1 * truth, truth)
    assert rep.mean_rel_error == pytest.approx(0.1, rel=1e-12)
    assert rep.min_rel_error <= rep.mean_rel_error <= rep.max_rel_error


def test_squared_matrix_and_callable_truth(truth):
    est = GeodesicMatrix((1.2 * truth) ** 2, "ptu")
    rep = geodesic_error(est, lambda i, j: truth[i, j])
    assert rep.mean_rel_error == pytest.approx(0.2, rel=1e-12)


def test_scale_covariance(rng, truth):
    est = truth * (1 + 0.1 * rng.random(truth.shape))
    a = geodesic_error(est, truth)
    b = geodesic_error(7.3 * est, 7.3 * truth)
    assert abs(a.mean_rel_error - b.mean_rel_error) <= 1e-12
    assert abs(a.max_rel_error - b.max_rel_error) <= 1e-12


def test_hop_binning(truth):
    hops = np.ones_like(truth, dtype=int)
    hops[0, :] = hops[:, 0] = 2
    est = truth.copy()
    est[0, 1:] *= 1.5
    est[1:, 0] *= 1.5
    rep = geodesic_error(est, truth, hop_counts=hops, keep_pairs=True)
    assert rep.binned_by_path_length == {1: 0.0, 2: pytest.approx(0.5)}
    assert len(rep.per_pair_errors) == rep.count
    d = rep.to_dict("g_")
    assert d["g_hops_2_mean_rel_error"] == pytest.approx(0.5)


def test_near_coincident_pairs_skipped(truth):
    t = truth.copy()
    t[0, 1] = t[1, 0] = 1e-12
    rep = geodesic_error(truth, t)
    assert rep.count == 30 * 29 // 2 - 1


def test_shape_mismatch(truth):
    with pytest.raises(InvalidParam):
        geodesic_error(truth, truth[:-1, :-1])


@pytest.mark.parametrize("reflect", [False, True])
def test_rigid_motion_recovered(rng, reflect):
    a = rng.standard_normal((3, 20))
    Q = ortho_group.rvs(3, random_state=1)
    if reflect:
        Q = Q @ np.diag([1, 1, -1])
    b = Q @ a + rng.standard_normal((3, 1))
    _, _, rms = rigid_align(a, b)
    assert rms <= 1e-10


def test_alignment_beats_random_candidates(rng):
    a = rng.standard_normal((2, 25))
    b = ortho_group.rvs(2, random_state=3) @ a + 0.2 * rng.standard_normal((2, 25))
    _, _, rms = rigid_align(a, b)
    A = a - a.mean(axis=1, keepdims=True)
    B = b - b.mean(axis=1, keepdims=True)
    cands = ortho_group.rvs(2, size=10_000, random_state=4)
    cand_rms = np.sqrt(np.mean(np.sum((cands @ A - B) ** 2, axis=1), axis=1))
    assert cand_rms.min() >= rms - 1e-12


def test_residual_invariant_under_rigid_motions(rng):
    a = rng.standard_normal((3, 15))
    b = rng.standard_normal((3, 15))
    base = rigid_align(a, b)[2]
    Q1 = ortho_group.rvs(3, random_state=5)
    Q2 = ortho_group.rvs(3, random_state=6)
    moved = rigid_align(Q1 @ a + 2.0, Q2 @ b - 1.0)[2]
    assert abs(base - moved) <= 1e-9


def test_degenerate_configuration():
    a = np.vstack([np.arange(5.0), np.zeros(5)])
    with pytest.raises(DegenerateConfig):
        rigid_align(a, a)
    with pytest.raises(DegenerateConfig):
        rigid_align(np.eye(2), np.eye(2))


def test_distortion_zero_for_self_and_translation(rng):
    t = rng.standard_normal((2, 40))
    assert embedding_distortion(t, t)[0].max_rel_error <= 1e-14
    rep, per_point = embedding_distortion(t + 3.0, t)
    assert rep.max_rel_error <= 1e-12
    assert per_point.shape == (40,)


def test_stress_examples(rng):
    z = rng.standard_normal((2, 20))
    D = pdist(z)
    assert stress(z, D) <= 1e-12
    assert stress(2 * z, D) > 0.5
    assert stress(z, GeodesicMatrix(D**2, "x")) <= 1e-12


def test_stress_double_loop_oracle(rng):
    z = rng.standard_normal((2, 30))
    D = pdist(rng.standard_normal((3, 30)))
    num = den = 0.0
    for i in range(30):
        for j in range(i + 1, 30):
            e = np.sqrt(np.sum((z[:, i] - z[:, j]) ** 2))
            num += (e - D[i, j]) ** 2
            den += D[i, j] ** 2
    assert stress(z, D) == pytest.approx(np.sqrt(num / den), rel=1e-12)
