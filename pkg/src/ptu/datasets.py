"""Seeded synthetic manifolds with ground truth.

Every generator is a pure function of its arguments. Coordinates of the
generated surfaces are exact (no noise) unless a noise model is requested,
and noise always moves points along the analytic surface normal.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.distance import cdist

from .core import PointSet, make_rng
from .errors import InvalidParam

# Swiss roll constants
ROLL_T = (1.5 * np.pi, 4.5 * np.pi)
ROLL_HEIGHT = 21.0
# S-shape: two unit-circle arcs, unit speed in t
S_T = (-1.5 * np.pi, 1.5 * np.pi)
S_HEIGHT = 4.0
S_HOLE = (-1.25, 1.25, 1.0, 3.0)
# solid torus radii
TORUS_R = 1.0
TORUS_r = 0.5


@dataclass(frozen=True)
class SyntheticDataset:
    """Generated points plus whatever ground truth the generator knows.

    ground_truth is d x n (intrinsic coordinates of a flat chart) or None.
    `truth_kind` says how reference distances are computed:
    "chart" (Euclidean in ground_truth), "sphere" (arc length on the unit
    sphere) or None. analytic_geodesic is True when those reference
    distances are exact geodesic distances on the sampled domain.
    """

    name: str
    points: PointSet
    ground_truth: np.ndarray | None = None
    truth_kind: str | None = None
    analytic_geodesic: bool = False
    meta: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.ground_truth is not None and self.ground_truth.shape[1] != self.points.n:
            raise InvalidParam("ground truth and points differ in size")

    def truth_distances(self, rows=None, cols=None) -> np.ndarray:
        """Reference (unsquared) distances between the selected points."""
        rows = slice(None) if rows is None else rows
        cols = slice(None) if cols is None else cols
        if self.truth_kind == "chart":
            G = self.ground_truth.T
            return cdist(G[rows], G[cols])
        if self.truth_kind == "sphere":
            P = self.meta["sphere_points"]
            return sphere_arc(P[rows], P[cols])
        raise InvalidParam(f"dataset {self.name!r} has no reference distances")


def sphere_arc(P: np.ndarray, Q: np.ndarray, chunk: int = 256) -> np.ndarray:
    """Great-circle distances between unit vectors (rows), arctan2 form.

    Cross and dot products are formed elementwise, so identical points give
    exactly 0 and the result is exactly symmetric when P is Q.
    """
    out = np.empty((len(P), len(Q)))
    for lo in range(0, len(P), chunk):
        A = P[lo:lo + chunk, None, :]
        cross = np.linalg.norm(np.cross(A, Q[None, :, :]), axis=-1)
        dot = (A * Q[None, :, :]).sum(axis=-1)
        out[lo:lo + chunk] = np.arctan2(cross, dot)
    return out


def random_orthogonal(D: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed D x D orthogonal matrix."""
    A = rng.standard_normal((D, D))
    Q, R = np.linalg.qr(A)
    return Q * np.sign(np.diag(R))


def _in_rect(coords: np.ndarray, rect) -> np.ndarray:
    """Mask of rows inside an axis-aligned box given as (lo0, hi0, lo1, hi1, ...)."""
    rect = np.asarray(rect, dtype=float).reshape(-1, 2)
    inside = np.ones(len(coords), dtype=bool)
    for a, (lo, hi) in enumerate(rect):
        inside &= (coords[:, a] >= lo) & (coords[:, a] <= hi)
    return inside


def _rejection(n: int, rng, draw, accept, batch: int | None = None) -> np.ndarray:
    out = []
    have = 0
    batch = batch or max(2 * n, 64)
    while have < n:
        c = draw(batch)
        c = c[accept(c)]
        out.append(c)
        have += len(c)
        if len(out) > 1000:
            raise InvalidParam("acceptance region is (nearly) empty")
    return np.concatenate(out)[:n]


def gen_flat_patch(n: int, D: int = 3, d: int = 2, seed: int = 0, hole=None) -> SyntheticDataset:
    """Uniform samples of [0,1]^d (minus an optional box), placed in R^D isometrically."""
    if not 1 <= d < D:
        raise InvalidParam(f"need 1 <= d < D, got d={d}, D={D}")
    if n < 1:
        raise InvalidParam("n must be positive")
    rng = make_rng(seed)
    accept = (lambda c: ~_in_rect(c, hole)) if hole is not None else (lambda c: np.ones(len(c), bool))
    U = _rejection(n, rng, lambda m: rng.random((m, d)), accept)
    Q = random_orthogonal(D, rng)[:, :d]
    shift = rng.standard_normal(D)
    X = U @ Q.T + shift
    return SyntheticDataset(
        "flat", PointSet(X.T), U.T.copy(), "chart", hole is None,
        {"hole": hole, "basis": Q, "shift": shift},
    )


def _roll_arclength(t):
    return 0.5 * (t * np.sqrt(1 + t * t) + np.arcsinh(t))


def _roll_curve(t):
    return np.column_stack([t * np.cos(t), t * np.sin(t)])


def _roll_normal(t):
    dx = np.cos(t) - t * np.sin(t)
    dz = np.sin(t) + t * np.cos(t)
    norm = np.hypot(dx, dz)
    return np.column_stack([dz / norm, -dx / norm])


def _roll_scale() -> float:
    t = np.linspace(*ROLL_T, 20001)
    c = _roll_curve(t)
    return float(max(np.ptp(c[:, 0]), np.ptp(c[:, 1]), ROLL_HEIGHT))


def _invert_arclength(s, t0, t1):
    grid = np.linspace(t0, t1, 4097)
    t = np.interp(s, _roll_arclength(grid), grid)
    for _ in range(4):
        t -= (_roll_arclength(t) - s) / np.sqrt(1 + t * t)
    return t


def gen_swiss_roll(n: int, seed: int = 0, noise=None) -> SyntheticDataset:
    """Swiss roll (t cos t, h, t sin t), uniform in area, scaled to unit extent.

    noise: None, ("gaussian", sigma) or ("sparse", fraction, amplitude, sigma_rest),
    all lengths as fractions of the largest bounding-box side. Sparse noise
    displaces the chosen fraction uniformly in [-amplitude, amplitude].
    """
    rng = make_rng(seed)
    t0, t1 = ROLL_T
    s0, s1 = _roll_arclength(t0), _roll_arclength(t1)
    s = s0 + (s1 - s0) * rng.random(n)
    t = _invert_arclength(s, t0, t1)
    h = ROLL_HEIGHT * rng.random(n)
    scale = _roll_scale()
    c = _roll_curve(t)
    clean = np.column_stack([c[:, 0], h, c[:, 1]]) / scale
    nrm = _roll_normal(t)
    normal = np.column_stack([nrm[:, 0], np.zeros(n), nrm[:, 1]])
    offset = _normal_offsets(n, rng, noise)
    X = clean + offset[:, None] * normal
    truth = np.vstack([(s - s0) / scale, h / scale])
    return SyntheticDataset(
        "swissroll", PointSet(X.T), truth, "chart", True,
        {"t": t, "height": h, "scale": scale, "normal_offsets": offset,
         "normals": normal, "noise": noise},
    )


def _normal_offsets(n, rng, noise) -> np.ndarray:
    if noise is None or noise == "none":
        return np.zeros(n)
    kind = noise[0]
    if kind == "gaussian":
        return noise[1] * rng.standard_normal(n)
    if kind == "sparse":
        fraction, amplitude, rest = noise[1:]
        off = rest * rng.standard_normal(n)
        hit = rng.random(n) < fraction
        off[hit] = rng.uniform(-amplitude, amplitude, hit.sum())
        return off
    raise InvalidParam(f"unknown noise model {noise!r}")


def _s_curve(t, h):
    return np.column_stack([np.sin(t), h, np.sign(t) * (np.cos(t) - 1)])


def gen_s_shape(n: int, seed: int = 0, hole=None, density_warp: float | None = None) -> SyntheticDataset:
    """S-shaped strip made of two unit-circle arcs; t is arc length.

    hole is an intrinsic box (t_lo, t_hi, h_lo, h_hi); pass "default" for a
    central void. density_warp=g samples arc length as u**g (g=1 is uniform).
    """
    if hole == "default":
        hole = S_HOLE
    rng = make_rng(seed)
    t0, t1 = S_T
    gamma = 1.0 if density_warp is None else float(density_warp)
    if gamma <= 0:
        raise InvalidParam("density_warp must be positive")

    def draw(m):
        u = rng.random((m, 2))
        return np.column_stack([t0 + (t1 - t0) * u[:, 0] ** gamma, S_HEIGHT * u[:, 1]])

    accept = (lambda c: ~_in_rect(c, hole)) if hole is not None else (lambda c: np.ones(len(c), bool))
    P = _rejection(n, rng, draw, accept)
    X = _s_curve(P[:, 0], P[:, 1])
    return SyntheticDataset(
        "sshape", PointSet(X.T), P.T.copy(), "chart", hole is None,
        {"hole": hole, "density_warp": gamma},
    )


def petal_radius(theta, cap_radius, petal_count, sharpness=1.0):
    return cap_radius * np.abs(np.cos(0.5 * petal_count * theta)) ** sharpness


def gen_petals(n: int, seed: int = 0, petal_count: int = 4, noise: float = 0.0,
               cap_radius: float = 2.2, sharpness: float = 1.25) -> SyntheticDataset:
    """Rose-shaped region of the unit sphere around the north pole.

    In geodesic polar coordinates (phi from the pole, azimuth theta) the
    region is phi <= cap_radius * |cos(petal_count/2 * theta)|**sharpness. Samples are
    uniform in area. noise is a Gaussian radial displacement with standard
    deviation given as a fraction of the sphere radius. ground_truth holds
    the azimuthal-equidistant chart (phi cos theta, phi sin theta).
    """
    if petal_count < 1:
        raise InvalidParam("petal_count must be positive")
    rng = make_rng(seed)
    cmin = np.cos(cap_radius)

    def draw(m):
        u = rng.random((m, 2))
        return np.column_stack([np.arccos(1 - (1 - cmin) * u[:, 0]), 2 * np.pi * u[:, 1]])

    P = _rejection(n, rng, draw, lambda c: c[:, 0] <= petal_radius(c[:, 1], cap_radius, petal_count, sharpness))
    phi, theta = P[:, 0], P[:, 1]
    S = np.column_stack([np.sin(phi) * np.cos(theta), np.sin(phi) * np.sin(theta), np.cos(phi)])
    offset = noise * rng.standard_normal(n) if noise else np.zeros(n)
    X = S * (1 + offset)[:, None]
    chart = np.vstack([phi * np.cos(theta), phi * np.sin(theta)])
    petal = np.floor((theta * petal_count / (2 * np.pi)) + 0.5).astype(int) % petal_count
    return SyntheticDataset(
        "petals", PointSet(X.T), chart, "sphere", noise == 0,
        {"sphere_points": S, "phi": phi, "theta": theta, "petal": petal,
         "normal_offsets": offset, "cap_radius": cap_radius, "petal_count": petal_count,
         "sharpness": sharpness,
         "boundary": "phi <= cap_radius*|cos(petal_count/2*theta)|**sharpness "
                     "in geodesic polar coordinates"},
    )


def gen_spherical_cap(grid_m: int, cap_angle: float = np.pi / 3) -> SyntheticDataset:
    """grid_m points of a Fibonacci spiral covering the cap phi <= cap_angle evenly."""
    if grid_m < 2:
        raise InvalidParam("need at least two points")
    if not 0 < cap_angle <= np.pi:
        raise InvalidParam("cap_angle must be in (0, pi]")
    i = np.arange(grid_m)
    z = 1 - (1 - np.cos(cap_angle)) * (i + 0.5) / grid_m
    golden = np.pi * (3 - np.sqrt(5))
    theta = golden * i
    r = np.sqrt(np.maximum(1 - z * z, 0))
    S = np.column_stack([r * np.cos(theta), r * np.sin(theta), z])
    phi = np.arccos(z)
    chart = np.vstack([phi * np.cos(theta), phi * np.sin(theta)])
    return SyntheticDataset(
        "cap", PointSet(S.T), chart, "sphere", True,
        {"sphere_points": S, "cap_angle": cap_angle},
    )


def in_solid_torus(P: np.ndarray, R: float = TORUS_R, r: float = TORUS_r) -> np.ndarray:
    rho = np.hypot(P[:, 0], P[:, 1])
    return (rho - R) ** 2 + P[:, 2] ** 2 <= r * r


def gen_torus4d(n: int, seed: int = 0, curved: bool = False) -> SyntheticDataset:
    """Solid torus in R^3 lifted to R^4 by a constant or (x^2+y^2)/2 coordinate."""
    rng = make_rng(seed)
    lim = np.array([TORUS_R + TORUS_r, TORUS_R + TORUS_r, TORUS_r])
    P = _rejection(n, rng, lambda m: rng.uniform(-lim, lim, (m, 3)), in_solid_torus)
    w = 0.5 * (P[:, 0] ** 2 + P[:, 1] ** 2) if curved else np.ones(n)
    X = np.column_stack([P, w])
    return SyntheticDataset(
        "torus", PointSet(X.T), P.T.copy(), "chart", False,
        {"curved": curved, "R": TORUS_R, "r": TORUS_r},
    )


DEFAULT_BUMPS = ((0.3, 0.5, 0.25, 0.12), (0.7, 0.5, 0.25, 0.12))


def landscape_height(xy: np.ndarray, bumps=DEFAULT_BUMPS) -> np.ndarray:
    z = np.zeros(len(xy))
    for cx, cy, amp, width in bumps:
        z += amp * np.exp(-((xy[:, 0] - cx) ** 2 + (xy[:, 1] - cy) ** 2) / (2 * width**2))
    return z


def gen_gaussian_landscape(n: int, seed: int = 0, bumps=DEFAULT_BUMPS) -> SyntheticDataset:
    """Height field over the unit square with Gaussian bumps (cx, cy, amplitude, width)."""
    rng = make_rng(seed)
    xy = rng.random((n, 2))
    X = np.column_stack([xy, landscape_height(xy, bumps)])
    return SyntheticDataset("landscape", PointSet(X.T), None, None, False, {"bumps": bumps})


def apply_random_isometry(ds: SyntheticDataset, target_D: int, seed: int | None = 0) -> SyntheticDataset:
    """Zero-pad to target_D and rotate by a seeded orthogonal map.

    seed=None skips the rotation (padding only).
    """
    D = ds.points.D
    if target_D < D:
        raise InvalidParam(f"target_D={target_D} is below the current dimension {D}")
    X = np.zeros((ds.points.n, target_D))
    X[:, :D] = ds.points.rows
    if seed is not None:
        X = X @ random_orthogonal(target_D, make_rng(seed)).T
    meta = dict(ds.meta, lifted_to=target_D, lift_seed=seed)
    return SyntheticDataset(ds.name, PointSet(X.T), ds.ground_truth, ds.truth_kind,
                            ds.analytic_geodesic, meta)


GENERATORS = {
    "flat": gen_flat_patch,
    "swissroll": gen_swiss_roll,
    "sshape": gen_s_shape,
    "petals": gen_petals,
    "cap": gen_spherical_cap,
    "torus": gen_torus4d,
    "landscape": gen_gaussian_landscape,
}
