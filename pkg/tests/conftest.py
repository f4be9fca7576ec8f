import numpy as np
import pytest

from ptu.core import PointSet
from ptu.graph import ProximityGraph


def random_graph(n: int, p: float, rng, integer_weights: bool = False) -> ProximityGraph:
    """Erdos-Renyi graph with positive weights; small integer weights create ties."""
    iu, ju = np.triu_indices(n, 1)
    keep = rng.random(len(iu)) < p
    edges = np.column_stack([iu[keep], ju[keep]])
    if integer_weights:
        w = rng.integers(1, 4, size=len(edges)).astype(float)
    else:
        w = rng.uniform(0.1, 2.0, size=len(edges))
    return ProximityGraph.from_edges(n, edges, w)


def planar_points(n: int, D: int, rng, d: int = 2) -> tuple[PointSet, np.ndarray]:
    """n points on a random d-flat in R^D; returns (points, intrinsic d x n coordinates)."""
    uv = rng.uniform(-1, 1, size=(d, n))
    Q, _ = np.linalg.qr(rng.standard_normal((D, d)))
    X = Q @ uv + rng.standard_normal((D, 1))
    return PointSet(X), uv


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


#: criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict = {}


@pytest.fixture
def record():
    def _record(criterion: int, passed: bool, detail: str) -> bool:
        prev = ACCEPTANCE.get(criterion)
        if prev is not None:
            passed = passed and prev[0]
            detail = f"{prev[1]}; {detail}"
        ACCEPTANCE[criterion] = (bool(passed), detail)
        return bool(passed)
    return _record


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for c in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[c]
        terminalreporter.write_line(f"criterion {c}: {'PASS' if ok else 'FAIL'}  {detail}")
