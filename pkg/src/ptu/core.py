"""Point containers, CSV matrix I/O and seeded randomness."""

from __future__ import annotations

import os
from dataclasses import dataclass, field

import numpy as np

from .errors import InvalidParam, NonFiniteError, ParseError


def check_finite(a: np.ndarray, what: str = "matrix") -> None:
    """Raise NonFiniteError naming the first non-finite entry of `a`."""
    bad = ~np.isfinite(a)
    if bad.any():
        idx = tuple(int(i) for i in np.argwhere(bad)[0])
        raise NonFiniteError(f"{what} has non-finite entry {a[idx]!r} at {idx}")


@dataclass(frozen=True)
class PointSet:
    """n points in R^D, stored column-wise as a D x n array.

    CSV files hold one point per row; use :meth:`from_rows` / :attr:`rows`
    to move between the two layouts.
    """

    data: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        data = np.array(self.data, dtype=float)
        if data.ndim != 2 or data.shape[1] < 1:
            raise InvalidParam(f"point data must be a non-empty D x n array, got shape {data.shape}")
        check_finite(data, "point set")
        data.setflags(write=False)
        object.__setattr__(self, "data", data)

    @classmethod
    def from_rows(cls, rows, meta=None) -> "PointSet":
        return cls(np.asarray(rows, dtype=float).T, dict(meta or {}))

    @property
    def rows(self) -> np.ndarray:
        """n x D copy, one point per row (C-contiguous)."""
        return np.ascontiguousarray(self.data.T)

    @property
    def n(self) -> int:
        return self.data.shape[1]

    @property
    def D(self) -> int:
        return self.data.shape[0]

    def __len__(self):
        return self.n


def make_rng(seed: int | None) -> np.random.Generator:
    """Deterministic generator for a 64-bit seed (PCG64 stream)."""
    if seed is None:
        seed = 0
    seed = int(seed)
    if not 0 <= seed < 2**64:
        raise InvalidParam(f"seed must be a 64-bit unsigned integer, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def read_matrix_csv(path) -> np.ndarray:
    """Parse a header-less numeric CSV into a 2-D float array.

    Lines starting with ``#`` and blank lines are skipped. Parsing is
    locale-independent (``float()`` only accepts a dot decimal separator).
    """
    if not os.path.exists(path):
        raise FileNotFoundError(f"no such file: {path}")
    rows = []
    width = None
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            s = line.strip()
            if not s or s.startswith("#"):
                continue
            tokens = s.split(",")
            if width is None:
                width = len(tokens)
            elif len(tokens) != width:
                raise ParseError(f"expected {width} fields, found {len(tokens)}", lineno)
            try:
                values = [float(t) for t in tokens]
            except ValueError:
                bad = next(t for t in tokens if not _is_number(t))
                raise ParseError(f"non-numeric token {bad.strip()!r}", lineno) from None
            if not all(np.isfinite(values)):
                raise ParseError("non-finite value", lineno)
            rows.append(values)
    if not rows:
        raise ParseError(f"{path} contains no data rows")
    return np.array(rows, dtype=float)


def _is_number(token: str) -> bool:
    try:
        float(token)
    except ValueError:
        return False
    return True


def format_value(v: float) -> str:
    return "%.17g" % v


def write_matrix_csv(m, path) -> None:
    """Write a 2-D array with 17 significant digits (exact float round-trip)."""
    m = np.atleast_2d(np.asarray(m, dtype=float))
    if m.ndim != 2:
        raise InvalidParam(f"expected a 2-D matrix, got {m.ndim} dimensions")
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        for row in m:
            fh.write(",".join(format_value(v) for v in row))
            fh.write("\n")


def read_points_csv(path) -> PointSet:
    return PointSet.from_rows(read_matrix_csv(path), {"source": os.fspath(path)})


def write_points_csv(points: PointSet, path) -> None:
    write_matrix_csv(points.rows, path)
