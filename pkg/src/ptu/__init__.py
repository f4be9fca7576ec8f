"""Parallel transport unfolding and Isomap for manifold learning."""

from .core import PointSet, make_rng, read_matrix_csv, write_matrix_csv
from .pipeline import PipelineConfig, PipelineResult, lptu_pipeline, run_pipeline

__all__ = [
    "PointSet",
    "PipelineConfig",
    "PipelineResult",
    "lptu_pipeline",
    "make_rng",
    "read_matrix_csv",
    "run_pipeline",
    "write_matrix_csv",
]

__version__ = "0.1.0"
