"""Sparse-dense subspace clustering.

Three stages: a sparse affinity from Iterative Maximum Correlation (IMC),
an optional densification of that affinity (piecewise correlation
estimation or one-hop distance relaxation), and normalized-cut spectral
clustering.
"""

from .errors import InvariantError, ParseError, ValidationError
from .numkernel import ClusterAssignment, SymmetricSparseMatrix, make_rng
from .datagen import DataMatrix, SubspaceSpec, generate
from .imc import CoefficientMatrix, affinity_max, affinity_sum, imc_coefficients, pearson
from .pce import Thresholds, pce_densify
from .densify import TransformKind, dense_stage, ncut_gain, ncut_report, relax
from .spectral import normalized_laplacian, spectral_clustering
from .metrics import accuracy, bestmap, connectivity, evaluate, nmi
from .pipeline import PipelineConfig, PipelineResult, run_pipeline

__version__ = "0.1.0"

__all__ = [
    "ClusterAssignment",
    "CoefficientMatrix",
    "DataMatrix",
    "InvariantError",
    "ParseError",
    "PipelineConfig",
    "PipelineResult",
    "SubspaceSpec",
    "SymmetricSparseMatrix",
    "Thresholds",
    "TransformKind",
    "ValidationError",
    "accuracy",
    "affinity_max",
    "affinity_sum",
    "bestmap",
    "connectivity",
    "dense_stage",
    "evaluate",
    "generate",
    "imc_coefficients",
    "make_rng",
    "ncut_gain",
    "ncut_report",
    "nmi",
    "normalized_laplacian",
    "pce_densify",
    "pearson",
    "relax",
    "run_pipeline",
    "spectral_clustering",
]
