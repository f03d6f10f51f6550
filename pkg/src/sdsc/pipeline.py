"""End-to-end pipeline from sparse IMC affinities to spectral labels."""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field

from .densify import TransformKind, json_float, dense_stage, ncut_gain
from .errors import ValidationError
from .imc import affinity_max, affinity_sum, imc_coefficients
from .metrics import evaluate
from .numkernel import derive_rng
from .pce import Thresholds, pce_densify
from .spectral import spectral_clustering

DENSE_CHOICES = ("none", "pce", "d1", "d2", "d3")
SYMMETRIZATIONS = ("max", "sum")


@dataclass
class PipelineConfig:
    clusters: int
    gamma: int = 6
    method: str = "imc"
    dense: str = "none"
    theta1: float = 0.8
    theta2: float = 0.6
    theta3: float = 0.3
    seed: int = 0
    affinity_symmetrization: str = "max"
    sparsity_preserving: bool = False
    full_apsp: bool = False
    max_dense_n: int = 10_000
    threads: int = 1
    kmeans_restarts: int = 20
    kmeans_max_iters: int = 300

    def __post_init__(self):
        if self.method != "imc":
            raise ValidationError(f"unknown sparse method {self.method!r}")
        if self.dense not in DENSE_CHOICES:
            raise ValidationError(f"dense must be one of {DENSE_CHOICES}, got {self.dense!r}")
        if self.affinity_symmetrization not in SYMMETRIZATIONS:
            raise ValidationError(f"symmetrization must be 'max' or 'sum'")
        if self.affinity_symmetrization == "sum" and self.dense != "none":
            # |C| + |C^T| can exceed 1, outside the domain of every dense stage
            raise ValidationError("sum symmetrization cannot be combined with a dense stage")
        if self.gamma < 1:
            raise ValidationError("gamma must be >= 1")
        if self.clusters < 1:
            raise ValidationError("clusters must be >= 1")
        if self.threads < 1:
            raise ValidationError("threads must be >= 1")
        if self.seed < 0:
            raise ValidationError("seed must be non-negative")
        self.thresholds  # validates ordering

    @property
    def thresholds(self):
        return Thresholds(self.theta1, self.theta2, self.theta3)


@dataclass
class RunReport:
    config: dict
    n_points: int
    timings: dict = field(default_factory=dict)
    nnz_before: int = 0
    nnz_after: int = 0
    short_columns: int = 0
    evaluation: dict | None = None
    ncut: dict | None = None

    def to_dict(self):
        return asdict(self)


@dataclass
class PipelineResult:
    labels: object
    affinity: object
    dense_affinity: object
    coefficients: object
    report: RunReport


def densify(W, config):
    """Apply ``config.dense`` to the affinity ``W``."""
    if config.dense == "none":
        return W
    if config.dense == "pce":
        return pce_densify(W, config.thresholds, sparsity_preserving=config.sparsity_preserving)
    return dense_stage(W, TransformKind.parse(config.dense),
                       sparsity_preserving=config.sparsity_preserving,
                       full_apsp=config.full_apsp)


def run_pipeline(data, config, truth=None):
    """Run every stage on ``data`` (a normalized DataMatrix).

    ``truth`` (labels) adds an evaluation block and, when a dense stage is
    used, the Ncut of both affinities under the true partition.
    """
    N = data.count
    if N > config.max_dense_n:
        raise ValidationError(
            f"N={N} exceeds max_dense_n={config.max_dense_n}; the spectral stage is O(N^3)")
    if config.clusters > N:
        raise ValidationError(f"clusters={config.clusters} exceeds N={N}")
    timings = {}
    t_start = time.perf_counter()

    t0 = time.perf_counter()
    C = imc_coefficients(data, config.gamma, n_jobs=config.threads)
    timings["sparse"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    W = affinity_max(C) if config.affinity_symmetrization == "max" else affinity_sum(C)
    timings["affinity"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    W_star = densify(W, config)
    timings["dense"] = time.perf_counter() - t0

    t0 = time.perf_counter()
    labels = spectral_clustering(W_star, config.clusters, derive_rng(config.seed, "spectral"),
                                 restarts=config.kmeans_restarts,
                                 max_iters=config.kmeans_max_iters)
    timings["spectral"] = time.perf_counter() - t0

    report = RunReport(
        config=asdict(config),
        n_points=N,
        timings=timings,
        nnz_before=W.nnz,
        nnz_after=W_star.nnz,
        short_columns=C.short_columns,
    )
    if truth is not None:
        t0 = time.perf_counter()
        report.evaluation = evaluate(labels, truth, W_star).to_dict()
        if config.dense != "none":
            gain = ncut_gain(W, W_star, truth)
            report.ncut = {
                "before": gain.before.to_dict(),
                "after": gain.after.to_dict(),
                "ratio": None if gain.zero_denominator else json_float(gain.ratio),
                "zero_denominator": gain.zero_denominator,
            }
        timings["evaluation"] = time.perf_counter() - t0
    timings["total"] = time.perf_counter() - t_start
    return PipelineResult(labels, W, W_star, C, report)
