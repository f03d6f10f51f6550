"""Synthetic union-of-subspaces data with ground-truth labels."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ValidationError


def _as_list(value, n, name):
    if np.isscalar(value):
        return [int(value)] * n
    out = [int(v) for v in value]
    if len(out) != n:
        raise ValidationError(f"{name} has {len(out)} entries, expected {n}")
    return out


@dataclass(frozen=True)
class SubspaceSpec:
    """Parameters of a random union of subspaces.

    ``sub_dims`` and ``points_per`` take either one value for every subspace
    or a list with one value per subspace.
    """

    n: int
    ambient_dim: int
    sub_dims: tuple
    points_per: tuple
    noise_sigma: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.n < 1:
            raise ValidationError("need at least one subspace")
        if self.ambient_dim < 1:
            raise ValidationError("ambient dimension must be >= 1")
        dims = tuple(_as_list(self.sub_dims, self.n, "sub_dims"))
        pts = tuple(_as_list(self.points_per, self.n, "points_per"))
        for d in dims:
            if not 1 <= d <= self.ambient_dim:
                raise ValidationError(
                    f"subspace dimension {d} must be in [1, {self.ambient_dim}]")
        if any(p < 1 for p in pts):
            raise ValidationError("every subspace needs at least one point")
        if self.noise_sigma < 0:
            raise ValidationError("noise_sigma must be non-negative")
        object.__setattr__(self, "sub_dims", dims)
        object.__setattr__(self, "points_per", pts)

    @property
    def total(self):
        return sum(self.points_per)


@dataclass
class DataMatrix:
    """Points stored column-wise: ``X`` has shape (D, N)."""

    X: np.ndarray
    labels: np.ndarray | None = None
    bases: list = field(default_factory=list, repr=False)

    def __post_init__(self):
        self.X = np.asarray(self.X, dtype=np.float64)
        if self.X.ndim != 2:
            raise ValidationError("data must be a 2-D array (D x N)")
        if self.labels is not None:
            self.labels = np.asarray(self.labels, dtype=np.int64)
            if self.labels.shape != (self.X.shape[1],):
                raise ValidationError(
                    f"{self.labels.size} labels for {self.X.shape[1]} points")
            if self.labels.size and self.labels.min() < 0:
                raise ValidationError("labels must be non-negative")

    @property
    def dim(self):
        return self.X.shape[0]

    @property
    def count(self):
        return self.X.shape[1]

    @property
    def n_clusters(self):
        if self.labels is None or self.labels.size == 0:
            return None
        return int(self.labels.max()) + 1

    def normalized(self):
        return DataMatrix(normalize_columns(self.X), self.labels, self.bases)


def normalize_columns(X):
    """Scale every nonzero column to unit l2 norm; zero columns stay zero."""
    X = np.asarray(X, dtype=np.float64)
    norms = np.linalg.norm(X, axis=0)
    safe = np.where(norms > 0, norms, 1.0)
    return X / safe


def generate(spec):
    """Sample points from ``spec.n`` random subspaces.

    Each subspace gets an orthonormal basis from the QR factor of a standard
    Gaussian D x d_i matrix. Points are ``U_i a`` with ``a ~ N(0, I)``, plus
    isotropic noise of std ``noise_sigma``, then scaled to unit norm. Labels
    are contiguous by subspace. Every subspace draws from its own substream
    of ``spec.seed``.
    """
    streams = np.random.SeedSequence(int(spec.seed)).spawn(spec.n)
    D = spec.ambient_dim
    blocks, labels, bases = [], [], []
    for i, (d, m, ss) in enumerate(zip(spec.sub_dims, spec.points_per, streams)):
        rng = np.random.Generator(np.random.PCG64(ss))
        U, _ = np.linalg.qr(rng.standard_normal((D, d)))
        pts = U @ rng.standard_normal((d, m))
        if spec.noise_sigma > 0:
            pts = pts + spec.noise_sigma * rng.standard_normal((D, m))
        blocks.append(pts)
        labels.append(np.full(m, i, dtype=np.int64))
        bases.append(U)
    X = normalize_columns(np.concatenate(blocks, axis=1))
    return DataMatrix(X, np.concatenate(labels), bases)
