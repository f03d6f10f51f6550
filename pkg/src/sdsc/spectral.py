"""Normalized-cut spectral clustering (symmetric Laplacian, row-normalized embedding)."""

from __future__ import annotations

import numpy as np
import scipy.sparse as sp

from .errors import ValidationError
from .numkernel import ClusterAssignment, SymmetricSparseMatrix, kmeans, make_rng, symmetric_eigen

DEGREE_FLOOR = 1e-10


def _dense_affinity(W):
    if isinstance(W, SymmetricSparseMatrix):
        return W.to_csr().toarray()
    if sp.issparse(W):
        return W.toarray().astype(np.float64)
    return np.asarray(W, dtype=np.float64)


def normalized_laplacian(W, eps=DEGREE_FLOOR):
    """Dense ``I - D^{-1/2} W D^{-1/2}`` with degrees floored at ``eps``."""
    A = _dense_affinity(W)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValidationError("affinity must be square")
    deg = np.maximum(A.sum(axis=1), eps)
    s = 1.0 / np.sqrt(deg)
    L = -(s[:, None] * A * s[None, :])
    L[np.diag_indices_from(L)] += 1.0
    return 0.5 * (L + L.T)


def spectral_embedding(W, n, eps=DEGREE_FLOOR):
    """Row-normalized eigenvectors of the ``n`` smallest Laplacian eigenvalues."""
    L = normalized_laplacian(W, eps)
    _, V = symmetric_eigen(L, n)
    norms = np.linalg.norm(V, axis=1)
    return V / np.where(norms > 0, norms, 1.0)[:, None]


def spectral_clustering(W, n, rng=0, restarts=20, max_iters=300, eps=DEGREE_FLOOR):
    """Partition the graph ``W`` into ``n`` clusters.

    Parameters
    ----------
    W : SymmetricSparseMatrix, scipy sparse or array
        Affinity matrix.
    n : int
        Number of clusters, ``1 <= n <= N``.
    rng : numpy Generator or int seed
        Drives k-means seeding.

    Returns
    -------
    ClusterAssignment
    """
    N = W.shape[0]
    n = int(n)
    if not 1 <= n <= N:
        raise ValidationError(f"number of clusters {n} must be in [1, {N}]")
    emb = spectral_embedding(W, n, eps)
    res = kmeans(emb, n, make_rng(rng), restarts=restarts, max_iters=max_iters)
    return ClusterAssignment(res.labels, n)
