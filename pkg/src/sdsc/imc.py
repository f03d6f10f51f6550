"""Iterative Maximum Correlation: sparse self-expressive coefficients.

For every point the residual starts as the point itself. Each iteration
picks the not-yet-selected point whose Pearson correlation with the residual
has the largest magnitude, stores that magnitude as the coefficient, and
removes the residual's projection onto the picked (unit-norm) point.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from .datagen import DataMatrix
from .errors import ValidationError
from .numkernel import SymmetricSparseMatrix

# A centred vector with norm below VAR_EPS * ||v|| has no usable variance.
VAR_EPS = 1e-12
# A residual this small means the point is already represented; stop early.
RESIDUAL_EPS = 1e-12
# Scores per work block (rows x candidates); bounds temporary memory.
_BLOCK_ELEMS = 1 << 22


def pearson(x, y):
    """Pearson correlation of two equal-length vectors.

    Returns ``nan`` when either vector has (numerically) zero variance.
    """
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.size != y.size:
        raise ValidationError(f"length mismatch: {x.size} vs {y.size}")
    if x.size < 2:
        raise ValidationError("correlation needs at least two entries")
    if not (np.all(np.isfinite(x)) and np.all(np.isfinite(y))):
        raise ValidationError("vectors must be finite")
    xc = x - x.mean()
    yc = y - y.mean()
    nx, ny = math.sqrt(xc @ xc), math.sqrt(yc @ yc)
    if nx <= VAR_EPS * np.linalg.norm(x) or ny <= VAR_EPS * np.linalg.norm(y) or nx == 0 or ny == 0:
        return math.nan
    r = float(xc @ yc) / (nx * ny)
    return min(1.0, max(-1.0, r))


@dataclass
class CoefficientMatrix:
    """Sparse coefficients, stored per point (= per column of C).

    ``indices[i, g]`` is the point selected at iteration ``g`` for point
    ``i`` (``-1`` once the column ran out), ``values[i, g]`` the stored
    absolute correlation. As a matrix, ``C[indices[i, g], i] = values[i, g]``.
    """

    indices: np.ndarray
    values: np.ndarray
    short_columns: int = 0

    @property
    def n(self):
        return self.indices.shape[0]

    @property
    def budget(self):
        return self.indices.shape[1]

    def column(self, i):
        """Selected indices and values for point ``i``, in selection order."""
        sel = self.indices[i] >= 0
        return self.indices[i, sel], self.values[i, sel]

    def to_scipy(self):
        """Column-compressed N x N matrix with ``C[j, i] = c`` for point i."""
        cols = np.repeat(np.arange(self.n), self.budget)
        rows = self.indices.ravel()
        vals = self.values.ravel()
        keep = (rows >= 0) & (vals != 0)
        return sp.csc_matrix((vals[keep], (rows[keep], cols[keep])), shape=(self.n, self.n))

    def to_dense(self):
        return self.to_scipy().toarray()

    @classmethod
    def from_dense(cls, C):
        """Wrap a dense coefficient matrix (column i holds point i's entries)."""
        C = np.asarray(C, dtype=np.float64)
        if C.ndim != 2 or C.shape[0] != C.shape[1]:
            raise ValidationError("coefficient matrix must be square")
        if np.any(np.diag(C) != 0):
            raise ValidationError("coefficient matrix must have a zero diagonal")
        n = C.shape[0]
        per_col = [np.flatnonzero(C[:, i]) for i in range(n)]
        width = max([len(p) for p in per_col] + [1])
        idx = np.full((n, width), -1, dtype=np.int64)
        vals = np.zeros((n, width))
        for i, p in enumerate(per_col):
            idx[i, :len(p)] = p
            vals[i, :len(p)] = C[p, i]
        return cls(idx, vals)


def _data_array(X):
    if isinstance(X, DataMatrix):
        return X.X
    return np.asarray(X, dtype=np.float64)


def _standardize(X):
    """Centre every column and scale to unit norm; flag zero-variance columns."""
    Xc = X - X.mean(axis=0)
    nc = np.linalg.norm(Xc, axis=0)
    valid = (nc > VAR_EPS * np.linalg.norm(X, axis=0)) & (nc > 0)
    Z = Xc / np.where(valid, nc, 1.0)
    Z[:, ~valid] = 0.0
    return Z, valid


def _imc_block(X, Z, valid, start, stop, gamma, out_idx, out_val):
    N = X.shape[1]
    B = stop - start
    rows = np.arange(B)
    psi = X[:, start:stop].copy()
    excluded = np.zeros((B, N), dtype=bool)
    excluded[:, ~valid] = True
    excluded[rows, start + rows] = True
    active = np.ones(B, dtype=bool)
    for g in range(gamma):
        pc = psi - psi.mean(axis=0)
        pn = np.linalg.norm(pc, axis=0)
        active &= (np.linalg.norm(psi, axis=0) > RESIDUAL_EPS)
        active &= (pn > VAR_EPS * np.linalg.norm(psi, axis=0)) & (pn > 0)
        if not active.any():
            break
        score = np.abs((pc / np.where(pn > 0, pn, 1.0)).T @ Z)
        score[excluded] = -1.0
        j = np.argmax(score, axis=1)  # first maximum: lowest index wins ties
        best = score[rows, j]
        active &= best >= 0.0
        r = rows[active]
        out_idx[start + r, g] = j[r]
        out_val[start + r, g] = np.minimum(best[r], 1.0)
        excluded[r, j[r]] = True
        xj = X[:, j[r]]
        proj = np.einsum("db,db->b", psi[:, r], xj)
        psi[:, r] -= proj * xj


def imc_coefficients(X, gamma, n_jobs=1, block_size=None):
    """Sparse self-expressive coefficients by Iterative Maximum Correlation.

    Parameters
    ----------
    X : DataMatrix or (D, N) array
        Column-per-point data with unit-norm (or zero) columns.
    gamma : int
        Selections per point, ``1 <= gamma < N``.
    n_jobs : int
        Worker threads. Points are independent, so the result does not
        depend on this.
    block_size : int, optional
        Points processed together in one matrix product.

    Returns
    -------
    CoefficientMatrix
    """
    X = _data_array(X)
    if X.ndim != 2:
        raise ValidationError("data must be a (D, N) array")
    D, N = X.shape
    gamma = int(gamma)
    if N < 2:
        raise ValidationError("need at least two points")
    if gamma < 1:
        raise ValidationError("gamma must be >= 1")
    if gamma >= N:
        raise ValidationError(f"gamma={gamma} must be smaller than N={N}")
    if not np.all(np.isfinite(X)):
        raise ValidationError("data contains non-finite values")
    norms = np.linalg.norm(X, axis=0)
    if np.any((np.abs(norms - 1.0) > 1e-9) & (norms != 0)):
        raise ValidationError("data columns must be unit-normalized")

    Z, valid = _standardize(X)
    out_idx = np.full((N, gamma), -1, dtype=np.int64)
    out_val = np.zeros((N, gamma))
    if block_size is None:
        block_size = max(1, min(N, _BLOCK_ELEMS // N))
    starts = range(0, N, block_size)
    work = [(s, min(s + block_size, N)) for s in starts]
    if n_jobs > 1 and len(work) > 1:
        with ThreadPoolExecutor(max_workers=n_jobs) as pool:
            list(pool.map(lambda se: _imc_block(X, Z, valid, *se, gamma, out_idx, out_val), work))
    else:
        for s, e in work:
            _imc_block(X, Z, valid, s, e, gamma, out_idx, out_val)
    short = int(np.count_nonzero(out_idx[:, -1] < 0))
    return CoefficientMatrix(out_idx, out_val, short)


def _abs_sparse(C):
    if isinstance(C, CoefficientMatrix):
        return abs(C.to_scipy()).tocsr()
    if sp.issparse(C):
        return abs(sp.csr_matrix(C))
    C = np.asarray(C, dtype=np.float64)
    if C.ndim != 2 or C.shape[0] != C.shape[1]:
        raise ValidationError("coefficient matrix must be square")
    return sp.csr_matrix(np.abs(C))


def affinity_max(C):
    """Symmetric affinity ``w_ij = max(|c_ij|, |c_ji|)``."""
    A = _abs_sparse(C)
    W = A.maximum(A.T)
    W.setdiag(0)
    W.eliminate_zeros()
    return SymmetricSparseMatrix.from_scipy(W)


def affinity_sum(C):
    """Symmetric affinity ``w_ij = |c_ij| + |c_ji|``; entries may exceed 1."""
    A = _abs_sparse(C)
    W = (A + A.T).tocsr()
    W.setdiag(0)
    W.eliminate_zeros()
    return SymmetricSparseMatrix.from_scipy(W)
