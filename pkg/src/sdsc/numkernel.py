"""Numeric primitives shared by every stage.

* ``SymmetricSparseMatrix``: immutable symmetric storage, upper-triangle
  triplets plus a CSR adjacency index for O(degree) neighbour scans.
* ``symmetric_eigen``: dense symmetric eigensolver (LAPACK ``dsyev``:
  Householder tridiagonalization followed by implicit-shift QL/QR).
* ``kmeans``: Lloyd iterations with k-means++ seeding and restarts.
* ``make_rng`` / ``derive_rng``: PCG64 generators and per-stage substreams.
"""

from __future__ import annotations

import zlib
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
import scipy.sparse as sp

from .errors import ValidationError

# --------------------------------------------------------------------------
# random streams


def make_rng(seed):
    """PCG64 generator for ``seed`` (a non-negative integer).

    PCG64 output is specified bit-for-bit by numpy, so identical seeds give
    identical streams on every platform.
    """
    if isinstance(seed, np.random.Generator):
        return seed
    seed = int(seed)
    if seed < 0:
        raise ValidationError(f"seed must be non-negative, got {seed}")
    return np.random.Generator(np.random.PCG64(seed))


def derive_rng(seed, stage):
    """Independent substream of ``seed`` named by the string ``stage``."""
    key = zlib.crc32(stage.encode("utf-8"))
    ss = np.random.SeedSequence(int(seed), spawn_key=(key,))
    return np.random.Generator(np.random.PCG64(ss))


# --------------------------------------------------------------------------
# symmetric sparse storage


class SymmetricSparseMatrix:
    """Immutable symmetric N x N matrix storing each off-diagonal pair once.

    Entries absent from storage read as ``fill``: ``0.0`` for affinities,
    ``inf`` (or ``1.0`` for the linear transform) for simulated distances.
    The diagonal is always zero unless ``allow_diagonal`` is set.

    Parameters
    ----------
    n : int
        Matrix size.
    rows, cols, values : array-like
        Triplets. Order within a pair is irrelevant, ``(i, j)`` and ``(j, i)``
        name the same entry. Duplicate pairs raise.
    fill : float
        Value of unstored off-diagonal entries.
    allow_diagonal : bool
        Permit ``i == j`` triplets.
    """

    __slots__ = ("n", "fill", "allow_diagonal", "_rows", "_cols", "_vals", "_csr")

    def __init__(self, n, rows=(), cols=(), values=(), fill=0.0, allow_diagonal=False):
        n = int(n)
        if n < 0:
            raise ValidationError("matrix size must be non-negative")
        r = np.asarray(rows, dtype=np.int64).ravel()
        c = np.asarray(cols, dtype=np.int64).ravel()
        v = np.asarray(values, dtype=np.float64).ravel()
        if not (r.shape == c.shape == v.shape):
            raise ValidationError("triplet arrays must have equal length")
        if r.size and (r.min() < 0 or c.min() < 0 or r.max() >= n or c.max() >= n):
            raise ValidationError("triplet index out of range")
        if not allow_diagonal and np.any(r == c):
            raise ValidationError("diagonal entries are not permitted")
        if np.any(np.isnan(v)) or np.any(np.isneginf(v)):
            raise ValidationError("stored values must be finite or +inf")
        lo, hi = np.minimum(r, c), np.maximum(r, c)
        keep = v != fill
        lo, hi, v = lo[keep], hi[keep], v[keep]
        order = np.lexsort((hi, lo))
        lo, hi, v = lo[order], hi[order], v[order]
        if lo.size > 1:
            dup = (lo[1:] == lo[:-1]) & (hi[1:] == hi[:-1])
            if np.any(dup):
                k = int(np.flatnonzero(dup)[0])
                raise ValidationError(f"duplicate entry ({lo[k]}, {hi[k]})")

        self.n = n
        self.fill = float(fill)
        self.allow_diagonal = bool(allow_diagonal)
        for a in (lo, hi, v):
            a.flags.writeable = False
        self._rows, self._cols, self._vals = lo, hi, v

        off = lo != hi
        full_r = np.concatenate([lo, hi[off]])
        full_c = np.concatenate([hi, lo[off]])
        full_v = np.concatenate([v, v[off]])
        csr = sp.csr_matrix((full_v, (full_r, full_c)), shape=(n, n))
        csr.sort_indices()
        for a in (csr.data, csr.indices, csr.indptr):
            a.flags.writeable = False
        self._csr = csr

    # construction helpers

    @classmethod
    def from_dense(cls, a, fill=0.0, atol=1e-9, allow_diagonal=False):
        """Build from a dense array; entries equal to ``fill`` are dropped."""
        a = np.asarray(a, dtype=np.float64)
        if a.ndim != 2 or a.shape[0] != a.shape[1]:
            raise ValidationError(f"expected a square matrix, got shape {a.shape}")
        _check_symmetric(a, atol)
        if not allow_diagonal and np.any(np.diag(a) != 0):
            raise ValidationError("diagonal entries must be zero")
        k = 0 if allow_diagonal else 1
        r, c = np.triu_indices(a.shape[0], k=k)
        return cls(a.shape[0], r, c, a[r, c], fill=fill, allow_diagonal=allow_diagonal)

    @classmethod
    def from_scipy(cls, m, fill=0.0):
        """Build from a symmetric scipy sparse matrix (upper triangle is read)."""
        m = sp.triu(sp.coo_matrix(m), k=1).tocoo()
        m.sum_duplicates()
        return cls(m.shape[0], m.row, m.col, m.data, fill=fill)

    @classmethod
    def coerce(cls, a, fill=0.0):
        """Accept a ``SymmetricSparseMatrix``, scipy sparse matrix or array."""
        if isinstance(a, cls):
            return a
        if sp.issparse(a):
            return cls.from_scipy(a, fill=fill)
        return cls.from_dense(a, fill=fill)

    # queries

    @property
    def shape(self):
        return (self.n, self.n)

    @property
    def nnz(self):
        """Number of stored unordered pairs."""
        return int(self._vals.size)

    @property
    def indptr(self):
        return self._csr.indptr

    @property
    def indices(self):
        return self._csr.indices

    @property
    def data(self):
        return self._csr.data

    def triplets(self):
        """Upper-triangle ``(rows, cols, values)`` with ``rows <= cols``."""
        return self._rows, self._cols, self._vals

    def get(self, i, j):
        if not (0 <= i < self.n and 0 <= j < self.n):
            raise IndexError(f"({i}, {j}) out of range for size {self.n}")
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        idx = self._csr.indices[lo:hi]
        p = np.searchsorted(idx, j)
        if p < idx.size and idx[p] == j:
            return float(self._csr.data[lo + p])
        return 0.0 if i == j else self.fill

    def __getitem__(self, ij):
        i, j = ij
        return self.get(int(i), int(j))

    def neighbors(self, i):
        """Column indices and values of the stored entries in row ``i``."""
        lo, hi = self._csr.indptr[i], self._csr.indptr[i + 1]
        return self._csr.indices[lo:hi], self._csr.data[lo:hi]

    def degree_counts(self):
        """Stored entries per row."""
        return np.diff(self._csr.indptr)

    def to_dense(self):
        out = np.full((self.n, self.n), self.fill)
        np.fill_diagonal(out, 0.0)
        out[self._rows, self._cols] = self._vals
        out[self._cols, self._rows] = self._vals
        return out

    def to_csr(self):
        """Full symmetric scipy CSR of the stored entries (the fill is not represented)."""
        return self._csr.copy()

    def with_fill(self, fill):
        return SymmetricSparseMatrix(self.n, self._rows, self._cols, self._vals,
                                     fill=fill, allow_diagonal=self.allow_diagonal)

    def __repr__(self):
        return f"SymmetricSparseMatrix(n={self.n}, nnz={self.nnz}, fill={self.fill})"


def _check_symmetric(a, atol=1e-9):
    if not np.all(np.isfinite(a) | np.isposinf(a)):
        raise ValidationError("matrix has NaN or -inf entries")
    finite = np.isfinite(a)
    if not np.array_equal(finite, finite.T):
        raise ValidationError("matrix is not symmetric (infinite pattern differs)")
    scale = np.max(np.abs(a[finite]), initial=0.0)
    diff = np.where(finite, a, 0.0) - np.where(finite, a.T, 0.0)
    if np.max(np.abs(diff), initial=0.0) > atol * max(scale, 1.0):
        raise ValidationError("matrix is not symmetric within tolerance")


# --------------------------------------------------------------------------
# eigensolver


def symmetric_eigen(a, k=None):
    """The ``k`` algebraically smallest eigenpairs of a dense symmetric matrix.

    Returns ``(eigenvalues, eigenvectors)``, eigenvalues ascending and the
    eigenvectors as orthonormal columns of an N x k array.
    """
    a = np.asarray(a, dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValidationError(f"expected a square matrix, got shape {a.shape}")
    n = a.shape[0]
    k = n if k is None else int(k)
    if not 1 <= k <= n:
        raise ValidationError(f"k must be in [1, {n}], got {k}")
    if not np.all(np.isfinite(a)):
        raise ValidationError("matrix has non-finite entries")
    scale = np.max(np.abs(a))
    if np.max(np.abs(a - a.T)) > 1e-9 * scale:
        raise ValidationError("matrix is not symmetric within 1e-9 of its largest entry")
    # dsyev: tridiagonal reduction + implicit QL/QR, no tuning parameters.
    w, v = scipy.linalg.eigh(a, driver="ev", check_finite=False)
    return w[:k].copy(), np.ascontiguousarray(v[:, :k])


# --------------------------------------------------------------------------
# k-means


@dataclass(frozen=True)
class ClusterAssignment:
    """Per-point labels in ``[0, n_clusters)``."""

    labels: np.ndarray
    n_clusters: int

    def __post_init__(self):
        labels = np.asarray(self.labels)
        if labels.ndim != 1:
            raise ValidationError("labels must be one-dimensional")
        if labels.size and not np.issubdtype(labels.dtype, np.integer):
            if not np.all(labels == np.round(labels)):
                raise ValidationError("labels must be integers")
        labels = labels.astype(np.int64)
        if self.n_clusters < 1:
            raise ValidationError("n_clusters must be >= 1")
        if labels.size and (labels.min() < 0 or labels.max() >= self.n_clusters):
            raise ValidationError(f"labels must lie in [0, {self.n_clusters})")
        labels.flags.writeable = False
        object.__setattr__(self, "labels", labels)

    @classmethod
    def from_labels(cls, labels):
        labels = np.asarray(labels, dtype=np.int64)
        n = int(labels.max()) + 1 if labels.size else 1
        return cls(labels, n)

    def __len__(self):
        return self.labels.size


@dataclass
class KMeansResult:
    labels: np.ndarray
    centers: np.ndarray
    inertia: float
    n_iter: int
    history: list = field(default_factory=list)

    @property
    def assignment(self):
        return ClusterAssignment(self.labels, self.centers.shape[0])


def _sq_dists(points, centers):
    d = (np.sum(points**2, axis=1)[:, None] - 2.0 * points @ centers.T
         + np.sum(centers**2, axis=1)[None, :])
    return np.maximum(d, 0.0)


def _kmeanspp(points, k, rng):
    m = points.shape[0]
    centers = np.empty((k, points.shape[1]))
    centers[0] = points[rng.integers(m)]
    closest = _sq_dists(points, centers[:1])[:, 0]
    for c in range(1, k):
        total = closest.sum()
        if total <= 0.0:
            idx = rng.integers(m)
        else:
            idx = int(np.searchsorted(np.cumsum(closest), rng.random() * total, side="right"))
            idx = min(idx, m - 1)
        centers[c] = points[idx]
        closest = np.minimum(closest, _sq_dists(points, centers[c:c + 1])[:, 0])
    return centers


def _lloyd(points, centers, max_iters):
    k = centers.shape[0]
    labels = None
    history = []
    for it in range(1, max_iters + 1):
        d = _sq_dists(points, centers)
        new = np.argmin(d, axis=1)
        counts = np.bincount(new, minlength=k)
        for c in np.flatnonzero(counts == 0):
            # steal the point farthest from its own centre
            cost = d[np.arange(points.shape[0]), new]
            cost[np.bincount(new, minlength=k)[new] <= 1] = -1.0
            far = int(np.argmax(cost))
            new[far] = c
            d[far, c] = 0.0
        converged = labels is not None and np.array_equal(new, labels)
        labels = new
        for c in range(k):
            centers[c] = points[labels == c].mean(axis=0)
        history.append(float(np.sum((points - centers[labels]) ** 2)))
        if converged:
            break
    return labels, centers, history, it


def kmeans(points, k, rng, restarts=20, max_iters=300):
    """k-means with k-means++ seeding; best of ``restarts`` runs.

    Parameters
    ----------
    points : (M, p) array
    k : int
        Number of clusters, ``k <= M``.
    rng : numpy Generator or int seed
    restarts, max_iters : int

    Returns
    -------
    KMeansResult
        Lowest within-cluster sum of squares across restarts; ``history``
        holds that run's objective after every iteration.
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim == 1:
        points = points[:, None]
    m = points.shape[0]
    if not np.all(np.isfinite(points)):
        raise ValidationError("points contain non-finite values")
    if not 1 <= k <= m:
        raise ValidationError(f"k={k} must be in [1, {m}]")
    if restarts < 1 or max_iters < 1:
        raise ValidationError("restarts and max_iters must be >= 1")
    rng = make_rng(rng)

    best = None
    for _ in range(restarts):
        centers = _kmeanspp(points, k, rng)
        labels, centers, history, n_iter = _lloyd(points, centers, max_iters)
        inertia = history[-1]
        if best is None or inertia < best.inertia:
            best = KMeansResult(labels, centers, inertia, n_iter, history)
    return best


# --------------------------------------------------------------------------
# neighbour-pair enumeration

_TRIU_CACHE = {}


def _triu_pairs(m):
    pairs = _TRIU_CACHE.get(m)
    if pairs is None:
        pairs = np.triu_indices(m, k=1)
        if m <= 512:
            _TRIU_CACHE[m] = pairs
    return pairs


def wedges(matrix, mask=None, max_pairs=1 << 22):
    """Yield chunks of two-paths ``i - k - j`` with ``i < j`` through stored entries.

    Each chunk is ``(i, j, v_ik, v_kj)``. ``mask``, when given, is a boolean
    array over ``matrix.data`` selecting which stored entries may serve as
    legs. Chunks hold roughly ``max_pairs`` paths so memory stays bounded.
    """
    indptr, indices, data = matrix.indptr, matrix.indices, matrix.data
    buf_i, buf_j, buf_a, buf_b = [], [], [], []
    count = 0
    for k in range(matrix.n):
        lo, hi = indptr[k], indptr[k + 1]
        nb, val = indices[lo:hi], data[lo:hi]
        if mask is not None:
            sel = mask[lo:hi]
            nb, val = nb[sel], val[sel]
        m = nb.size
        if m < 2:
            continue
        a, b = _triu_pairs(m)
        # neighbour lists are sorted, so nb[a] < nb[b]
        buf_i.append(nb[a])
        buf_j.append(nb[b])
        buf_a.append(val[a])
        buf_b.append(val[b])
        count += a.size
        if count >= max_pairs:
            yield (np.concatenate(buf_i), np.concatenate(buf_j),
                   np.concatenate(buf_a), np.concatenate(buf_b))
            buf_i, buf_j, buf_a, buf_b = [], [], [], []
            count = 0
    if count:
        yield (np.concatenate(buf_i), np.concatenate(buf_j),
               np.concatenate(buf_a), np.concatenate(buf_b))


def reduce_pairs(n, i, j, v, how):
    """Collapse duplicate ``(i, j)`` keys with ``np.maximum`` or ``np.minimum``."""
    if i.size == 0:
        return i, j, v
    key = i.astype(np.int64) * n + j
    order = np.argsort(key, kind="stable")
    key, v = key[order], v[order]
    starts = np.flatnonzero(np.r_[True, key[1:] != key[:-1]])
    v = how.reduceat(v, starts)
    key = key[starts]
    return key // n, key % n, v


def lookup(matrix, i, j):
    """Vectorized ``matrix[i, j]`` for index arrays with ``i < j``."""
    r, c, v = matrix.triplets()
    out = np.full(i.shape, matrix.fill)
    if r.size == 0 or i.size == 0:
        return out
    n = matrix.n
    keys = r * n + c
    q = i.astype(np.int64) * n + j
    p = np.searchsorted(keys, q)
    p = np.minimum(p, keys.size - 1)
    hit = keys[p] == q
    out[hit] = v[p[hit]]
    return out
