"""Universal dense stage and normalized-cut diagnostics.

The dense stage maps similarities to simulated distances with a strictly
decreasing transform, shortens every pair's distance through single
intermediates (``d*_ij = min(d_ij, min_k d_ik + d_kj)``, all reads from the
input distances), and maps back.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .errors import InvariantError, ValidationError
from .numkernel import ClusterAssignment, SymmetricSparseMatrix, reduce_pairs, wedges


class TransformKind(enum.Enum):
    """Similarity/distance transform pairs.

    ``D1``: ``d = 1 - w``, ``w = 1 - d``.
    ``D2``: ``d = 1 - ln w``, ``w = exp(1 - d)``.
    ``D3``: ``d = 1 / w``, ``w = 1 / d``.
    """

    D1 = "d1"
    D2 = "d2"
    D3 = "d3"

    @classmethod
    def parse(cls, value):
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower())
        except ValueError:
            raise ValidationError(f"unknown transform {value!r}; expected d1, d2 or d3") from None

    @property
    def fill(self):
        """Distance of a zero similarity."""
        return 1.0 if self is TransformKind.D1 else math.inf

    def forward(self, w):
        w = np.asarray(w, dtype=np.float64)
        if self is TransformKind.D1:
            return 1.0 - w
        with np.errstate(divide="ignore"):
            if self is TransformKind.D2:
                return 1.0 - np.log(w)
            return 1.0 / w

    def backward(self, d):
        d = np.asarray(d, dtype=np.float64)
        if self is TransformKind.D1:
            return 1.0 - d
        if self is TransformKind.D2:
            return np.exp(1.0 - d)
        with np.errstate(divide="ignore"):
            return 1.0 / d


def _affinity(W):
    W = SymmetricSparseMatrix.coerce(W)
    _, _, v = W.triplets()
    if W.fill != 0.0:
        raise ValidationError("affinity matrix must have zero fill")
    if v.size and (v.min() < 0.0 or v.max() > 1.0):
        raise ValidationError("affinity entries must lie in [0, 1]")
    return W


def to_distance(W, kind):
    """Simulated distances of an affinity; zero similarity reads as ``kind.fill``."""
    kind = TransformKind.parse(kind)
    W = _affinity(W)
    r, c, v = W.triplets()
    return SymmetricSparseMatrix(W.n, r, c, kind.forward(v), fill=kind.fill)


def to_similarity(Dm, kind):
    """Map distances back to similarities; ``+inf`` becomes 0."""
    kind = TransformKind.parse(kind)
    Dm = SymmetricSparseMatrix.coerce(Dm, fill=kind.fill)
    r, c, d = Dm.triplets()
    if kind is TransformKind.D1:
        if d.size and d.max() > 1.0:
            raise InvariantError("linear-transform distance above 1")
        if Dm.fill < 1.0:
            raise InvariantError("linear-transform distances must default to 1")
    elif d.size and np.min(d) < 1.0:
        raise ValidationError(f"distance below 1 outside the domain of {kind.name}")
    if d.size and d.min() < 0.0:
        raise ValidationError("distances must be non-negative")
    w = kind.backward(d)
    return SymmetricSparseMatrix(Dm.n, r, c, w)


def _relax_sparse(Dm):
    n = Dm.n
    rows, cols, vals = [], [], []
    for i, j, d_ik, d_kj in wedges(Dm):
        cand = d_ik + d_kj
        if Dm.fill != math.inf:
            keep = cand < Dm.fill
            i, j, cand = i[keep], j[keep], cand[keep]
        i, j, cand = reduce_pairs(n, i, j, cand, np.minimum)
        rows.append(i)
        cols.append(j)
        vals.append(cand)
    r, c, v = Dm.triplets()
    rows, cols, vals = reduce_pairs(n, np.concatenate([r, *rows]), np.concatenate([c, *cols]),
                                    np.concatenate([v, *vals]), np.minimum)
    return SymmetricSparseMatrix(n, rows, cols, vals, fill=Dm.fill)


def _relax_dense(Dm, chunk_elems=1 << 24):
    d = Dm.to_dense()
    n = d.shape[0]
    out = d.copy()
    # k = i and k = j reproduce d_ij (zero diagonal), so they need no exclusion
    step = max(1, chunk_elems // max(1, n * n))
    for s in range(0, n, step):
        e = min(n, s + step)
        via = np.min(d[s:e, :, None] + d[None, :, :], axis=1)
        np.minimum(out[s:e], via, out=out[s:e])
    out = np.minimum(out, out.T)
    np.fill_diagonal(out, 0.0)
    iu = np.triu_indices(n, k=1)
    return SymmetricSparseMatrix(n, iu[0], iu[1], out[iu], fill=Dm.fill)


def relax(Dm, method="auto", full=False):
    """One round of triangle relaxation through single intermediates.

    Parameters
    ----------
    Dm : SymmetricSparseMatrix or array-like
        Non-negative symmetric distances with zero diagonal (dense input
        uses ``inf`` as the unstored value).
    method : {"auto", "sparse", "dense"}
        ``sparse`` only visits intermediates adjacent to both endpoints. It
        is exact whenever the unstored value is ``>=`` every stored distance,
        since a leg through an unstored pair then never beats ``d_ij``.
    full : bool
        Repeat until no distance changes (all-pairs shortest paths). An
        extension, not part of the one-hop stage.
    """
    if not isinstance(Dm, SymmetricSparseMatrix):
        Dm = SymmetricSparseMatrix.coerce(Dm, fill=math.inf)
    _, _, v = Dm.triplets()
    if v.size and v.min() < 0.0:
        raise ValidationError("distances must be non-negative")
    sparse_ok = Dm.fill == math.inf or not v.size or v.max() <= Dm.fill
    if method == "auto":
        work = float(np.sum(Dm.degree_counts().astype(np.float64) ** 2))
        method = "sparse" if sparse_ok and work <= Dm.n ** 3 / 8 else "dense"
    if method == "sparse":
        if not sparse_ok:
            raise ValidationError("sparse relaxation needs stored distances <= the fill value")
        step = _relax_sparse
    elif method == "dense":
        step = _relax_dense
    else:
        raise ValidationError(f"unknown relax method {method!r}")

    out = step(Dm)
    while full:
        nxt = step(out)
        if np.array_equal(nxt.triplets()[2], out.triplets()[2]) and nxt.nnz == out.nnz:
            break
        out = nxt
    return out


def dense_stage(W, kind, sparsity_preserving=False, full_apsp=False, method="auto"):
    """Densify an affinity: distances, one-hop relaxation, back to similarities.

    With ``sparsity_preserving`` only entries that are already nonzero are
    updated.
    """
    kind = TransformKind.parse(kind)
    W = _affinity(W)
    D_star = relax(to_distance(W, kind), method=method, full=full_apsp)
    W_star = to_similarity(D_star, kind)
    r, c, v = W_star.triplets()
    r0, c0, v0 = W.triplets()
    if sparsity_preserving:
        keep = np.isin(r * W.n + c, r0 * W.n + c0)
        r, c, v = r[keep], c[keep], v[keep]
    # the round trip through the transforms may lose an ulp; never go below W
    rows, cols, vals = reduce_pairs(W.n, np.concatenate([r0, r]), np.concatenate([c0, c]),
                                    np.concatenate([v0, np.minimum(v, 1.0)]), np.maximum)
    return SymmetricSparseMatrix(W.n, rows, cols, vals)


# --------------------------------------------------------------------------
# normalized-cut diagnostics


@dataclass
class NcutReport:
    """Normalized-cut quantities of an affinity under a labelling.

    ``cut[a]`` sums ``w_uv`` over ordered pairs with ``u`` in cluster ``a``
    and ``v`` outside; ``vol[a]`` sums ``w_ut`` over ordered pairs inside
    ``a``. ``intra_sum``/``inter_sum`` total the matrix entries within and
    across clusters, ``inter_count`` counts nonzero cross-cluster entries,
    ``avg_degree`` is the mean number of nonzeros per row, and
    ``predicted_ratio`` is ``(k^2 - k) / k^2`` for that average degree.
    """

    cut: np.ndarray
    vol: np.ndarray
    ncut: float
    intra_sum: float
    inter_sum: float
    intra_count: int
    inter_count: int
    avg_degree: float
    predicted_ratio: float
    degenerate: bool = False

    @property
    def intra_mean(self):
        return self.intra_sum / self.intra_count if self.intra_count else math.nan

    @property
    def inter_mean(self):
        return self.inter_sum / self.inter_count if self.inter_count else math.nan

    def to_dict(self):
        return {
            "cut": [float(x) for x in self.cut],
            "vol": [float(x) for x in self.vol],
            "ncut": json_float(self.ncut),
            "intra_sum": self.intra_sum,
            "inter_sum": self.inter_sum,
            "intra_count": self.intra_count,
            "inter_count": self.inter_count,
            "avg_degree": self.avg_degree,
            "predicted_ratio": json_float(self.predicted_ratio),
            "degenerate": self.degenerate,
        }


def json_float(x):
    return None if not math.isfinite(x) else float(x)


def predicted_ratio(avg_degree, n_points=1, tau=0.0):
    """Predicted Ncut ratio ``(N k^2 - N k) / (N k^2 - tau)`` after densification."""
    k = float(avg_degree)
    num = n_points * k * k - n_points * k
    den = n_points * k * k - tau
    return num / den if den > 0 else math.nan


def _labels(labels, n):
    if isinstance(labels, ClusterAssignment):
        a = labels
    else:
        a = ClusterAssignment.from_labels(labels)
    if a.labels.size != n:
        raise ValidationError(f"{a.labels.size} labels for {n} points")
    return a


def ncut_report(W, labels):
    W = _affinity(W)
    a = _labels(labels, W.n)
    lab, n_clusters = a.labels, a.n_clusters
    if np.any(np.bincount(lab, minlength=n_clusters) == 0):
        raise ValidationError("every cluster must be nonempty")
    r, c, v = W.triplets()
    same = lab[r] == lab[c]
    vol = 2.0 * np.bincount(lab[r[same]], weights=v[same], minlength=n_clusters)
    cross = ~same
    cut = (np.bincount(lab[r[cross]], weights=v[cross], minlength=n_clusters)
           + np.bincount(lab[c[cross]], weights=v[cross], minlength=n_clusters))
    degenerate = bool(np.any(vol <= 0.0))
    ncut = math.inf if degenerate else float(np.sum(cut / vol))
    nz = v != 0
    k = 2.0 * np.count_nonzero(nz) / W.n if W.n else 0.0
    return NcutReport(
        cut=cut,
        vol=vol,
        ncut=ncut,
        intra_sum=float(vol.sum()),
        inter_sum=float(cut.sum()),
        intra_count=2 * int(np.count_nonzero(same & nz)),
        inter_count=2 * int(np.count_nonzero(cross & nz)),
        avg_degree=k,
        predicted_ratio=predicted_ratio(k, W.n),
        degenerate=degenerate,
    )


@dataclass
class NcutGain:
    """``ratio = Ncut(W*) / Ncut(W)``; NaN with ``zero_denominator`` when Ncut(W) is 0."""

    ratio: float
    before: NcutReport
    after: NcutReport
    zero_denominator: bool = False


def ncut_gain(W, W_star, labels):
    before = ncut_report(W, labels)
    after = ncut_report(W_star, labels)
    if before.ncut == 0.0:
        return NcutGain(math.nan, before, after, zero_denominator=True)
    return NcutGain(after.ncut / before.ncut, before, after)
