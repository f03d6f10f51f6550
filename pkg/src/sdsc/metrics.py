"""Clustering quality metrics and graph connectivity."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import linear_sum_assignment

from .errors import ValidationError
from .numkernel import ClusterAssignment, symmetric_eigen
from .spectral import DEGREE_FLOOR, normalized_laplacian


def _as_labels(x):
    if isinstance(x, ClusterAssignment):
        return x.labels
    a = np.asarray(x)
    if a.ndim != 1:
        raise ValidationError("labels must be one-dimensional")
    return a


def _pair(pred, truth):
    p, t = _as_labels(pred), _as_labels(truth)
    if p.size != t.size:
        raise ValidationError(f"label count mismatch: {p.size} predicted vs {t.size} true")
    return p, t


def _confusion(p, t):
    pu, pi = np.unique(p, return_inverse=True)
    tu, ti = np.unique(t, return_inverse=True)
    M = np.zeros((pu.size, tu.size), dtype=np.int64)
    np.add.at(M, (pi, ti), 1)
    return pu, tu, M


def bestmap(pred, truth):
    """Match-maximizing injective map from predicted to true labels.

    Solved as an assignment problem on the confusion matrix. Predicted
    labels left over when there are more predicted than true clusters map
    to ``None`` and count as mismatches.
    """
    p, t = _pair(pred, truth)
    if p.size == 0:
        return {}
    pu, tu, M = _confusion(p, t)
    rows, cols = linear_sum_assignment(M, maximize=True)
    mapping = {pu[r].item(): tu[c].item() for r, c in zip(rows, cols)}
    for label in pu:
        mapping.setdefault(label.item(), None)
    return mapping


def accuracy(pred, truth):
    """Fraction of points whose predicted label maps onto their true label."""
    p, t = _pair(pred, truth)
    if p.size == 0:
        return 1.0
    _, _, M = _confusion(p, t)
    rows, cols = linear_sum_assignment(M, maximize=True)
    return float(M[rows, cols].sum()) / p.size


def _entropy(counts, n):
    q = counts[counts > 0] / n
    return float(-np.sum(q * np.log(q)))


def nmi(pred, truth):
    """``2 I(U; V) / (H(U) + H(V))`` with natural logarithms."""
    p, t = _pair(pred, truth)
    n = p.size
    if n == 0:
        return 1.0
    _, _, M = _confusion(p, t)
    hu = _entropy(M.sum(axis=1), n)
    hv = _entropy(M.sum(axis=0), n)
    if hu + hv == 0.0:
        return 1.0
    pij = M / n
    outer = np.outer(M.sum(axis=1), M.sum(axis=0)) / (n * n)
    nz = pij > 0
    mi = float(np.sum(pij[nz] * np.log(pij[nz] / outer[nz])))
    return min(1.0, max(0.0, 2.0 * mi / (hu + hv)))


def connectivity(W, eps=DEGREE_FLOOR):
    """Second smallest eigenvalue of the normalized Laplacian (raw, unclamped above)."""
    N = W.shape[0]
    if N < 2:
        raise ValidationError("connectivity needs at least two points")
    vals, _ = symmetric_eigen(normalized_laplacian(W, eps), 2)
    return max(0.0, float(vals[1]))


@dataclass
class EvaluationReport:
    acc: float
    nmi: float
    permutation: dict
    conn: float | None = None

    def to_dict(self):
        out = {
            "acc": self.acc,
            "nmi": self.nmi,
            "permutation": {str(k): v for k, v in self.permutation.items()},
        }
        if self.conn is not None:
            out["conn"] = self.conn
        return out


def evaluate(pred, truth, affinity=None):
    mapping = bestmap(pred, truth)
    conn = connectivity(affinity) if affinity is not None else None
    return EvaluationReport(accuracy(pred, truth), nmi(pred, truth), mapping, conn)
