"""Piecewise Correlation Estimation (PCE).

Similarities are graded into four levels by thresholds ``theta1 > theta2 >
theta3``. A triple ``(i, j, k)`` is *ternary unstable* when both legs
``w_ik``, ``w_kj`` are strong but the direct similarity ``w_ij`` is low:

1. both legs in ``(theta1, 1]`` and ``w_ij <= theta1``
2. one leg in ``(theta1, 1]``, the other in ``(theta2, theta1]``, ``w_ij <= theta2``
3. both legs in ``(theta2, theta1]`` and ``w_ij == 0``

Unstable triples propose a revised ``w_ij`` (mean of legs, smaller leg,
half the larger leg, respectively); the result keeps the largest proposal.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

from .errors import ValidationError
from .numkernel import SymmetricSparseMatrix, lookup, reduce_pairs, wedges


@dataclass(frozen=True)
class Thresholds:
    theta1: float = 0.8
    theta2: float = 0.6
    theta3: float = 0.3

    def __post_init__(self):
        if not 0.0 <= self.theta3 < self.theta2 < self.theta1 <= 1.0:
            raise ValidationError(
                "thresholds must satisfy 0 <= theta3 < theta2 < theta1 <= 1, got "
                f"({self.theta1}, {self.theta2}, {self.theta3})")


class CorrelationLevel(enum.Enum):
    EXTREMELY_STRONG = "extremely_strong"
    STRONG = "strong"
    MEDIUM = "medium"
    WEAK = "weak"


def classify(w, t=Thresholds()):
    """Correlation level of a similarity ``w`` in ``[0, 1]``."""
    if not 0.0 <= w <= 1.0:
        raise ValidationError(f"similarity {w} outside [0, 1]")
    if w > t.theta1:
        return CorrelationLevel.EXTREMELY_STRONG
    if w > t.theta2:
        return CorrelationLevel.STRONG
    if w > t.theta3:
        return CorrelationLevel.MEDIUM
    return CorrelationLevel.WEAK


def tur_case(w_ij, w_ik, w_kj, t=Thresholds()):
    """Which unstable-triple condition (1, 2 or 3) holds, or ``None``."""
    t1, t2 = t.theta1, t.theta2
    hi, lo = max(w_ik, w_kj), min(w_ik, w_kj)
    if lo > t1 and w_ij <= t1:
        return 1
    if hi > t1 and t2 < lo <= t1 and w_ij <= t2:
        return 2
    if t2 < lo and hi <= t1 and w_ij == 0:
        return 3
    return None


def _proposals(w_ij, w_ik, w_kj, t):
    """Vectorized revised similarities; NaN where no condition holds."""
    hi = np.maximum(w_ik, w_kj)
    lo = np.minimum(w_ik, w_kj)
    c1 = (lo > t.theta1) & (w_ij <= t.theta1)
    c2 = (hi > t.theta1) & (lo > t.theta2) & (lo <= t.theta1) & (w_ij <= t.theta2)
    c3 = (lo > t.theta2) & (hi <= t.theta1) & (w_ij == 0)
    out = np.full(w_ij.shape, np.nan)
    out[c3] = 0.5 * hi[c3]
    out[c2] = lo[c2]
    out[c1] = 0.5 * (w_ik[c1] + w_kj[c1])
    return out


def _check_affinity(W):
    _, _, v = W.triplets()
    if W.fill != 0.0:
        raise ValidationError("affinity matrix must have zero fill")
    if v.size and (v.min() < 0.0 or v.max() > 1.0):
        raise ValidationError("affinity entries must lie in [0, 1]")


def pce_densify(W, t=Thresholds(), sparsity_preserving=False):
    """Revise similarities in unstable triples.

    Every intermediate ``k`` is read against the input ``W`` (not partially
    updated values) and the largest proposal per pair wins, so the output
    does not depend on traversal order and never decreases an entry.

    Only intermediates with both legs above ``theta2`` can trigger a
    condition, so the scan runs over two-paths in the thresholded graph.

    Parameters
    ----------
    W : SymmetricSparseMatrix or array-like
        Affinity with entries in ``[0, 1]`` and zero diagonal.
    t : Thresholds
    sparsity_preserving : bool
        Only revise pairs that are already nonzero.
    """
    if not isinstance(t, Thresholds):
        raise ValidationError("t must be a Thresholds instance")
    W = SymmetricSparseMatrix.coerce(W)
    _check_affinity(W)
    n = W.n
    found_i, found_j, found_v = [], [], []
    for i, j, w_ik, w_kj in wedges(W, mask=W.data > t.theta2):
        w_ij = lookup(W, i, j)
        prop = _proposals(w_ij, w_ik, w_kj, t)
        ok = ~np.isnan(prop)
        if sparsity_preserving:
            ok &= w_ij > 0
        i, j, prop = reduce_pairs(n, i[ok], j[ok], prop[ok], np.maximum)
        found_i.append(i)
        found_j.append(j)
        found_v.append(prop)
    r, c, v = W.triplets()
    rows = np.concatenate([r, *found_i])
    cols = np.concatenate([c, *found_j])
    vals = np.concatenate([v, *found_v])
    rows, cols, vals = reduce_pairs(n, rows, cols, vals, np.maximum)
    return SymmetricSparseMatrix(n, rows, cols, vals)
