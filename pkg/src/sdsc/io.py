"""File formats.

data CSV
    One point per row, comma-separated reals, no header.
labels CSV
    One integer per row.
affinity CSV
    Triplet lines ``i,j,w`` with 0-based ``i < j`` (upper triangle only).

Reals are written with 17 significant digits, which round-trips every
IEEE double exactly.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np

from .datagen import DataMatrix, normalize_columns
from .errors import ParseError, ValidationError
from .numkernel import SymmetricSparseMatrix


def fmt(x):
    return f"{float(x):.17g}"


def _open_write(path):
    path = Path(path)
    try:
        return path.open("w", encoding="ascii", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _read_lines(path):
    path = Path(path)
    try:
        with path.open("r", encoding="utf-8") as fh:
            return path, fh.read().splitlines()
    except OSError as exc:
        raise OSError(f"cannot read {path}: {exc.strerror or exc}") from exc


def _float(tok, path, lineno):
    try:
        v = float(tok)
    except ValueError:
        raise ParseError(path, lineno, f"not a number: {tok.strip()!r}") from None
    if not math.isfinite(v):
        raise ParseError(path, lineno, f"non-finite value {tok.strip()!r}")
    return v


def write_data(path, X):
    """Write a (D, N) column-per-point array as N rows."""
    X = np.asarray(X.X if isinstance(X, DataMatrix) else X, dtype=np.float64)
    with _open_write(path) as fh:
        for col in X.T:
            fh.write(",".join(fmt(v) for v in col))
            fh.write("\n")


def read_data(path, normalize=True, labels_path=None):
    path, lines = _read_lines(path)
    rows = []
    width = None
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        toks = line.split(",")
        if width is None:
            width = len(toks)
        elif len(toks) != width:
            raise ParseError(path, lineno, f"expected {width} values, found {len(toks)}")
        rows.append([_float(t, path, lineno) for t in toks])
    if not rows:
        raise ParseError(path, 1, "no data rows")
    X = np.array(rows, dtype=np.float64).T
    if normalize:
        X = normalize_columns(X)
    labels = read_labels(labels_path) if labels_path is not None else None
    return DataMatrix(X, labels)


def write_labels(path, labels):
    labels = np.asarray(getattr(labels, "labels", labels))
    with _open_write(path) as fh:
        for v in labels:
            fh.write(f"{int(v)}\n")


def read_labels(path):
    path, lines = _read_lines(path)
    out = []
    for lineno, line in enumerate(lines, start=1):
        s = line.strip()
        if not s:
            continue
        try:
            v = int(s)
        except ValueError:
            raise ParseError(path, lineno, f"not an integer label: {s!r}") from None
        if v < 0:
            raise ParseError(path, lineno, f"negative label {v}")
        out.append(v)
    return np.array(out, dtype=np.int64)


def write_affinity(path, W):
    r, c, v = W.triplets()
    with _open_write(path) as fh:
        for i, j, w in zip(r.tolist(), c.tolist(), v.tolist()):
            fh.write(f"{i},{j},{fmt(w)}\n")


def read_affinity(path, n=None):
    """Read triplets; ``n`` defaults to one past the largest index."""
    path, lines = _read_lines(path)
    rows, cols, vals = [], [], []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        toks = line.split(",")
        if len(toks) != 3:
            raise ParseError(path, lineno, "expected 'i,j,w'")
        try:
            i, j = int(toks[0]), int(toks[1])
        except ValueError:
            raise ParseError(path, lineno, "indices must be integers") from None
        if not 0 <= i < j:
            raise ParseError(path, lineno, f"need 0 <= i < j, got ({i}, {j})")
        rows.append(i)
        cols.append(j)
        vals.append(_float(toks[2], path, lineno))
    size = max(cols, default=-1) + 1
    if n is not None:
        if size > n:
            raise ValidationError(f"{path}: index {size - 1} out of range for {n} points")
        size = n
    return SymmetricSparseMatrix(size, rows, cols, vals)


def write_json(path, obj):
    with _open_write(path) as fh:
        json.dump(obj, fh, indent=2, sort_keys=False)
        fh.write("\n")
