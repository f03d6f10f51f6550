"""Scalability benchmark and threshold sweep on synthetic data."""

from __future__ import annotations

import time
from dataclasses import dataclass

import numpy as np

from .datagen import SubspaceSpec, generate
from .errors import ValidationError
from .imc import affinity_max, imc_coefficients
from .metrics import accuracy, nmi
from .numkernel import derive_rng
from .pce import Thresholds, pce_densify
from .spectral import spectral_clustering


def split_points(total, n):
    """Spread ``total`` points over ``n`` subspaces as evenly as possible."""
    base, extra = divmod(int(total), n)
    if base < 1:
        raise ValidationError(f"{total} points cannot fill {n} subspaces")
    return [base + (i < extra) for i in range(n)]


@dataclass
class BenchRow:
    n_points: int
    gen_seconds: float
    imc_seconds: float
    affinity_seconds: float
    dense_seconds: float | None = None
    spectral_seconds: float | None = None
    acc: float | None = None

    def to_dict(self):
        return dict(self.__dict__)


def bench(sizes, gamma=6, seed=0, subspaces=6, ambient_dim=10, sub_dim=6,
          full_cap=0, threads=1, dense="pce", log=None):
    """Time the IMC stage over increasing data sizes.

    Data follows the synthetic protocol: ``subspaces`` random subspaces of
    dimension ``sub_dim`` in ``ambient_dim`` dimensions. For sizes up to
    ``full_cap`` the dense (PCE) and spectral stages are timed too.
    """
    sizes = [int(s) for s in sizes]
    if not sizes:
        raise ValidationError("no sizes given")
    if any(b <= a for a, b in zip(sizes, sizes[1:])):
        raise ValidationError("sizes must be strictly ascending")
    rows = []
    for n_points in sizes:
        spec = SubspaceSpec(subspaces, ambient_dim, sub_dim,
                            split_points(n_points, subspaces), 0.0, seed)
        t0 = time.perf_counter()
        data = generate(spec)
        t1 = time.perf_counter()
        C = imc_coefficients(data, gamma, n_jobs=threads)
        t2 = time.perf_counter()
        W = affinity_max(C)
        t3 = time.perf_counter()
        row = BenchRow(n_points, t1 - t0, t2 - t1, t3 - t2)
        if n_points <= full_cap:
            W_star = pce_densify(W) if dense == "pce" else W
            t4 = time.perf_counter()
            lab = spectral_clustering(W_star, subspaces, derive_rng(seed, "spectral"))
            t5 = time.perf_counter()
            row.dense_seconds = t4 - t3
            row.spectral_seconds = t5 - t4
            row.acc = accuracy(lab, data.labels)
        rows.append(row)
        if log is not None:
            log(row)
    return rows


# canonical synthetic setting for the sweep
SWEEP_SETTING = dict(n=5, ambient_dim=30, sub_dim=3, points_per=100, noise_sigma=0.0, gamma=5)
THETA1_GRID = (0.65, 0.7, 0.75, 0.8, 0.85, 0.9, 0.95)
THETA2_GRID = (0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75)


@dataclass
class SweepRow:
    theta1: float
    theta2: float
    mean_acc: float
    mean_nmi: float
    valid: bool = True

    def to_dict(self):
        return dict(self.__dict__)


def sweep(theta1_values=THETA1_GRID, theta2_values=(0.6,), seeds=range(10), n=5,
          ambient_dim=30, sub_dim=3, points_per=100, noise_sigma=0.0, gamma=5):
    """Mean ACC/NMI of IMC + PCE + spectral over a grid of thresholds.

    The IMC affinity is computed once per seed and reused across the grid.
    Pairs violating ``theta2 < theta1`` are reported with ``valid=False``.
    """
    seeds = list(seeds)
    prepared = []
    for seed in seeds:
        data = generate(SubspaceSpec(n, ambient_dim, sub_dim, points_per, noise_sigma, seed))
        prepared.append((seed, data, affinity_max(imc_coefficients(data, gamma))))
    rows = []
    for t2 in theta2_values:
        for t1 in theta1_values:
            if not t2 < t1:
                rows.append(SweepRow(t1, t2, float("nan"), float("nan"), valid=False))
                continue
            th = Thresholds(t1, t2, min(0.3, t2 / 2))
            accs, nmis = [], []
            for seed, data, W in prepared:
                lab = spectral_clustering(pce_densify(W, th), n, derive_rng(seed, "spectral"))
                accs.append(accuracy(lab, data.labels))
                nmis.append(nmi(lab, data.labels))
            rows.append(SweepRow(t1, t2, float(np.mean(accs)), float(np.mean(nmis))))
    return rows
