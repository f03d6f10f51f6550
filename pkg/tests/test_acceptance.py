"""Acceptance suite: one PASS/FAIL line per criterion.

Run with ``pytest tests/test_acceptance.py``; the verdict lines are written
straight to the terminal regardless of output capturing.
"""

import math

import numpy as np
import pytest

from conftest import random_affinity, strong_affinity
from oracles import best_matches_bruteforce, imc_naive, pce_naive, relax_naive
from sdsc.datagen import SubspaceSpec, generate, normalize_columns
from sdsc.densify import TransformKind, dense_stage, ncut_gain, relax, to_distance, to_similarity
from sdsc.experiments import THETA1_GRID, bench, sweep
from sdsc.imc import affinity_max, imc_coefficients
from sdsc.metrics import accuracy, connectivity, nmi
from sdsc.pce import Thresholds, pce_densify
from sdsc.pipeline import PipelineConfig, run_pipeline

SEEDS = range(10)
SETTING = dict(n=5, ambient_dim=30, sub_dims=3, points_per=100, noise_sigma=0.0)
GAMMA = 5


@pytest.fixture
def verdict(capsys):
    def report(number, name, ok, detail=""):
        with capsys.disabled():
            print(f"\n[{'PASS' if ok else 'FAIL'}] criterion {number}: {name}"
                  + (f" ({detail})" if detail else ""))
        assert ok, detail
    return report


@pytest.fixture(scope="module")
def runs():
    """Pipeline runs per seed and dense stage in the shared synthetic setting."""
    out = {}
    for seed in SEEDS:
        data = generate(SubspaceSpec(seed=seed, **SETTING))
        for dense in ("none", "pce", "d3"):
            cfg = PipelineConfig(clusters=5, gamma=GAMMA, dense=dense, seed=seed)
            out[seed, dense] = (data, run_pipeline(data, cfg, data.labels))
    return out


def test_criterion_1_imc_oracle(verdict):
    rng = np.random.default_rng(101)
    bad = []
    for t in range(25):
        D = int(rng.choice([5, 10]))
        N = int(rng.choice([8, 20]))
        gamma = int(rng.choice([1, 2, 3]))
        X = normalize_columns(rng.standard_normal((D, N)))
        C = imc_coefficients(X, gamma)
        C_ref, picks = imc_naive(X, gamma)
        for i in range(N):
            idx, val = C.column(i)
            if list(idx) != picks[i] or np.max(np.abs(val - C_ref[idx, i]), initial=0) > 1e-12:
                bad.append((t, i))
    verdict(1, "IMC matches the naive transcription", not bad,
            f"25 instances, {len(bad)} mismatching columns")


def test_criterion_2_pce_relax_oracle(verdict):
    rng = np.random.default_rng(202)
    kinds = list(TransformKind)
    bad = []
    for t in range(25):
        W = strong_affinity(rng, 40, float(rng.uniform(0.05, 0.3)))
        if not np.array_equal(pce_densify(W).to_dense(), pce_naive(W, 0.8, 0.6)):
            bad.append(("pce", t))
        Dm = to_distance(W, kinds[t % 3])
        ref = relax_naive(Dm.to_dense())
        for method in ("sparse", "dense"):
            if not np.array_equal(relax(Dm, method=method).to_dense(), ref):
                bad.append((method, t))
    verdict(2, "PCE and relax match the O(N^3) oracles", not bad,
            f"25 affinities, mismatches: {bad or 'none'}")


def test_criterion_3_monotonicity(verdict):
    rng = np.random.default_rng(303)
    failures = []
    worst_round_trip = 0.0
    for t in range(100):
        n = int(rng.integers(5, 40))
        W = random_affinity(rng, n, float(rng.uniform(0.05, 0.5)))
        for mode in ("pce", "d1", "d2", "d3"):
            out = (pce_densify(W) if mode == "pce" else dense_stage(W, mode)).to_dense()
            ok = (np.all(out >= W) and np.array_equal(out, out.T)
                  and np.all(np.diag(out) == 0)
                  and np.count_nonzero(out) >= np.count_nonzero(W))
            if not ok:
                failures.append((t, mode))
            if mode != "pce":
                back = to_similarity(to_distance(W, mode), mode).to_dense()
                worst_round_trip = max(worst_round_trip, float(np.max(np.abs(back - W))))
    ok = not failures and worst_round_trip <= 1e-12
    verdict(3, "densification is monotone, symmetric, densifying; transforms round-trip", ok,
            f"{len(failures)} failures, worst round-trip error {worst_round_trip:.2e}")


def test_criterion_4_ncut_gain(runs, verdict):
    below, details = 0, []
    for seed in SEEDS:
        data, res = runs[seed, "d3"]
        g = ncut_gain(res.affinity, res.dense_affinity, data.labels)
        if g.zero_denominator:
            details.append(f"seed {seed}: Ncut(W)=0, Q undefined")
        else:
            details.append(f"seed {seed}: Q={g.ratio:.4f}")
            below += g.ratio < 1.0
    verdict(4, "D3 Ncut ratio Q < 1 in >= 9 of 10 seeds", below >= 9,
            f"{below}/10 below 1; " + "; ".join(details))


def _means(runs, dense):
    evs = [runs[s, dense][1].report.evaluation for s in SEEDS]
    return float(np.mean([e["acc"] for e in evs])), float(np.mean([e["nmi"] for e in evs]))


def test_criterion_5_end_to_end(runs, verdict):
    acc, nm = _means(runs, "pce")
    verdict(5, "IMC+PCE+spectral mean ACC >= 0.95 and mean NMI >= 0.90",
            acc >= 0.95 and nm >= 0.90, f"ACC={acc:.4f}, NMI={nm:.4f}")


def test_criterion_6_densification_helps(runs, verdict):
    base, _ = _means(runs, "none")
    pce, _ = _means(runs, "pce")
    d3, _ = _means(runs, "d3")
    verdict(6, "mean ACC of IMC+PCE and IMC+D3 >= IMC alone", pce >= base and d3 >= base,
            f"IMC={base:.4f}, PCE={pce:.4f}, D3={d3:.4f}")


@pytest.mark.slow
def test_criterion_7_scalability(verdict):
    sizes = [2500, 5000, 10000, 20000]
    rows = bench(sizes, gamma=6, ambient_dim=10)
    t = [r.imc_seconds for r in rows]
    ratios = [b / a for a, b in zip(t, t[1:])]
    ok = t[-1] < 600 and all(r <= 5 for r in ratios)
    verdict(7, "IMC at N=20000 under 10 min with time(2N)/time(N) <= 5", ok,
            "times " + ", ".join(f"{n}: {s:.2f}s" for n, s in zip(sizes, t))
            + "; ratios " + ", ".join(f"{r:.2f}" for r in ratios))


def test_criterion_8_metrics(verdict):
    rng = np.random.default_rng(808)
    mismatches = 0
    for _ in range(200):
        n = int(rng.integers(1, 13))
        pred = rng.integers(0, rng.integers(1, 7), n).tolist()
        truth = rng.integers(0, rng.integers(1, 7), n).tolist()
        if round(accuracy(pred, truth) * n) != best_matches_bruteforce(pred, truth):
            mismatches += 1
    labels = [0, 1, 2, 0, 1, 2]
    nmi_same = nmi(labels, labels)
    nmi_indep = nmi([0, 0, 1, 1], [0, 1, 0, 1])
    two = np.zeros((4, 4))
    two[0, 1] = two[1, 0] = two[2, 3] = two[3, 2] = 1.0
    conn_two = connectivity(two)
    conn_k3 = connectivity(np.ones((3, 3)) - np.eye(3))
    ok = (mismatches == 0 and abs(nmi_same - 1) <= 1e-12 and abs(nmi_indep) <= 1e-12
          and conn_two <= 1e-8 and abs(conn_k3 - 1.5) <= 1e-8)
    verdict(8, "ACC, NMI and CONN agree with brute force and closed forms", ok,
            f"ACC mismatches {mismatches}/200, NMI(same)={nmi_same:.15f}, "
            f"NMI(indep)={nmi_indep:.1e}, CONN(2 comps)={conn_two:.1e}, CONN(K3)={conn_k3:.12f}")


def test_criterion_9_threshold_sweep(verdict):
    rows = sweep(THETA1_GRID, (0.6,), seeds=SEEDS, n=5, ambient_dim=30, sub_dim=3,
                 points_per=100, noise_sigma=0.0, gamma=GAMMA)
    table = ", ".join(f"{r.theta1:.2f}:{r.mean_acc:.4f}" for r in rows)
    best = max(r.mean_acc for r in rows)
    default = next(r.mean_acc for r in rows if math.isclose(r.theta1, 0.8))
    verdict(9, "default thresholds within 0.02 ACC of the sweep's best", best - default <= 0.02,
            f"ACC by theta1 {table}")
