"""Command-line interface.

Subcommands: ``gen``, ``cluster``, ``eval``, ``bench``, ``sweep``.

Exit codes: 0 success, 1 validation error, 2 I/O error, 3 internal
invariant violation.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
from pathlib import Path

from . import io
from .datagen import SubspaceSpec, generate
from .errors import InvariantError, ValidationError
from .experiments import THETA1_GRID, bench, sweep
from .metrics import evaluate
from .pipeline import DENSE_CHOICES, PipelineConfig, run_pipeline

EXIT_OK, EXIT_VALIDATION, EXIT_IO, EXIT_INTERNAL = 0, 1, 2, 3


def _int_list(text):
    try:
        return [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _float_list(text):
    try:
        return [float(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated numbers, got {text!r}")


def _one_or_many(values):
    return values[0] if len(values) == 1 else values


def cmd_gen(args):
    spec = SubspaceSpec(
        n=args.subspaces,
        ambient_dim=args.ambient_dim,
        sub_dims=_one_or_many(args.sub_dim),
        points_per=_one_or_many(args.points_per),
        noise_sigma=args.noise,
        seed=args.seed,
    )
    data = generate(spec)
    io.write_data(args.out, data.X)
    io.write_labels(args.labels, data.labels)
    print(f"wrote {data.count} points in {spec.n} subspaces "
          f"(D={spec.ambient_dim}, d={list(spec.sub_dims)}, sigma={spec.noise_sigma}, "
          f"seed={spec.seed}) to {args.out}; labels to {args.labels}")
    return EXIT_OK


def cmd_cluster(args):
    config = PipelineConfig(
        clusters=args.clusters,
        gamma=args.gamma,
        dense=args.dense,
        theta1=args.theta1,
        theta2=args.theta2,
        theta3=args.theta3,
        seed=args.seed,
        affinity_symmetrization=args.symmetrization,
        sparsity_preserving=args.sparsity_preserving,
        full_apsp=args.full_apsp,
        max_dense_n=args.max_dense_n,
        threads=args.threads,
    )
    data = io.read_data(args.input, normalize=not args.no_normalize)
    truth = io.read_labels(args.truth) if args.truth else None
    if truth is not None and truth.size != data.count:
        raise ValidationError(f"{truth.size} truth labels for {data.count} points")
    result = run_pipeline(data, config, truth)

    stem = Path(args.input).with_suffix("")
    out = Path(args.out) if args.out else stem.with_name(stem.name + ".pred.csv")
    report_path = Path(args.report) if args.report else stem.with_name(stem.name + ".report.json")
    io.write_labels(out, result.labels)
    if args.affinity_out:
        io.write_affinity(args.affinity_out, result.dense_affinity)
    rep = result.report.to_dict()
    rep["input"] = str(args.input)
    io.write_json(report_path, rep)
    line = f"labels -> {out}; report -> {report_path}"
    if result.report.evaluation:
        ev = result.report.evaluation
        line += f"; acc={ev['acc']:.4f} nmi={ev['nmi']:.4f}"
    print(line)
    return EXIT_OK


def cmd_eval(args):
    pred = io.read_labels(args.pred)
    truth = io.read_labels(args.truth)
    if pred.size != truth.size:
        raise ValidationError(f"{pred.size} predicted labels vs {truth.size} true labels")
    W = io.read_affinity(args.affinity, n=pred.size) if args.affinity else None
    report = evaluate(pred, truth, W).to_dict()
    text = json.dumps(report, indent=2)
    if args.out:
        io.write_json(args.out, report)
    print(text)
    return EXIT_OK


def cmd_bench(args):
    def log(row):
        print(f"N={row.n_points:>7d}  imc={row.imc_seconds:9.3f}s", file=sys.stderr)

    rows = bench(args.sizes, gamma=args.gamma, seed=args.seed, subspaces=args.subspaces,
                 ambient_dim=args.ambient_dim, sub_dim=args.sub_dim, full_cap=args.full_cap,
                 threads=args.threads, log=log)
    dicts = [r.to_dict() for r in rows]
    fields = list(dicts[0])
    with open(args.csv, "w", newline="") as fh:
        w = csv.DictWriter(fh, fieldnames=fields)
        w.writeheader()
        for d in dicts:
            w.writerow({k: ("" if v is None else v) for k, v in d.items()})
    io.write_json(args.json, {"gamma": args.gamma, "seed": args.seed, "rows": dicts})
    for d in dicts:
        print(",".join("" if d[k] is None else str(d[k]) for k in fields))
    return EXIT_OK


def cmd_sweep(args):
    rows = sweep(theta1_values=args.theta1, theta2_values=args.theta2,
                 seeds=range(args.seed, args.seed + args.seeds), n=args.subspaces,
                 ambient_dim=args.ambient_dim, sub_dim=args.sub_dim,
                 points_per=args.points_per, noise_sigma=args.noise, gamma=args.gamma)
    print("theta1,theta2,mean_acc,mean_nmi")
    for r in rows:
        print(f"{r.theta1},{r.theta2},{r.mean_acc:.4f},{r.mean_nmi:.4f}")
    if args.json:
        io.write_json(args.json, {"rows": [r.to_dict() for r in rows if r.valid]})
    return EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="sdsc", description="Sparse-dense subspace clustering")
    sub = p.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate union-of-subspaces data")
    g.add_argument("--subspaces", type=int, required=True)
    g.add_argument("--ambient-dim", type=int, required=True)
    g.add_argument("--sub-dim", type=_int_list, required=True,
                   help="one dimension, or one per subspace (comma-separated)")
    g.add_argument("--points-per", type=_int_list, required=True,
                   help="points per subspace, one value or one per subspace")
    g.add_argument("--noise", type=float, default=0.0, help="std of additive noise")
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--out", required=True, help="data CSV path")
    g.add_argument("--labels", required=True, help="labels CSV path")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("cluster", help="run the clustering pipeline")
    c.add_argument("--input", required=True, help="data CSV (one point per row)")
    c.add_argument("--clusters", type=int, required=True)
    c.add_argument("--gamma", type=int, default=6, help="IMC selections per point")
    c.add_argument("--method", choices=["imc"], default="imc")
    c.add_argument("--dense", choices=DENSE_CHOICES, default="none")
    c.add_argument("--theta1", type=float, default=0.8)
    c.add_argument("--theta2", type=float, default=0.6)
    c.add_argument("--theta3", type=float, default=0.3)
    c.add_argument("--symmetrization", choices=["max", "sum"], default="max")
    c.add_argument("--sparsity-preserving", action="store_true",
                   help="densify only entries that are already nonzero")
    c.add_argument("--full-apsp", action="store_true",
                   help="extension: relax distances to a fixpoint instead of one hop")
    c.add_argument("--seed", type=int, default=0)
    c.add_argument("--truth", help="ground-truth labels CSV; adds evaluation to the report")
    c.add_argument("--out", help="predicted labels CSV (default <input>.pred.csv)")
    c.add_argument("--report", help="run report JSON (default <input>.report.json)")
    c.add_argument("--affinity-out", help="write the final affinity as i,j,w triplets")
    c.add_argument("--no-normalize", action="store_true",
                   help="skip unit-normalization of the input points")
    c.add_argument("--max-dense-n", type=int, default=10_000)
    c.add_argument("--threads", type=int, default=1)
    c.set_defaults(func=cmd_cluster)

    e = sub.add_parser("eval", help="score predicted labels against ground truth")
    e.add_argument("--pred", required=True)
    e.add_argument("--truth", required=True)
    e.add_argument("--affinity", help="affinity triplets; adds CONN to the report")
    e.add_argument("--out", help="write the JSON report here as well")
    e.set_defaults(func=cmd_eval)

    b = sub.add_parser("bench", help="time IMC over increasing N")
    b.add_argument("--sizes", type=_int_list, default=[300, 1200, 4800])
    b.add_argument("--gamma", type=int, default=6)
    b.add_argument("--seed", type=int, default=0)
    b.add_argument("--subspaces", type=int, default=6)
    b.add_argument("--ambient-dim", type=int, default=10)
    b.add_argument("--sub-dim", type=int, default=6)
    b.add_argument("--full-cap", type=int, default=0,
                   help="also time PCE + spectral for N up to this size")
    b.add_argument("--threads", type=int, default=1)
    b.add_argument("--csv", default="bench.csv")
    b.add_argument("--json", default="bench.json")
    b.set_defaults(func=cmd_bench)

    s = sub.add_parser("sweep", help="ACC of IMC+PCE over a threshold grid")
    s.add_argument("--theta1", type=_float_list, default=list(THETA1_GRID))
    s.add_argument("--theta2", type=_float_list, default=[0.6])
    s.add_argument("--seeds", type=int, default=10, help="number of seeds")
    s.add_argument("--seed", type=int, default=0, help="first seed")
    s.add_argument("--subspaces", type=int, default=5)
    s.add_argument("--ambient-dim", type=int, default=30)
    s.add_argument("--sub-dim", type=int, default=3)
    s.add_argument("--points-per", type=int, default=100)
    s.add_argument("--noise", type=float, default=0.0)
    s.add_argument("--gamma", type=int, default=5)
    s.add_argument("--json")
    s.set_defaults(func=cmd_sweep)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ValidationError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except InvariantError as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
