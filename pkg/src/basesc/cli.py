"""Command-line entry point: ``basesc {cluster,eigens,compare,verify,synth}``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import math
import os
import sys
from pathlib import Path

import numpy as np

from . import __version__
from .affinity import affinity_global, default_sigma
from .clusterers import DEFAULT_LINKAGE, DEFAULT_RESTARTS, LINKAGES, hierarchical, preset_recipe, spectral_cluster
from .core import (ALL_METRICS, DEFAULT_BASE, DEFAULT_EIGEN_COUNT, DEFAULT_K_NEIGHBOR, BaseSCError, DataError,
                   DistanceMetric, InvalidLinkageMetric, KTooLarge, NumericError, SingleCluster, TooLarge,
                   make_rng)
from .evaluate import SynthSpec, compare, default_recipes, eigen_report, synth_blobs
from .ingest import CsvSchemaConfig, load_csv, load_schema, normalize, save_schema
from .metrics import pairwise
from .spectral import check_cheeger, check_conjecture1, check_shrinkage, random_graph

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _metric(text):
    try:
        return DistanceMetric.parse(text)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))


def _int_list(text):
    try:
        vals = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")
    if not vals or any(v < 1 for v in vals):
        raise argparse.ArgumentTypeError("cluster counts must be positive integers")
    return vals


def _metric_list(text):
    return [_metric(t) for t in text.split(",") if t.strip()]


def _positive_float(text):
    v = float(text)
    if not v > 0 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text!r}")
    return v


def _positive_int(text):
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return v


def _base(text):
    v = float(text)
    if not v > 1 or not math.isfinite(v):
        raise argparse.ArgumentTypeError(f"base must be a finite number > 1, got {text!r}")
    return v


def _add_input(p, required=True):
    p.add_argument("--input", required=required, help="trait CSV file")
    p.add_argument("--schema", help="schema config (INI) with delimiter, header and category ranks")


def _add_recipe(p):
    p.add_argument("--a", type=_base, default=DEFAULT_BASE, help="exponential base for base-a kernels")
    p.add_argument("--K", type=_positive_int, default=DEFAULT_K_NEIGHBOR,
                   help="neighbor rank for local scaling (clamped to n-1)")
    p.add_argument("--sigma", type=_positive_float, default=None,
                   help="global bandwidth (default: half the median pairwise distance)")
    p.add_argument("--metric", type=_metric, default=DistanceMetric.SQUARED_EUCLIDEAN,
                   help="euclidean, sqeuclidean or correlation")


def _write(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def _load(args):
    schema = load_schema(args.schema) if args.schema else None
    return normalize(load_csv(args.input, schema))


# ------------------------------------------------------------------ commands


def cmd_cluster(args) -> int:
    d = _load(args)
    dm = pairwise(d, args.metric)
    if args.algo == "hc":
        res = hierarchical(dm, args.k, args.linkage)
        prov = {"algorithm": "hc", "linkage": args.linkage, "metric": args.metric.value, "k": args.k}
    else:
        recipe = preset_recipe(args.algo, args.metric, base=args.a, sigma=args.sigma, K=args.K)
        res = spectral_cluster(d, recipe, args.k, seed=args.seed, restarts=args.restarts, dm=dm)
        prov = {"algorithm": args.algo, "k": args.k}
        prov.update({key: val for key, val in res.provenance.items() if key != "eigenvalues"})
    buf = io.StringIO()
    for key, val in prov.items():
        buf.write(f"# {key}: {val!r}\n" if isinstance(val, float) else f"# {key}: {val}\n")
    buf.write(f"# input: {args.input}\n")
    for note in res.warnings:
        buf.write(f"# warning: {note}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_id", "label"])
    for rid, lab in zip(d.row_ids, res.labels):
        w.writerow([rid, int(lab)])
    _write(buf.getvalue(), args.output)
    return EXIT_OK


def cmd_eigens(args) -> int:
    d = _load(args)
    report = eigen_report(d, default_recipes(args.metric, args.a, args.K, args.sigma), args.k)
    _write(report.to_csv(), args.output)
    return EXIT_OK


def cmd_compare(args) -> int:
    d = _load(args)
    report = compare(d, args.counts, args.metrics, seed=args.seed, base=args.a, K=args.K, sigma=args.sigma,
                     linkage=args.linkage, silhouette_metric=args.silhouette_metric,
                     restarts=args.restarts, threads=args.threads)
    _write(report.to_csv() if args.format == "csv" else report.to_text(), args.output)
    return EXIT_OK


def cmd_verify(args) -> int:
    rng = make_rng(args.seed)
    lines = []
    failed = False

    # Cheeger bounds on random weighted graphs
    bad = 0
    for _ in range(args.graphs):
        W = random_graph(int(rng.integers(2, args.graph_size + 1)), rng)
        if not check_cheeger(W).ok:
            bad += 1
    failed |= bad > 0
    lines.append(f"cheeger random graphs: {args.graphs - bad}/{args.graphs} pass "
                 f"(n <= {args.graph_size}) [{'PASS' if bad == 0 else 'FAIL'}]")

    d = _load(args) if args.input else None
    if d is None:
        d = normalize(synth_blobs(SynthSpec(n_points=300, n_clusters=3, dimension=8, separation=6.0,
                                            seed=args.seed))[0])
        lines.append("dataset: synthetic 3-blob set (n=300, m=8)")
    else:
        lines.append(f"dataset: {args.input} (n={d.n}, m={d.m})")
    dm = pairwise(d, args.metric)
    sigma = args.sigma or default_sigma(dm)

    if d.n > args.max_cheeger_n:
        idx = np.sort(rng.choice(d.n, size=args.max_cheeger_n, replace=False))
        note = f"random subset of {args.max_cheeger_n} points (seed {args.seed})"
    else:
        idx = np.arange(d.n)
        note = "all points"
    sub = dm.subset(idx)
    try:
        rep = check_cheeger(affinity_global(sub, args.a, default_sigma(sub)).values)
        failed |= not rep.ok
        lines.append(f"cheeger on dataset ({note}, base {args.a:g}): lambda2={rep.lambda2:.6g} "
                     f"phi={rep.phi_G:.6g} lower={rep.lower_ok} upper={rep.upper_ok} "
                     f"[{'PASS' if rep.ok else 'FAIL'}]")
    except NumericError as exc:
        lines.append(f"cheeger on dataset skipped: {exc}")

    shrink = check_shrinkage(dm, sigma, args.a)
    failed |= not shrink.ok
    equal = shrink.max_excess == 0.0 and shrink.frobenius_a == shrink.frobenius_e
    lines.append(f"shrinkage (base {args.a!r} vs e, sigma={sigma:.6g}): elementwise={shrink.elementwise_ok} "
                 f"frobenius {shrink.frobenius_a:.6g} <= {shrink.frobenius_e:.6g}: {shrink.frobenius_ok} "
                 f"radius<=norm: {shrink.radius_ok}{' (equality)' if equal else ''} "
                 f"[{'PASS' if shrink.ok else 'FAIL'}]")

    try:
        conj = check_conjecture1(dm, sigma, args.a, args.k, K=args.K)
        verdict = "reduced" if conj.reduced.all() else "not reduced"
        lines.append(f"conjecture (observation): base-{args.a:g} eigenvalues <= base-e for "
                     f"{int(conj.reduced.sum())}/{conj.reduced.size} of the smallest eigenvalues: {verdict}")
        lines.append(f"local scaling (observation, K={conj.K}): <= base-{args.a:g} global for "
                     f"{int(conj.local_reduced.sum())}/{conj.local_reduced.size}")
    except BaseSCError as exc:
        lines.append(f"conjecture observation skipped: {type(exc).__name__}: {exc}")

    lines.append("result: " + ("FAIL" if failed else "all provable checks pass"))
    _write("\n".join(lines) + "\n", args.output)
    return EXIT_NUMERIC if failed else EXIT_OK


def cmd_synth(args) -> int:
    try:
        spec = SynthSpec(n_points=args.n, n_clusters=args.clusters, dimension=args.dim,
                         cluster_spread=args.spread, separation=args.separation,
                         categorical_columns=args.categorical, seed=args.seed,
                         elongation=args.elongation, noise_fraction=args.noise)
    except ValueError as exc:
        raise UsageError(str(exc))
    d, truth = synth_blobs(spec)
    out = Path(args.output_dir)
    out.mkdir(parents=True, exist_ok=True)
    data_path = out / f"{args.prefix}.csv"
    truth_path = out / f"{args.prefix}_truth.csv"
    schema_path = out / f"{args.prefix}_schema.ini"

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_id"] + [c.name for c in d.columns])
    for rid, row in zip(d.row_ids, d.values):
        cells = []
        for col, v in zip(d.columns, row):
            cells.append(col.category_order[int(v)] if col.kind == "categorical" else repr(float(v)))
        w.writerow([rid] + cells)
    data_path.write_text(buf.getvalue(), encoding="utf-8")

    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["row_id", "label"])
    w.writerows([rid, int(lab)] for rid, lab in zip(d.row_ids, truth))
    truth_path.write_text(buf.getvalue(), encoding="utf-8")

    cats = {c.name: list(c.category_order) for c in d.columns if c.kind == "categorical"}
    save_schema(CsvSchemaConfig(cats, ",", True, "row_id"), schema_path)
    sys.stdout.write(f"wrote {data_path}, {truth_path}, {schema_path}\n")
    return EXIT_OK


# ------------------------------------------------------------------ parser


def build_parser() -> argparse.ArgumentParser:
    fmt = argparse.ArgumentDefaultsHelpFormatter
    parser = _Parser(prog="basesc", description="Spectral clustering with base-a and locally scaled kernels.",
                     formatter_class=fmt)
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("cluster", help="cluster a trait table and write (row_id, label) CSV", formatter_class=fmt)
    _add_input(p)
    p.add_argument("--algo", choices=["old-sc", "base-a", "new-sc", "hc"], default="new-sc",
                   help="old-sc: base e, global sigma; base-a: base a, global sigma; "
                        "new-sc: base a, local scaling; hc: agglomerative baseline")
    _add_recipe(p)
    p.add_argument("--k", type=_positive_int, required=True, help="number of clusters")
    p.add_argument("--seed", type=int, default=0, help="k-means seed")
    p.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS, help="k-means restarts")
    p.add_argument("--linkage", choices=LINKAGES, default=DEFAULT_LINKAGE, help="HC linkage")
    p.add_argument("--output", help="labels CSV path (default: stdout)")
    p.set_defaults(func=cmd_cluster)

    p = sub.add_parser("eigens", help="smallest normalized-Laplacian eigenvalues for the three kernels",
                       formatter_class=fmt)
    _add_input(p)
    _add_recipe(p)
    p.add_argument("--k", type=_positive_int, default=DEFAULT_EIGEN_COUNT, help="number of eigenvalues")
    p.add_argument("--output", help="CSV path (default: stdout)")
    p.set_defaults(func=cmd_eigens)

    p = sub.add_parser("compare", help="silhouette table: Old SC, Base-a SC, New SC vs HC", formatter_class=fmt)
    _add_input(p)
    p.add_argument("--counts", type=_int_list, required=True, help="cluster counts, e.g. 10,20,30")
    p.add_argument("--metrics", type=_metric_list, default=list(ALL_METRICS),
                   help="comma-separated distance metrics")
    p.add_argument("--a", type=_base, default=DEFAULT_BASE, help="exponential base for base-a kernels")
    p.add_argument("--K", type=_positive_int, default=DEFAULT_K_NEIGHBOR, help="neighbor rank for local scaling")
    p.add_argument("--sigma", type=_positive_float, default=None,
                   help="global bandwidth (default: half the median pairwise distance)")
    p.add_argument("--seed", type=int, default=0, help="k-means seed")
    p.add_argument("--restarts", type=_positive_int, default=DEFAULT_RESTARTS, help="k-means restarts")
    p.add_argument("--linkage", choices=LINKAGES, default=DEFAULT_LINKAGE, help="HC linkage")
    p.add_argument("--silhouette-metric", type=_metric, default=None,
                   help="distance for silhouettes (default: the row's own metric)")
    p.add_argument("--format", choices=["text", "csv"], default="text")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1,
                   help="parallel table cells")
    p.add_argument("--output", help="output path (default: stdout)")
    p.set_defaults(func=cmd_compare)

    p = sub.add_parser("verify", help="Cheeger bounds, Laplacian shrinkage and eigenvalue-ordering checks",
                       formatter_class=fmt)
    _add_input(p, required=False)
    _add_recipe(p)
    p.add_argument("--k", type=_positive_int, default=DEFAULT_EIGEN_COUNT,
                   help="eigenvalues compared in the ordering observation")
    p.add_argument("--seed", type=int, default=0, help="seed for random graphs and subsampling")
    p.add_argument("--graphs", type=_positive_int, default=50, help="random graphs for the Cheeger check")
    p.add_argument("--graph-size", type=int, default=12, choices=range(2, 21), metavar="N",
                   help="max vertices per random graph (2-20)")
    p.add_argument("--max-cheeger-n", type=int, default=16, choices=range(2, 21), metavar="N",
                   help="datasets larger than this are subsampled for brute-force conductance")
    p.add_argument("--output", help="report path (default: stdout)")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("synth", help="write a synthetic blob dataset, ground truth and schema",
                       formatter_class=fmt)
    p.add_argument("--n", type=int, default=300, help="number of points")
    p.add_argument("--clusters", type=int, default=3, help="number of blobs")
    p.add_argument("--dim", type=int, default=8, help="number of trait columns")
    p.add_argument("--spread", type=float, default=1.0, help="blob standard deviation")
    p.add_argument("--separation", type=float, default=10.0, help="minimum centroid distance")
    p.add_argument("--categorical", type=int, default=0, help="leading columns binned into ordinal labels")
    p.add_argument("--elongation", type=float, default=1.0, help="stretch along one random axis per blob")
    p.add_argument("--noise", type=float, default=0.0, help="fraction of uniform background points")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--output-dir", default=".")
    p.add_argument("--prefix", default="blobs")
    p.set_defaults(func=cmd_synth)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:  # usage errors, --help, --version
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except (UsageError, KTooLarge, InvalidLinkageMetric, SingleCluster, TooLarge) as exc:
        print(f"basesc {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except FileNotFoundError as exc:
        print(f"basesc {args.command}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except DataError as exc:
        print(f"basesc {args.command}: data error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DATA
    except NumericError as exc:
        print(f"basesc {args.command}: numeric failure: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except ValueError as exc:
        print(f"basesc {args.command}: usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
