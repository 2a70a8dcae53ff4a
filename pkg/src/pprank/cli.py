"""Command-line entry point: ``pprank {simulate,rank,ppgraph,msebench}``."""

from __future__ import annotations

import argparse
import csv
import glob
import logging
import sys
from dataclasses import replace
from pathlib import Path

from pprank._io import DatasetFormatError, read_dataset, write_trial_csv
from pprank.bench import DEFAULT_SIZES, MseBenchConfig, export_bench_csv, run_mse_bench
from pprank.datagen import foster_spec, simulate
from pprank.ppgraph import build_ppgraph, export_csv, render_svg
from pprank.ranking import DEFAULT_CELL_BUDGET, rank_features

log = logging.getLogger("pprank")

AXIS_FLAGS = {"prog": "prognostic", "pred": "predictive"}
ORDER_FLAGS = {"1": "first", "2": "second", "full": "full"}
ESTIMATOR_FLAGS = {"ml": "ml", "shrink": "shrinkage"}
MODELS = {"foster": foster_spec}


class CliError(Exception):
    pass


def _positive(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return value


def _bins(text):
    value = int(text)
    if value < 2:
        raise argparse.ArgumentTypeError("--bins must be >= 2")
    return value


def _sizes(text):
    try:
        sizes = tuple(int(s) for s in text.split(",") if s.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad size list {text!r}") from None
    if not sizes:
        raise argparse.ArgumentTypeError("empty size list")
    return sizes


def cmd_simulate(args) -> int:
    spec = replace(MODELS[args.model](), n=args.n)
    out = Path(args.out)
    if args.reps is None:
        targets = [(out, args.seed)]
    else:
        targets = [(out.with_name(f"{out.stem}_{r:03d}{out.suffix or '.csv'}"), args.seed + r) for r in range(args.reps)]
    for path, seed in targets:
        write_trial_csv(simulate(spec, seed), path)
        log.info("wrote %s (seed %d)", path, seed)
    return 0


def cmd_rank(args) -> int:
    dataset = read_dataset(args.data, args.bins)
    ranking = rank_features(
        dataset,
        AXIS_FLAGS[args.axis],
        ORDER_FLAGS[args.order],
        ESTIMATOR_FLAGS[args.estimator],
        cell_budget=args.cell_budget,
    )
    w = csv.writer(sys.stdout, lineterminator="\n")
    w.writerow(["rank", "feature", "score"])
    for e in ranking.entries:
        w.writerow([e.step, dataset.names[e.feature], f"{e.score:.12g}"])
    return 0


def cmd_ppgraph(args) -> int:
    files = sorted(glob.glob(args.data_glob))
    if not files:
        raise CliError(f"no files match {args.data_glob!r}")
    order = ORDER_FLAGS[args.order]
    estimator = ESTIMATOR_FLAGS[args.estimator]
    prog, pred = [], []
    names = None
    for path in files:
        dataset = read_dataset(path, args.bins)
        if names is None:
            names = dataset.names
        elif dataset.names != names:
            raise CliError(f"{path}: feature columns differ from {files[0]}")
        prog.append(rank_features(dataset, "prognostic", order, estimator, args.cell_budget))
        pred.append(rank_features(dataset, "predictive", order, estimator, args.cell_budget))
    if not 1 <= args.k <= len(names):
        raise CliError(f"--k must lie in [1, {len(names)}]")
    label = args.label or f"{order}-order, {estimator}, {len(files)} dataset(s)"
    graph = build_ppgraph(prog, pred, args.k, names, label)
    if args.svg:
        render_svg(graph, args.svg)
    if args.csv:
        export_csv(graph, args.csv)
    log.info("cutoff %.4f over %d features from %d file(s)", graph.cutoff, graph.p, len(files))
    return 0


def cmd_msebench(args) -> int:
    config = MseBenchConfig(
        cards=(2, 2, args.x_card), sizes=args.sizes, replicates=args.reps, seed=args.seed, kind=args.kind
    )
    result = run_mse_bench(config)
    export_bench_csv(result, args.csv)
    for row in result.rows:
        log.info("n=%d mse_ml=%.6g mse_shrinkage=%.6g", row.n, row.mse_ml, row.mse_shrinkage)
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="pprank", description=__doc__)
    parser.add_argument("-v", "--verbose", action="store_true")
    # -v is accepted after the subcommand too
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("-v", "--verbose", action="store_true", default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("simulate", parents=[common], help="write synthetic trial datasets")
    p.add_argument("--n", type=_positive, default=1000)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True)
    p.add_argument("--model", choices=sorted(MODELS), default="foster")
    p.add_argument("--reps", type=_positive, help="write REPS files suffixed _000, _001, ...")
    p.set_defaults(func=cmd_simulate)

    def ranking_flags(p):
        p.add_argument("--order", choices=list(ORDER_FLAGS), default="2")
        p.add_argument("--estimator", choices=list(ESTIMATOR_FLAGS), default="shrink")
        p.add_argument("--bins", type=_bins, help="equal-width bins for real-valued columns")
        p.add_argument("--cell-budget", type=_positive, default=DEFAULT_CELL_BUDGET)

    p = sub.add_parser("rank", parents=[common], help="rank the features of one dataset")
    p.add_argument("--data", required=True)
    p.add_argument("--axis", choices=list(AXIS_FLAGS), required=True)
    ranking_flags(p)
    p.set_defaults(func=cmd_rank)

    p = sub.add_parser("ppgraph", parents=[common], help="average rankings over datasets into a PP-graph")
    p.add_argument("--data-glob", required=True)
    p.add_argument("--k", type=_positive, default=3)
    ranking_flags(p)
    p.add_argument("--svg")
    p.add_argument("--csv")
    p.add_argument("--label")
    p.set_defaults(func=cmd_ppgraph)

    p = sub.add_parser("msebench", parents=[common], help="ML vs shrinkage MSE of I(T;Y|X) under the null")
    p.add_argument("--sizes", type=_sizes, default=DEFAULT_SIZES)
    p.add_argument("--reps", type=_positive, default=500)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--x-card", type=int, default=25)
    p.add_argument("--kind", choices=["dirichlet", "uniform"], default="dirichlet")
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_msebench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        return args.func(args)
    except (CliError, DatasetFormatError, ValueError, KeyError, OSError) as exc:
        print(f"pprank {args.command}: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
