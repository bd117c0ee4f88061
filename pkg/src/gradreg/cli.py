"""Command-line entry point: run experiments, sweeps, fits and verification."""

from __future__ import annotations

import argparse
import dataclasses
import sys

from .errors import GradRegError
from .harness import (
    fit_rate_from_summary,
    load_config,
    plot_summary,
    run_experiment,
    sweep,
    write_outputs,
)
from .problems import generate
from .suites import SUITES, run_suite


def _add_common(parser):
    parser.add_argument("--seed", type=int, default=None, help="override the config base seed")
    parser.add_argument("--replicates", type=int, default=None, help="override the replicate count")
    parser.add_argument("--out-dir", default="out", help="output directory for CSV files")
    parser.add_argument("--threads", type=int, default=1, help="worker threads for replicates")
    parser.add_argument("--plot", action="store_true", help="also render a summary line chart")


def _apply_overrides(config, args):
    updates = {}
    if args.seed is not None:
        updates["seed"] = args.seed
    if args.replicates is not None:
        updates["replicates"] = args.replicates
    return dataclasses.replace(config, **updates) if updates else config


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gradreg",
        description="Stochastic nonsmooth convex optimization experiments and verification",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_run = sub.add_parser("run", help="run one experiment from a config file")
    p_run.add_argument("config")
    _add_common(p_run)

    p_sweep = sub.add_parser("sweep", help="run an experiment over several call budgets")
    p_sweep.add_argument("config")
    p_sweep.add_argument("--budgets", type=int, nargs="+", required=True,
                         help="total oracle-call budgets")
    _add_common(p_sweep)

    p_verify = sub.add_parser("verify", help="run a named verification suite")
    p_verify.add_argument("suite", choices=sorted(SUITES))

    p_fit = sub.add_parser("fit", help="fit a convergence rate to a summary CSV")
    p_fit.add_argument("summary")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "run":
            config = _apply_overrides(load_config(args.config), args)
            result = run_experiment(config, out_dir=args.out_dir, threads=args.threads)
            print(f"wrote {args.out_dir}/records.csv and summary.csv "
                  f"({config.replicates} replicates, {result.summary_row[1]} oracle calls)")
            if args.plot:
                plot_summary([result], f"{args.out_dir}/summary.png")
                print(f"wrote {args.out_dir}/summary.png")
            return 0
        if args.command == "sweep":
            config = _apply_overrides(load_config(args.config), args)
            results = sweep(config, args.budgets, out_dir=args.out_dir, threads=args.threads)
            problem = generate(config.problem.kind, config.problem.dimension,
                               config.problem.seed, config.problem.params)
            write_outputs(args.out_dir, results, problem)
            for res in results:
                _, budget, mean_grad, se, gap = res.summary_row
                extras = "" if mean_grad is None else f" mean_grad={mean_grad:.6g}"
                print(f"{res.experiment_id}: budget={budget}{extras}")
            if args.plot:
                plot_summary(results, f"{args.out_dir}/summary.png")
                print(f"wrote {args.out_dir}/summary.png")
            return 0
        if args.command == "verify":
            report = run_suite(args.suite)
            for line in report.lines():
                print(line)
            return 0 if report.passed else 1
        fit = fit_rate_from_summary(args.summary)
        print(f"slope {fit.slope:.6f} +/- {fit.slope_halfwidth:.6f} (se {fit.slope_se:.6f})")
        print(f"intercept {fit.intercept:.6f} (se {fit.intercept_se:.6f}), {fit.n_points} points")
        return 0
    except GradRegError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
