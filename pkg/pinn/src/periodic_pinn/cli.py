"""Baseline training runner.

    periodic-pinn train --problem problem.toml --dumps DIR --epochs N
                        [--seed S] [--lr 1e-3] [--l 11] [--layers 3] [--width 30]
                        [--lambda-l1 0] [--frozen-m M] [--log out.csv]
                        [--results results.csv]

The dump directory must contain sample_points.csv, eval_points.csv and
meta.json as written by the solver package's `dump-points` command.
"""

from __future__ import annotations

import argparse
import json
import sys

from .data import read_meta, read_sample_dump
from .model import PeriodicNetConfig
from .problem import load_problem
from .train import train_and_evaluate, write_result_row


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="periodic-pinn", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)
    tr = sub.add_parser("train", help="train on a shared point dump")
    tr.add_argument("--problem", required=True, help="TOML problem table")
    tr.add_argument("--dumps", required=True, help="shared point dump directory")
    tr.add_argument("--epochs", type=int, required=True)
    tr.add_argument("--seed", type=int, default=0)
    tr.add_argument("--lr", type=float, default=1e-3)
    tr.add_argument("--l", type=int, default=11, help="periodic nodes per dimension")
    tr.add_argument("--layers", type=int, default=3)
    tr.add_argument("--width", type=int, default=30)
    tr.add_argument("--lambda-l1", dest="lambda_l1", type=float, default=0.0)
    tr.add_argument("--frozen-m", dest="frozen_m", type=int, default=None,
                    help="use fixed Fourier features with this frequency cap")
    tr.add_argument("--log", default=None, help="per-epoch loss CSV")
    tr.add_argument("--results", default=None, help="append a result row here")
    tr.set_defaults(func=cmd_train)
    return top


def cmd_train(args) -> int:
    problem = load_problem(args.problem)
    cfg = PeriodicNetConfig(d=problem.dimension, l=args.l, h=args.layers,
                            w=args.width, lambda_l1=args.lambda_l1,
                            frozen_features=args.frozen_m)
    report = train_and_evaluate(cfg, problem, args.dumps, epochs=args.epochs,
                                seed=args.seed, lr=args.lr, log_csv=args.log)
    meta = read_meta(args.dumps)
    if args.results:
        m = read_sample_dump(args.dumps)[0].shape[0]
        write_result_row(args.results, report, problem, m=m, run=meta.get("seed", 0))
    print(json.dumps(report, indent=2))
    return 0 if report["status"] == "ok" else 1


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
