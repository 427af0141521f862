"""Config-driven experiment runner.

Subcommands
-----------
run          reproduce a convergence sweep as CSV tables (one row per (m, run)
             cell plus a geometric-mean aggregate table)
analyze      coefficient analysis report: Riesz constants, sufficient
             condition verdict, suggested tuning range, sample-complexity table
dump-points  write the shared sample/evaluation point dumps consumed by
             external baselines
version      build info and PRNG identity

Configs are TOML files with a [problem] table (dimension, rho, example,
optional diffusion = {a0, modes}) and, for `run`, an [experiment] table; see
configs/schema.toml for every key and default.  Exit codes: 0 success,
2 config error, 3 runtime cap or solver failure.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from . import PRNG_IDENTITY, __version__, analysis, evaluation, recovery
from .collocation import assemble, evaluation_points, sample_points, write_points_csv
from .multiindex import IndexSetTooLarge, enumerate_hyperbolic_cross
from .problem import ConfigError, problem_from_config
from .recovery import AdaptiveCaps, SrLassoConfig

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_RUNTIME = 3

CELL_SEED_STRIDE = 100_003  # cell seed = base + stride * m_index + run_index


def _load_config(path) -> dict:
    try:
        with open(path, "rb") as fh:
            return tomllib.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"malformed TOML in {path}: {exc}") from exc


def _experiment_table(cfg: dict) -> dict:
    if "experiment" not in cfg:
        raise ConfigError("config is missing the [experiment] table")
    exp = dict(cfg["experiment"])
    method = exp.get("method")
    if method not in ("omp", "lower_omp", "sr_lasso"):
        raise ConfigError("experiment.method must be omp, lower_omp or sr_lasso")
    m_values = exp.get("m_values")
    if not m_values or any(int(m) < 1 for m in m_values):
        raise ConfigError("experiment.m_values must be a nonempty list of positive ints")
    exp["m_values"] = [int(m) for m in m_values]
    exp["runs"] = int(exp.get("runs", evaluation.DEFAULT_RUNS))
    exp["base_seed"] = int(exp.get("base_seed", 0))
    exp["eval_points"] = int(exp.get("eval_points", evaluation.DEFAULT_EVAL_POINTS))
    return exp


def _run_cell(args):
    """One (m, run) cell; module-level so a worker pool can pickle it."""
    problem_cfg, exp, m, cell_seed, trace_path = args
    problem = problem_from_config(problem_cfg)
    if problem.exact is None:
        raise ConfigError("run requires a built-in example (1-3) for the error oracle")
    method = exp["method"]
    plan = sample_points(m, problem.dimension, cell_seed)
    if method == "lower_omp":
        caps_cfg = exp.get("max_support", "m/2")
        cap = m // 2 if caps_cfg == "m/2" else int(caps_cfg)
        sol = recovery.adaptive_lower_omp(problem, plan, K=int(exp.get("K", 100)),
                                          caps=AdaptiveCaps(max_support=cap),
                                          trace_path=trace_path)
    else:
        n = int(exp.get("n", 10))
        columns = enumerate_hyperbolic_cross(problem.dimension, n)
        system = assemble(problem, columns, plan)
        if method == "omp":
            sol = recovery.omp(system, K=int(exp.get("K", 10)), trace_path=trace_path)
        else:
            lam = exp.get("lambda", "auto")
            if lam == "auto":
                constants = analysis.riesz_constants(problem.a, problem.rho)
                s = int(exp.get("K", 10))
                lam = recovery.lambda_range(constants, s)[1] if constants.b_phi > 0 \
                    else 1.0 / math.sqrt(s)
            sol = recovery.sr_lasso(system, SrLassoConfig(lam=float(lam)))
    status = sol.status
    report = evaluation.relative_l2_error(problem.exact, sol, M=exp["eval_points"],
                                          seed=exp["base_seed"], d=problem.dimension)
    return (m, cell_seed, sol.iterations, len(sol.support), report.relative_l2, status)


def cmd_run(args) -> int:
    cfg = _load_config(args.config)
    if "problem" not in cfg:
        raise ConfigError("config is missing the [problem] table")
    problem_cfg = cfg["problem"]
    problem_from_config(problem_cfg)  # validate early
    exp = _experiment_table(cfg)
    if args.seed is not None:
        exp["base_seed"] = args.seed
    runs = exp["runs"]
    if args.profile == "fast":
        runs = min(runs, evaluation.FAST_PROFILE_RUNS)
    out_dir = Path(args.out or cfg.get("output", {}).get("directory", "out"))
    out_dir.mkdir(parents=True, exist_ok=True)

    example = problem_cfg.get("example", "custom")
    cells = []
    for mi, m in enumerate(exp["m_values"]):
        for run in range(runs):
            cell_seed = exp["base_seed"] + CELL_SEED_STRIDE * mi + run
            trace = str(out_dir / f"trace_m{m}_run{run}.csv") if args.trace else None
            cells.append((problem_cfg, exp, m, cell_seed, trace))

    if args.jobs > 1:
        with ProcessPoolExecutor(max_workers=args.jobs) as pool:
            outcomes = list(pool.map(_run_cell, cells))
    else:
        outcomes = [_run_cell(c) for c in cells]

    rows = []
    per_m = {}
    for m, seed, iters, supp, rel, status in outcomes:
        run = (seed - exp["base_seed"]) % CELL_SEED_STRIDE
        rows.append(evaluation.format_result_row(example, problem_cfg["dimension"], m,
                                                 exp["method"], run, seed, iters, supp,
                                                 rel, status))
        per_m.setdefault(m, []).append(rel)
    evaluation.write_csv(out_dir / "results.csv", evaluation.RESULT_FIELDS, rows)

    agg_rows = []
    for m in exp["m_values"]:
        stats = evaluation.geometric_stats(per_m[m])
        agg_rows.append([example, problem_cfg["dimension"], m, exp["method"],
                         runs, repr(stats["geo_mean"]), repr(stats["geo_std_corrected"])])
    evaluation.write_csv(out_dir / "aggregate.csv", evaluation.AGGREGATE_FIELDS, agg_rows)
    print(f"wrote {out_dir / 'results.csv'} ({len(rows)} rows)")
    bad = [r for r in rows if r[-1] not in ("ok", "converged")]
    if bad:
        print(f"{len(bad)} cell(s) ended in a non-ok status (rows emitted)",
              file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


def coefficient_report(a, rho, s_values=(5, 10, 20), eps_values=(0.1, 0.01),
                       n: int = 10, d: int | None = None, c0: float = 1.0) -> dict:
    constants = analysis.riesz_constants(a, rho)
    d = d if d is not None else a.dimension
    report = {
        "a0": a.a0,
        "rho": rho,
        "num_modes": constants.num_modes,
        "beta": constants.beta,
        "b_phi": constants.b_phi,
        "B_phi": constants.B_phi,
        "K_phi": constants.K_phi,
        "condition_satisfied": constants.condition_satisfied,
        "margin": constants.margin,
    }
    if constants.b_phi > 0:
        report["lambda_range"] = {str(s): recovery.lambda_range(constants, s)[1]
                                  for s in s_values}
        report["sample_complexity"] = {
            f"s={s},eps={eps}": analysis.sample_complexity(constants, s, n, d, eps, c0)
            for s in s_values for eps in eps_values
        }
    else:
        report["lambda_range"] = None
        report["sample_complexity"] = None
    return report


def cmd_analyze(args) -> int:
    cfg = _load_config(args.config)
    if "problem" not in cfg:
        raise ConfigError("config is missing the [problem] table")
    problem = problem_from_config(cfg["problem"])
    report = coefficient_report(problem.a, problem.rho)
    text = json.dumps(report, indent=2)
    if args.out:
        Path(args.out).write_text(text + "\n")
    print(text)
    return EXIT_OK


def cmd_dump_points(args) -> int:
    cfg = _load_config(args.config)
    if "problem" not in cfg:
        raise ConfigError("config is missing the [problem] table")
    problem = problem_from_config(cfg["problem"])
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)
    plan = sample_points(args.m, problem.dimension, args.seed)
    f_vals = problem.forcing(plan.points)
    write_points_csv(out_dir / "sample_points.csv", plan.points, f_vals, label="f")
    meta = {"d": problem.dimension, "rho": problem.rho, "m": args.m,
            "seed": args.seed, "eval_m": args.eval_m, "prng": PRNG_IDENTITY,
            "example": cfg["problem"].get("example", "custom")}
    if args.eval_m > 0:
        if problem.exact is None:
            raise ConfigError("evaluation dump needs a built-in example with an exact solution")
        eval_pts = evaluation_points(args.eval_m, problem.dimension, args.seed)
        u_vals = problem.exact.value(eval_pts)
        write_points_csv(out_dir / "eval_points.csv", eval_pts, u_vals, label="u")
    (out_dir / "meta.json").write_text(json.dumps(meta, indent=2) + "\n")
    print(f"wrote point dumps to {out_dir}")
    return EXIT_OK


def cmd_version(_args) -> int:
    print(f"cfc {__version__}")
    print(f"prng: {PRNG_IDENTITY}")
    print(f"numpy {np.__version__}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    top = argparse.ArgumentParser(prog="cfc", description=__doc__,
                                  formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = top.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="run a configured experiment sweep")
    run.add_argument("--config", required=True)
    run.add_argument("--profile", choices=("fast", "paper"), default="fast",
                     help="fast caps runs at 5; paper uses the configured count")
    run.add_argument("--seed", type=int, default=None, help="override the base seed")
    run.add_argument("--out", default=None, help="output directory")
    run.add_argument("--trace", action="store_true", help="stream solver traces to CSV")
    run.add_argument("--jobs", type=int, default=1, help="worker pool size for cells")
    run.set_defaults(func=cmd_run)

    an = sub.add_parser("analyze", aliases=["analyze-coefficient"],
                        help="coefficient analysis report")
    an.add_argument("--config", required=True)
    an.add_argument("--out", default=None, help="also write the JSON report here")
    an.set_defaults(func=cmd_analyze)

    dp = sub.add_parser("dump-points", help="write shared point dumps")
    dp.add_argument("--config", required=True)
    dp.add_argument("--m", type=int, required=True, help="number of sample points")
    dp.add_argument("--seed", type=int, default=0)
    dp.add_argument("--eval-m", dest="eval_m", type=int, default=evaluation.DEFAULT_EVAL_POINTS)
    dp.add_argument("--out", required=True)
    dp.set_defaults(func=cmd_dump_points)

    ver = sub.add_parser("version", help="print build info and PRNG identity")
    ver.set_defaults(func=cmd_version)
    return top


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except IndexSetTooLarge as exc:
        print(f"cap exceeded: {exc}", file=sys.stderr)
        return EXIT_RUNTIME


if __name__ == "__main__":
    sys.exit(main())
