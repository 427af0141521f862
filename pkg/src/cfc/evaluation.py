"""Error measurement and statistical aggregation.

Relative L2 errors are Monte Carlo estimates over M seeded uniform points
(default M = 10000) drawn from the evaluation stream, which is disjoint from
the collocation stream for the same seed.  Repeated runs aggregate through the
sample geometric mean and the corrected geometric standard deviation, i.e. the
ordinary mean and (ddof=1) standard deviation of the log errors.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .collocation import evaluation_points

DEFAULT_EVAL_POINTS = 10_000
DEFAULT_RUNS = 25
FAST_PROFILE_RUNS = 5

RESULT_FIELDS = ["example", "d", "m", "method", "run", "seed",
                 "iterations", "support_size", "rel_l2", "status"]
AGGREGATE_FIELDS = ["example", "d", "m", "method", "runs", "geo_mean", "geo_std"]


@dataclass(frozen=True)
class ErrorReport:
    relative_l2: float
    M: int
    seed: int
    runs: Optional[tuple] = None


def _as_values(obj, X: np.ndarray) -> np.ndarray:
    if hasattr(obj, "evaluate"):
        return np.asarray(obj.evaluate(X))
    if hasattr(obj, "value"):
        return np.asarray(obj.value(X))
    return np.asarray(obj(X))


def relative_l2_error(exact, approx, M: int = DEFAULT_EVAL_POINTS, seed: int = 0,
                      d: Optional[int] = None, points: Optional[np.ndarray] = None) -> ErrorReport:
    """Monte Carlo relative L2 error sqrt(sum |u - uh|^2 / sum |u|^2).

    ``exact`` and ``approx`` may be ExactSolution objects, SparseSolution
    objects or plain callables over (M, d) point arrays.  Points are drawn
    from the seeded evaluation stream unless given explicitly.
    """
    if M < 1:
        raise ValueError("M must be >= 1")
    if points is None:
        if d is None:
            raise ValueError("either d or explicit points are required")
        points = evaluation_points(M, d, seed)
    else:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        M = points.shape[0]
    u = _as_values(exact, points)
    uh = _as_values(approx, points)
    denom = float(np.sum(np.abs(u) ** 2))
    if denom == 0.0:
        raise ValueError("zero denominator: exact solution vanishes on the sample")
    err = math.sqrt(float(np.sum(np.abs(u - uh) ** 2)) / denom)
    return ErrorReport(relative_l2=err, M=M, seed=int(seed))


def geometric_stats(errors: Sequence[float]) -> dict:
    """Sample geometric mean and corrected geometric standard deviation."""
    errs = np.asarray(list(errors), dtype=float)
    if errs.size == 0:
        raise ValueError("empty error sequence")
    if np.any(errs <= 0):
        raise ValueError("geometric statistics need positive entries")
    logs = np.log(errs)
    geo_mean = float(np.exp(np.mean(logs)))
    if errs.size == 1:
        return {"geo_mean": geo_mean, "geo_std_corrected": 1.0}
    geo_std = float(np.exp(np.std(logs, ddof=1)))
    return {"geo_mean": geo_mean, "geo_std_corrected": geo_std}


def format_result_row(example, d, m, method, run, seed, iterations,
                      support_size, rel_l2, status) -> list:
    return [str(example), str(d), str(m), method, str(run), str(seed),
            str(iterations), str(support_size), repr(float(rel_l2)), status]


def write_csv(path, fields: Sequence[str], rows: Sequence[Sequence]) -> None:
    with open(path, "w") as fh:
        fh.write(",".join(fields) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")
