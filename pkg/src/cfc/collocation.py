"""Random collocation sampling and assembly of the collocation linear system.

Sampling uses numpy's Philox generator, a counter-based 64-bit PRNG, keyed by
(seed, stream) so the collocation stream and the error-evaluation stream never
overlap for the same seed.  The assembled system is

    A[i, j] = (1/sqrt(m)) * L[Psi_{nu_j}](x_i),      b[i] = (1/sqrt(m)) f(x_i),

with columns ordered canonically and reproducible bit-for-bit from
(seed, m, d).  Column l2-normalization is deliberately not applied here; it is
a recovery-side transform.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .basis import operator_columns
from .problem import ProblemSpec

SAMPLE_STREAM = 0x636F6C6C  # collocation points
EVAL_STREAM = 0x6576616C    # Monte Carlo error points

_MAGIC = b"CFCSYS1\x00"


def _rng(seed: int, stream: int) -> np.random.Generator:
    key = [np.uint64(int(seed) & 0xFFFFFFFFFFFFFFFF), np.uint64(stream)]
    return np.random.Generator(np.random.Philox(key=key))


@dataclass(frozen=True)
class SamplePlan:
    """m i.i.d. uniform points on [0,1)^d, regenerable from (seed, m, d)."""

    points: np.ndarray
    seed: int
    m: int
    d: int

    def __post_init__(self):
        pts = np.asarray(self.points, dtype=float)
        if pts.shape != (self.m, self.d):
            raise ValueError("points shape does not match (m, d)")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)


def sample_points(m: int, d: int, seed: int) -> SamplePlan:
    """Draw the seeded collocation sample plan."""
    if m < 1 or d < 1:
        raise ValueError("m and d must be positive")
    pts = _rng(seed, SAMPLE_STREAM).random((m, d))
    return SamplePlan(points=pts, seed=int(seed), m=m, d=d)


def evaluation_points(M: int, d: int, seed: int) -> np.ndarray:
    """Seeded uniform points from the evaluation stream (disjoint from sampling)."""
    if M < 1 or d < 1:
        raise ValueError("M and d must be positive")
    return _rng(seed, EVAL_STREAM).random((M, d))


@dataclass(frozen=True, eq=False)
class CollocationSystem:
    """Dense collocation system A z = b over an ordered column index list."""

    matrix: np.ndarray
    rhs: np.ndarray
    columns: tuple
    plan: SamplePlan
    problem: Optional[ProblemSpec] = None

    def __post_init__(self):
        if self.matrix.shape != (self.plan.m, len(self.columns)):
            raise ValueError("matrix shape does not match plan and columns")
        if len(set(self.columns)) != len(self.columns):
            raise ValueError("duplicate columns")
        self.matrix.setflags(write=False)
        self.rhs.setflags(write=False)

    def column_position(self, nu) -> int:
        return self.columns.index(tuple(nu))


def assemble(problem: ProblemSpec, columns: Sequence, plan: SamplePlan) -> CollocationSystem:
    """Assemble the collocation matrix and right-hand side on a sample plan."""
    if problem.dimension != plan.d:
        raise ValueError("problem and sample plan dimensions disagree")
    cols = tuple(tuple(int(v) for v in nu) for nu in columns)
    for nu in cols:
        if len(nu) != plan.d:
            raise ValueError(f"column index {nu} does not match dimension {plan.d}")
    scale = 1.0 / np.sqrt(plan.m)
    if cols:
        A = operator_columns(problem.a, problem.rho, cols, plan.points) * scale
    else:
        A = np.zeros((plan.m, 0), dtype=np.complex128)
    b = np.asarray(problem.forcing(plan.points), dtype=np.complex128) * scale
    return CollocationSystem(matrix=A, rhs=b, columns=cols, plan=plan, problem=problem)


def extend_columns(system: CollocationSystem, new: Sequence) -> CollocationSystem:
    """Append freshly assembled columns on the same plan; existing entries unchanged."""
    new_cols = tuple(tuple(int(v) for v in nu) for nu in new)
    if not new_cols:
        return system
    overlap = set(new_cols) & set(system.columns)
    if overlap or len(set(new_cols)) != len(new_cols):
        raise ValueError(f"duplicate columns in extension: {sorted(overlap) or new_cols}")
    if system.problem is None:
        raise ValueError("system was built without a problem reference")
    scale = 1.0 / np.sqrt(system.plan.m)
    block = operator_columns(system.problem.a, system.problem.rho, new_cols,
                             system.plan.points) * scale
    return CollocationSystem(matrix=np.hstack([system.matrix, block]),
                             rhs=system.rhs.copy(),
                             columns=system.columns + new_cols,
                             plan=system.plan,
                             problem=system.problem)


def save_system(system: CollocationSystem, path) -> None:
    """Binary dump of (A, b, columns, points, seed).

    Layout (all little-endian): magic ``CFCSYS1\\0``; u64 m, N, d; i64 seed;
    i64 columns row-major (N*d); f64 points row-major (m*d); complex128 A
    row-major (m*N, interleaved re/im); complex128 b (m).
    """
    m, N = system.matrix.shape
    d = system.plan.d
    with open(path, "wb") as fh:
        fh.write(_MAGIC)
        fh.write(struct.pack("<QQQq", m, N, d, system.plan.seed))
        fh.write(np.asarray(system.columns, dtype="<i8").tobytes())
        fh.write(np.asarray(system.plan.points, dtype="<f8").tobytes())
        fh.write(np.ascontiguousarray(system.matrix, dtype="<c16").tobytes())
        fh.write(np.ascontiguousarray(system.rhs, dtype="<c16").tobytes())


def load_system(path) -> CollocationSystem:
    """Read a system written by :func:`save_system` (problem reference not restored)."""
    with open(path, "rb") as fh:
        if fh.read(8) != _MAGIC:
            raise ValueError("not a collocation system dump")
        m, N, d, seed = struct.unpack("<QQQq", fh.read(32))
        cols = np.frombuffer(fh.read(8 * N * d), dtype="<i8").reshape(N, d)
        pts = np.frombuffer(fh.read(8 * m * d), dtype="<f8").reshape(m, d).copy()
        A = np.frombuffer(fh.read(16 * m * N), dtype="<c16").reshape(m, N).copy()
        b = np.frombuffer(fh.read(16 * m), dtype="<c16").copy()
    plan = SamplePlan(points=pts, seed=int(seed), m=int(m), d=int(d))
    columns = tuple(tuple(int(v) for v in row) for row in cols)
    return CollocationSystem(matrix=A, rhs=b, columns=columns, plan=plan, problem=None)


def write_points_csv(path, points: np.ndarray, values: np.ndarray | None = None,
                     label: str = "f") -> None:
    """Point dump shared with external consumers: x1..xd[,label] per row."""
    points = np.atleast_2d(np.asarray(points, dtype=float))
    d = points.shape[1]
    header = ",".join(f"x{k + 1}" for k in range(d))
    if values is not None:
        header += f",{label}"
    with open(path, "w") as fh:
        fh.write(header + "\n")
        for i in range(points.shape[0]):
            row = ",".join(repr(float(v)) for v in points[i])
            if values is not None:
                row += f",{float(values[i])!r}"
            fh.write(row + "\n")


def read_points_csv(path) -> tuple:
    """Inverse of :func:`write_points_csv`; returns (points, values_or_None)."""
    with open(path) as fh:
        header = fh.readline().strip().split(",")
        data = np.loadtxt(fh, delimiter=",", ndmin=2)
    n_coords = sum(1 for h in header if h.startswith("x"))
    points = data[:, :n_coords]
    values = data[:, n_coords] if len(header) > n_coords else None
    return points, values
