"""Sparse recovery engines for the collocation system.

Four solvers share one output type: restricted least squares, classical OMP on
a fixed column set, adaptive lower OMP (greedy selection restricted to the
reduced margin of a growing lower set, adding whole reflection families), and
the square-root LASSO  min ||Az - b||_2 + lambda ||z||_1  via a primal-dual
splitting that keeps the l2 data term exact.

Greedy refits run over l2-normalized columns through an incrementally updated
thin QR factorization; reported coefficients are always de-normalized back to
the rescaled-basis scale.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import scipy.linalg

from .analysis import RieszConstants
from .basis import operator_columns, rescale_factor, synthesize_many
from .collocation import CollocationSystem, SamplePlan
from .multiindex import AdaptiveIndexSet, IndexSet, reflection_family
from .problem import ProblemSpec

RESIDUAL_FLOOR = 1e-14  # early halt when ||r|| <= RESIDUAL_FLOOR * (1 + ||b||)
TIE_REL_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class SparseSolution:
    """Recovered coefficients keyed by multi-index, in the rescaled basis.

    ``residual_history[n]`` is the exact l2 residual of the n-th iterate
    (entry 0 belongs to the zero initial iterate).  ``status`` is one of
    "ok", "converged", "stalled", "support_cap", "rank_deficient", "max_iter".
    """

    coefficients: dict
    support: IndexSet
    residual_history: list
    iterations: int
    status: str = "ok"
    rho: Optional[float] = None
    a0: Optional[float] = None
    objective: Optional[float] = None
    objective_history: Optional[list] = None
    iterate_sets: Optional[list] = None

    def evaluate(self, X: np.ndarray) -> np.ndarray:
        """Synthesized approximation sum c_nu Psi_nu at points X."""
        if self.rho is None or self.a0 is None:
            raise ValueError("solution carries no rescaling data")
        return synthesize_many(self.coefficients, X, rescaled=True,
                               rho=self.rho, a0=self.a0)

    def fourier_coefficients(self) -> dict:
        """Coefficients with respect to the raw Fourier system."""
        return {nu: c * rescale_factor(nu, self.rho, self.a0)
                for nu, c in self.coefficients.items()}


@dataclass(frozen=True)
class SrLassoConfig:
    """Tuning for the square-root LASSO solver."""

    lam: float
    tol: float = 1e-9
    max_iter: int = 100_000

    def __post_init__(self):
        if self.lam < 0:
            raise ValueError("lambda must be nonnegative")
        if self.tol <= 0 or self.max_iter < 1:
            raise ValueError("tol must be positive and max_iter >= 1")


class _IncrementalQR:
    """Thin QR of a growing column block, with two-pass reorthogonalization."""

    def __init__(self, m: int):
        self.m = m
        self.Q = np.zeros((m, 0), dtype=np.complex128)
        self.R = np.zeros((0, 0), dtype=np.complex128)
        self.rank_deficient = False

    @property
    def k(self) -> int:
        return self.Q.shape[1]

    def append(self, cols: np.ndarray) -> np.ndarray:
        """Append columns; returns the orthonormal complement block Q2."""
        C = np.asarray(cols, dtype=np.complex128)
        if C.ndim == 1:
            C = C[:, None]
        norms = np.linalg.norm(C, axis=0)
        S = self.Q.conj().T @ C
        C1 = C - self.Q @ S
        S2 = self.Q.conj().T @ C1
        C1 -= self.Q @ S2
        S += S2
        Q2, R2 = np.linalg.qr(C1)
        if np.any(np.abs(np.diag(R2)) <= 1e-10 * np.maximum(norms, 1e-300)):
            self.rank_deficient = True
        k, j = self.k, C.shape[1]
        R_new = np.zeros((k + j, k + j), dtype=np.complex128)
        R_new[:k, :k] = self.R
        R_new[:k, k:] = S
        R_new[k:, k:] = R2
        self.Q = np.hstack([self.Q, Q2])
        self.R = R_new
        return Q2

    def solve(self, qtb: np.ndarray) -> np.ndarray:
        return scipy.linalg.solve_triangular(self.R, qtb, lower=False)


def _solution_from_vector(columns, z, d_factors, history, iterations, status,
                          problem: Optional[ProblemSpec]) -> SparseSolution:
    coeffs = {}
    for nu, zz, dd in zip(columns, z, d_factors):
        c = zz * dd
        if c != 0:
            coeffs[nu] = complex(c)
    dim = len(columns[0]) if columns else (problem.dimension if problem else 1)
    support = IndexSet.from_indices(coeffs.keys(), dimension=dim)
    rho = problem.rho if problem is not None else None
    a0 = problem.a.a0 if problem is not None else None
    return SparseSolution(coefficients=coeffs, support=support,
                          residual_history=[float(h) for h in history],
                          iterations=iterations, status=status, rho=rho, a0=a0)


def least_squares_on_support(system: CollocationSystem, support) -> SparseSolution:
    """Minimum-norm least squares over the columns listed in ``support``.

    Uses a rank-revealing factorization (LAPACK gelsd); rank deficiency is
    reported through the solution status rather than an exception.
    """
    sup = [tuple(int(v) for v in nu) for nu in support]
    missing = [nu for nu in sup if nu not in set(system.columns)]
    if missing:
        raise ValueError(f"support indices not among system columns: {missing[:3]}")
    b = system.rhs
    if not sup:
        resid = float(np.linalg.norm(b))
        dim = system.plan.d
        return SparseSolution(coefficients={}, support=IndexSet.empty(dim),
                              residual_history=[resid], iterations=0, status="ok",
                              rho=system.problem.rho if system.problem else None,
                              a0=system.problem.a.a0 if system.problem else None)
    col_pos = {nu: i for i, nu in enumerate(system.columns)}
    positions = [col_pos[nu] for nu in sup]
    A = system.matrix[:, positions]
    z, _, rank, _ = scipy.linalg.lstsq(A, b, lapack_driver="gelsd")
    status = "ok" if rank == len(sup) else "rank_deficient"
    resid = float(np.linalg.norm(b - A @ z))
    return _solution_from_vector(sup, z, np.ones(len(sup)), [resid], 0, status,
                                 system.problem)


def _argmax_with_ties(values: np.ndarray, candidates, order_key) -> int:
    """Position of the maximum; ties within TIE_REL_TOL go to canonical order."""
    best = float(np.max(values))
    tied = [i for i, v in enumerate(values) if v >= best * (1.0 - TIE_REL_TOL)]
    return min(tied, key=lambda i: order_key(candidates[i]))


def omp(system: CollocationSystem, K: int, trace_path=None) -> SparseSolution:
    """Classical OMP: K greedy picks over all l2-normalized columns.

    Each iteration refits by least squares on the selected set; the returned
    coefficients are de-normalized.  Halts early once the residual falls to
    RESIDUAL_FLOOR * (1 + ||b||).
    """
    m, N = system.matrix.shape
    if not (1 <= K <= min(m, N)):
        raise ValueError("K must satisfy 1 <= K <= min(m, N)")
    col_norms = np.linalg.norm(system.matrix, axis=0)
    if np.any(col_norms == 0):
        raise ValueError("zero column in system")
    d_factors = 1.0 / col_norms
    An = system.matrix * d_factors[None, :]
    b = system.rhs
    floor = RESIDUAL_FLOOR * (1.0 + float(np.linalg.norm(b)))

    qr = _IncrementalQR(m)
    qtb = np.zeros(0, dtype=np.complex128)
    r = b.copy()
    history = [float(np.linalg.norm(b))]
    selected: list = []
    selected_mask = np.zeros(N, dtype=bool)
    status = "ok"
    trace = _TraceWriter(trace_path)
    for n in range(K):
        if history[-1] <= floor:
            status = "converged"
            break
        corr = np.abs(An.conj().T @ r)
        corr[selected_mask] = -1.0
        j = _argmax_with_ties(corr, list(range(N)), lambda i: system.columns[i])
        selected.append(j)
        selected_mask[j] = True
        Q2 = qr.append(An[:, [j]])
        qtb = np.concatenate([qtb, Q2.conj().T @ b])
        r = r - Q2 @ (Q2.conj().T @ r)
        history.append(float(np.linalg.norm(r)))
        trace.write(n, len(selected), history[-1], system.columns[j])
    trace.close()
    if selected:
        z = qr.solve(qtb)
        if qr.rank_deficient:
            A_sel = An[:, selected]
            z, _, _, _ = scipy.linalg.lstsq(A_sel, b, lapack_driver="gelsd")
            status = "rank_deficient"
    else:
        z = np.zeros(0, dtype=np.complex128)
    cols = [system.columns[j] for j in selected]
    return _solution_from_vector(cols, z, d_factors[selected] if selected else [],
                                 history, len(selected), status, system.problem)


@dataclass(frozen=True)
class AdaptiveCaps:
    """Stopping caps for adaptive recovery; max_support mirrors the m/2 rule."""

    max_support: int = 10_000


class _TraceWriter:
    def __init__(self, path):
        self._fh = open(path, "w", newline="") if path else None
        self._writer = None
        if self._fh:
            self._writer = csv.writer(self._fh)
            self._writer.writerow(["iteration", "support_size", "residual", "selected_index"])

    def write(self, iteration, support_size, residual, selected):
        if self._writer:
            self._writer.writerow([iteration, support_size, repr(float(residual)),
                                   " ".join(str(v) for v in selected)])

    def close(self):
        if self._fh:
            self._fh.close()


class _ColumnCache:
    """Append-only store of l2-normalized operator columns.

    Storage grows by capacity doubling so repeated margin extensions cost
    amortized O(1) copies per column.
    """

    def __init__(self, problem: ProblemSpec, plan: SamplePlan):
        self.problem = problem
        self.plan = plan
        self.scale = 1.0 / math.sqrt(plan.m)
        self.pos: dict = {}
        self.order: list = []
        self._buf = np.zeros((plan.m, 16), dtype=np.complex128)
        self._dbuf = np.zeros(16)
        self._n = 0

    @property
    def matrix(self) -> np.ndarray:
        return self._buf[:, :self._n]

    @property
    def d_factors(self) -> np.ndarray:
        return self._dbuf[:self._n]

    def ensure(self, indices) -> None:
        new = [nu for nu in indices if nu not in self.pos]
        if not new:
            return
        block = operator_columns(self.problem.a, self.problem.rho, new,
                                 self.plan.points) * self.scale
        norms = np.linalg.norm(block, axis=0)
        d_new = 1.0 / norms
        block *= d_new[None, :]
        needed = self._n + len(new)
        if needed > self._buf.shape[1]:
            cap = max(needed, 2 * self._buf.shape[1])
            grown = np.zeros((self.plan.m, cap), dtype=np.complex128)
            grown[:, :self._n] = self._buf[:, :self._n]
            self._buf = grown
            dgrown = np.zeros(cap)
            dgrown[:self._n] = self._dbuf[:self._n]
            self._dbuf = dgrown
        self._buf[:, self._n:needed] = block
        self._dbuf[self._n:needed] = d_new
        for i, nu in enumerate(new):
            self.pos[nu] = self._n + i
        self.order.extend(new)
        self._n = needed

    def columns(self, indices) -> np.ndarray:
        return self._buf[:, [self.pos[nu] for nu in indices]]


def adaptive_lower_omp(problem: ProblemSpec, plan: SamplePlan, K: int,
                       caps: AdaptiveCaps = AdaptiveCaps(), trace_path=None,
                       keep_iterates: bool = False) -> SparseSolution:
    """Adaptive lower OMP: greedy margin selection with reflection families.

    Per iteration: assemble the columns for the reduced margin of the current
    lower set, l2-normalize the new ones, pick the margin index with the
    largest residual correlation, add its whole reflection family, and refit
    by least squares on the enlarged support.  The support set is lower (and
    hence reflection-symmetric) at every step.

    Stops early with status "support_cap" when the next family would push the
    support past ``caps.max_support``, with "stalled" when the margin carries
    zero correlation, and with "converged" once the residual hits the floor.
    """
    if K < 1:
        raise ValueError("K must be >= 1")
    if problem.dimension != plan.d:
        raise ValueError("problem and plan dimensions disagree")
    b = np.asarray(problem.forcing(plan.points), dtype=np.complex128) / math.sqrt(plan.m)
    floor = RESIDUAL_FLOOR * (1.0 + float(np.linalg.norm(b)))

    lam = AdaptiveIndexSet(plan.d)
    cache = _ColumnCache(problem, plan)
    qr = _IncrementalQR(plan.m)
    qtb = np.zeros(0, dtype=np.complex128)
    r = b.copy()
    history = [float(np.linalg.norm(b))]
    support_order: list = []
    status = "ok"
    iterates = [] if keep_iterates else None
    trace = _TraceWriter(trace_path)

    for n in range(K):
        if history[-1] <= floor:
            status = "converged"
            break
        margin = lam.margin_ordered()
        cache.ensure(margin)
        corr_all = np.abs(cache.matrix.conj().T @ r)
        margin_pos = [cache.pos[nu] for nu in margin]
        corr = corr_all[margin_pos]
        if float(np.max(corr)) == 0.0:
            status = "stalled"
            break
        pick = margin[_argmax_with_ties(corr, margin, lambda nu: nu)]
        family_new = [mu for mu in reflection_family(pick) if mu not in lam.members]
        if len(lam.members) + len(family_new) > caps.max_support:
            status = "support_cap"
            break
        added = lam.add_reflection_family(pick)
        cache.ensure(added)
        support_order.extend(added)
        Q2 = qr.append(cache.columns(added))
        new_qtb = Q2.conj().T @ b
        qtb = np.concatenate([qtb, new_qtb])
        r = r - Q2 @ new_qtb
        history.append(float(np.linalg.norm(r)))
        if iterates is not None:
            iterates.append(lam.as_index_set())
        trace.write(n, len(lam.members), history[-1], pick)
    trace.close()

    iterations = len(history) - 1
    if support_order:
        z = qr.solve(qtb)
        if qr.rank_deficient:
            z, _, _, _ = scipy.linalg.lstsq(cache.columns(support_order), b,
                                            lapack_driver="gelsd")
            status = "rank_deficient"
        d_sel = cache.d_factors[[cache.pos[nu] for nu in support_order]]
    else:
        z = np.zeros(0, dtype=np.complex128)
        d_sel = np.zeros(0)
    sol = _solution_from_vector(support_order, z, d_sel, history, iterations,
                                status, problem)
    if iterates is not None:
        object.__setattr__(sol, "iterate_sets", iterates)
    return sol


def _soft_threshold(z: np.ndarray, t: float) -> np.ndarray:
    mag = np.abs(z)
    with np.errstate(divide="ignore", invalid="ignore"):
        scale = np.where(mag > t, 1.0 - t / np.where(mag > 0, mag, 1.0), 0.0)
    return z * scale


def _operator_norm(A: np.ndarray, iters: int = 60, seed: int = 0) -> float:
    rng = np.random.default_rng(seed)
    v = rng.standard_normal(A.shape[1]) + 1j * rng.standard_normal(A.shape[1])
    v /= np.linalg.norm(v)
    est = 0.0
    for _ in range(iters):
        w = A.conj().T @ (A @ v)
        nw = float(np.linalg.norm(w))
        if nw == 0.0:
            return 0.0
        est = math.sqrt(nw)
        v = w / nw
    return est


def sr_lasso(system: CollocationSystem, cfg: SrLassoConfig) -> SparseSolution:
    """Square-root LASSO  min ||Az - b||_2 + lambda ||z||_1.

    Primal-dual (Chambolle-Pock) iteration with the data norm handled exactly
    through its dual ball; soft-thresholding shrinks moduli and keeps phases.
    The reported iterate sequence is the best-objective-so-far sequence, so
    the objective history is non-increasing by construction.  Stops when the
    primal-dual gap drops below tol * (1 + objective); hitting max_iter is
    reported through the status, not an exception.
    """
    A = system.matrix
    b = system.rhs
    m, N = A.shape
    lam = cfg.lam
    L = _operator_norm(A)
    norm_b = float(np.linalg.norm(b))

    x = np.zeros(N, dtype=np.complex128)
    best_x = x.copy()
    best_obj = norm_b
    best_res = norm_b
    obj_history = [best_obj]
    res_history = [best_res]
    status = "max_iter"
    if L == 0.0 or norm_b == 0.0:
        status = "converged"
        iterations = 0
    else:
        tau = sigma = 0.99 / L
        y = np.zeros(m, dtype=np.complex128)
        xbar = x.copy()
        check_every = 25
        iterations = cfg.max_iter
        for k in range(1, cfg.max_iter + 1):
            v = y + sigma * (A @ xbar - b)
            nv = float(np.linalg.norm(v))
            y = v if nv <= 1.0 else v / nv
            Aty = A.conj().T @ y
            x_new = _soft_threshold(x - tau * Aty, tau * lam)
            xbar = 2.0 * x_new - x
            x = x_new
            if k % check_every == 0 or k == cfg.max_iter:
                res = float(np.linalg.norm(A @ x - b))
                obj = res + lam * float(np.sum(np.abs(x)))
                if obj < best_obj:
                    best_obj, best_res = obj, res
                    best_x = x.copy()
                obj_history.append(best_obj)
                res_history.append(best_res)
                denom = float(np.max(np.abs(Aty))) / lam if lam > 0 else math.inf
                y_feas = y / max(1.0, denom)
                dual = -float(np.real(np.vdot(y_feas, b)))
                gap = best_obj - dual
                if gap <= cfg.tol * (1.0 + abs(best_obj)):
                    status = "converged"
                    iterations = k
                    break

    coeffs = {nu: complex(c) for nu, c in zip(system.columns, best_x) if c != 0}
    dim = system.plan.d
    support = IndexSet.from_indices(coeffs.keys(), dimension=dim) if coeffs \
        else IndexSet.empty(dim)
    return SparseSolution(coefficients=coeffs, support=support,
                          residual_history=[float(v) for v in res_history],
                          iterations=iterations, status=status,
                          rho=system.problem.rho if system.problem else None,
                          a0=system.problem.a.a0 if system.problem else None,
                          objective=float(best_obj),
                          objective_history=[float(v) for v in obj_history])


def lambda_range(constants: RieszConstants, s: int) -> tuple:
    """Admissible square-root LASSO tuning interval (0, 3 b/(14 B) sqrt(B/s)].

    The upper endpoint is the theory-backed choice; the lower endpoint is not
    pinned by the available constants.
    """
    if constants.b_phi <= 0:
        raise ValueError("b_phi must be positive for the tuning range to exist")
    if s < 1:
        raise ValueError("s must be >= 1")
    upper = (3.0 * constants.b_phi / (14.0 * constants.B_phi)) \
        * math.sqrt(constants.B_phi / s)
    return (0.0, upper)
