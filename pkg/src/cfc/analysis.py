"""Theory-derived diagnostics: explicit Gram matrix, Riesz-system constants,
sample-complexity bound and Sobolev norm utilities.

These quantities serve as oracles for the solver: the Gram matrix is the
expectation of A*A, the Riesz constants bound its spectrum, and the Sobolev
norms realize the equivalence sqrt(2/3) ||u||_H2 <= |||u||| <= ||u||_H2 with
|||u|||^2 = ||u||_L2^2 + ||Lap u||_L2^2.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .basis import FOUR_PI_SQ
from .problem import DiffusionCoefficient

EIGENVALUE_SIZE_CAP = 5000


@dataclass(frozen=True)
class RieszConstants:
    """Constants of the operator-transformed system and the sufficient condition.

    beta = sqrt(|T|) * ||a - a0||_H1 controls the off-diagonal Gram mass;
    b_phi/B_phi are the two-sided Riesz bounds, K_phi the uniform sup bound.
    ``margin`` is RHS - LHS of the sufficient condition, positive iff satisfied.
    """

    beta: float
    b_phi: float
    B_phi: float
    K_phi: float
    condition_satisfied: bool
    margin: float
    a0: float
    rho: float
    num_modes: int


def diffusion_h1_norm_sq(a: DiffusionCoefficient) -> float:
    """||a||_H1^2 = a0^2 + sum_tau (1 + 4 pi^2 |tau|^2) |a_tau|^2."""
    acc = a.a0 ** 2
    for tau, amp in a.modes.items():
        t = np.asarray(tau, dtype=float)
        acc += (1.0 + FOUR_PI_SQ * float(t @ t)) * abs(amp) ** 2
    return acc


def riesz_constants(a: DiffusionCoefficient, rho: float) -> RieszConstants:
    """Evaluate beta, b_phi, B_phi, K_phi and the sufficient condition."""
    if rho <= 0:
        raise ValueError("rho must be positive")
    h1_sq = diffusion_h1_norm_sq(a)
    t = len(a.modes)
    beta = math.sqrt(t) * math.sqrt(max(h1_sq - a.a0 ** 2, 0.0))
    osc = 2.0 * a.a0 + rho / (2.0 * math.pi ** 2)
    b_phi = a.a0 ** 2 - osc * beta - beta ** 2
    B_phi = h1_sq + rho ** 2 / (16.0 * math.pi ** 4) + a.a0 * rho / (2.0 * math.pi ** 2) \
        + osc * beta + beta ** 2
    K_phi = a.a0 + beta + rho / FOUR_PI_SQ
    shift = a.a0 + rho / FOUR_PI_SQ
    rhs = math.sqrt(shift ** 2 + a.a0 ** 2) - shift
    margin = rhs - beta
    return RieszConstants(beta=beta, b_phi=b_phi, B_phi=B_phi, K_phi=K_phi,
                          condition_satisfied=margin > 0.0, margin=margin,
                          a0=a.a0, rho=rho, num_modes=t)


def gram_matrix(a: DiffusionCoefficient, rho: float, indices) -> np.ndarray:
    """Explicit Gram matrix G_{nu,mu} = <L[Psi_nu], L[Psi_mu]> on an index list.

    Evaluates the closed-form double sum over tau, tau' in T u {0} with the
    Kronecker-delta constraint resolved by lookup, O(N^2 |T|) overall.  With
    the standard rescaling, G_00 = a0^2 and the zero mode decouples from all
    other rows and columns.
    """
    cols = [tuple(int(v) for v in nu) for nu in indices]
    N = len(cols)
    pos = {nu: i for i, nu in enumerate(cols)}
    if len(pos) != N:
        raise ValueError("duplicate indices")
    V = np.asarray(cols, dtype=float)
    norms_sq = np.einsum("ij,ij->i", V, V)
    r = 1.0 / (FOUR_PI_SQ * norms_sq + rho / a.a0)

    amap = {(0,) * a.dimension: complex(a.a0)}
    amap.update({tau: complex(v) for tau, v in a.modes.items()})

    G = np.zeros((N, N), dtype=np.complex128)
    G[np.arange(N), np.arange(N)] = (r * rho) ** 2

    def add_pairs(shift, weight_fn):
        # accumulate weight_fn(i, j) at (i, j) for mu = nu + shift present in the set
        s = np.asarray(shift, dtype=int)
        for i, nu in enumerate(cols):
            mu = tuple(int(v) for v in (np.asarray(nu) + s))
            j = pos.get(mu)
            if j is not None:
                G[i, j] += weight_fn(i, j)

    sixteen_pi4 = FOUR_PI_SQ ** 2
    for tau, a_tau in amap.items():
        t = np.asarray(tau, dtype=float)
        for taup, a_taup in amap.items():
            tp = np.asarray(taup, dtype=float)
            shift = np.asarray(tau, dtype=int) - np.asarray(taup, dtype=int)
            coeff = a_tau * a_taup.conjugate()

            def w1(i, j, t=t, tp=tp, coeff=coeff):
                left = float(t @ V[i]) + norms_sq[i]
                right = float(tp @ V[j]) + norms_sq[j]
                return sixteen_pi4 * left * right * coeff * r[i] * r[j]

            add_pairs(shift, w1)
    for tau, a_tau in amap.items():
        t = np.asarray(tau, dtype=float)

        def w3(i, j, t=t, a_tau=a_tau):
            return FOUR_PI_SQ * rho * (float(t @ V[i]) + norms_sq[i]) * a_tau * r[i] * r[j]

        add_pairs(np.asarray(tau, dtype=int), w3)

        def w4(i, j, t=t, a_tau=a_tau):
            return FOUR_PI_SQ * rho * (float(t @ V[j]) + norms_sq[j]) * a_tau.conjugate() * r[i] * r[j]

        add_pairs(-np.asarray(tau, dtype=int), w4)
    return G


def gershgorin_interval(G: np.ndarray) -> tuple:
    """Real interval containing every eigenvalue of a Hermitian matrix."""
    diag = np.real(np.diag(G))
    off = np.sum(np.abs(G), axis=1) - np.abs(np.diag(G))
    return float(np.min(diag - off)), float(np.max(diag + off))


def gram_eigenvalues(G: np.ndarray) -> np.ndarray:
    if G.shape[0] > EIGENVALUE_SIZE_CAP:
        raise ValueError(f"eigenvalue diagnostic capped at N = {EIGENVALUE_SIZE_CAP}")
    return np.linalg.eigvalsh(G)


def sample_complexity(constants: RieszConstants, s: int, n: int, d: int,
                      eps: float, c0: float = 1.0) -> int:
    """Sufficient number of collocation points for stable recovery.

    m = ceil( c3 * s * log^2(c4 * s) * (min{log n + d, log 2n * log 2d}
              + log(1/eps)) ) with c3 = c0 (max{1,B}/b)^2 K^2 and
    c4 = K^2 max{1,B}/b; logs are natural.  The universal constant c0 is not
    pinned by theory, so absolute values are indicative only.
    """
    if constants.b_phi <= 0:
        raise ValueError("b_phi must be positive (sufficient condition violated)")
    if not (0.0 < eps < 1.0):
        raise ValueError("eps must lie in (0, 1)")
    if s < 1 or n < 1 or d < 1:
        raise ValueError("s, n and d must be positive")
    ratio = max(1.0, constants.B_phi) / constants.b_phi
    c3 = c0 * ratio ** 2 * constants.K_phi ** 2
    c4 = constants.K_phi ** 2 * ratio
    geom = min(math.log(n) + d, math.log(2 * n) * math.log(2 * d))
    return math.ceil(c3 * s * math.log(c4 * s) ** 2 * (geom + math.log(1.0 / eps)))


def sobolev_norms(coefficients, rescaled: bool = False,
                  rho: float | None = None, a0: float | None = None) -> dict:
    """L2, H1, H2 and |||.||| norms of a finitely supported Fourier expansion.

    With ``rescaled=True`` the input is in the rescaled basis and is converted
    to raw Fourier coefficients c_nu = r_nu * input before the Parseval sums.
    """
    l2_sq = h1_sq = h2_sq = triple_sq = 0.0
    for nu, c in coefficients.items():
        if rescaled:
            t = np.asarray(nu, dtype=float)
            c = c / (FOUR_PI_SQ * float(t @ t) + rho / a0)
        t = np.asarray(nu, dtype=float)
        nn = float(t @ t)
        mag = abs(c) ** 2
        l2_sq += mag
        h1_sq += (1.0 + FOUR_PI_SQ * nn) * mag
        h2_sq += (1.0 + FOUR_PI_SQ * nn + FOUR_PI_SQ ** 2 * nn ** 2) * mag
        triple_sq += (1.0 + FOUR_PI_SQ ** 2 * nn ** 2) * mag
    return {"l2": math.sqrt(l2_sq), "h1": math.sqrt(h1_sq),
            "h2": math.sqrt(h2_sq), "triple": math.sqrt(triple_sq)}
