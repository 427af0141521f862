"""Fourier system, rescaled system and analytic application of the PDE operator.

The working basis is F_nu(x) = exp(2 pi i nu . x) on the unit torus and its
rescaled companion Psi_nu = r_nu F_nu with r_nu = 1 / (4 pi^2 |nu|^2 + rho/a0).
Applying the diffusion-reaction operator L[u] = -div(a grad u) + rho u to a
rescaled mode has the closed form

    L[Psi_nu](x) = r_nu * ( sum_{tau in T u {0}} 4 pi^2 (tau.nu + |nu|^2)
                            a_tau F_{tau+nu}(x)  +  rho F_nu(x) ),

which this module evaluates directly; no numerical differentiation anywhere.
All trigonometry goes through the complex exponential with the phase reduced
modulo 1 before scaling by 2 pi.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * math.pi
FOUR_PI_SQ = 4.0 * math.pi ** 2


def fourier_eval(nu, x) -> complex:
    """Evaluate F_nu(x) = exp(2 pi i nu . x); the modulus is exactly 1."""
    nu = np.asarray(nu, dtype=float)
    x = np.asarray(x, dtype=float)
    if nu.shape != x.shape:
        raise ValueError("dimension mismatch between index and point")
    t = math.fmod(float(nu @ x), 1.0)
    return complex(math.cos(TWO_PI * t), math.sin(TWO_PI * t))


def fourier_eval_many(nu, X: np.ndarray) -> np.ndarray:
    """Vectorized F_nu over points X of shape (m, d)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    phases = X @ np.asarray(nu, dtype=float)
    return np.exp(2j * np.pi * np.mod(phases, 1.0))


def rescale_factor(nu, rho: float, a0: float) -> float:
    """r_nu = 1 / (4 pi^2 |nu|_2^2 + rho / a0)."""
    if rho <= 0 or a0 <= 0:
        raise ValueError("rho and a0 must be positive")
    nu = np.asarray(nu, dtype=float)
    return 1.0 / (FOUR_PI_SQ * float(nu @ nu) + rho / a0)


@dataclass(frozen=True)
class RescaledMode:
    """A Fourier mode together with its rescaling factor r_nu."""

    index: tuple
    factor: float

    @classmethod
    def create(cls, nu, rho: float, a0: float) -> "RescaledMode":
        return cls(index=tuple(int(v) for v in nu), factor=rescale_factor(nu, rho, a0))


def _operator_weights(a, rho: float, nu) -> list:
    """Pairs (tau, w) with w = 4 pi^2 (tau.nu + |nu|^2) a_tau over T u {0}."""
    nu_arr = np.asarray(nu, dtype=float)
    nn = float(nu_arr @ nu_arr)
    out = [((0,) * len(nu), FOUR_PI_SQ * nn * a.a0)]
    for tau, amp in a.modes.items():
        w = FOUR_PI_SQ * (float(np.dot(tau, nu_arr)) + nn) * amp
        out.append((tau, w))
    return out


def apply_operator_to_mode(a, rho: float, nu, x) -> complex:
    """[-div(a grad Psi_nu) + rho Psi_nu](x) via the sparse-Fourier closed form."""
    r = rescale_factor(nu, rho, a.a0)
    nu = tuple(int(v) for v in nu)
    acc = rho * fourier_eval(nu, x)
    for tau, w in _operator_weights(a, rho, nu):
        shifted = tuple(t + v for t, v in zip(tau, nu))
        acc += w * fourier_eval(shifted, x)
    return r * acc


def apply_operator_via_callables(a_fn, grad_a_fn, rho: float, a0: float, nu, x) -> complex:
    """Product-rule evaluation -grad(a).grad(Psi) - a Lap(Psi) + rho Psi.

    Validation path for the analytic assembly above; ``a_fn`` and ``grad_a_fn``
    are user-supplied callables for a and its gradient at a single point.
    """
    nu_arr = np.asarray(nu, dtype=float)
    r = rescale_factor(nu, rho, a0)
    f = fourier_eval(nu, x)
    grad_psi = r * (2j * np.pi) * nu_arr * f
    lap_psi = -r * FOUR_PI_SQ * float(nu_arr @ nu_arr) * f
    psi = r * f
    grad_a = np.asarray(grad_a_fn(x), dtype=float)
    return -complex(grad_a @ grad_psi) - a_fn(x) * lap_psi + rho * psi


def operator_columns(a, rho: float, columns, X: np.ndarray) -> np.ndarray:
    """Matrix of L[Psi_nu](x_i) for nu in ``columns``, x_i rows of X.

    Uses F_{tau+nu} = F_tau * F_nu so each diffusion mode costs one
    phase table shared by every column.  No 1/sqrt(m) normalization here.
    """
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m, d = X.shape
    cols = np.asarray(list(columns), dtype=np.int64)
    if cols.ndim == 1:
        cols = cols.reshape(1, -1)
    n_cols = cols.shape[0]
    if cols.shape[1] != d:
        raise ValueError("column index dimension does not match points")

    norms_sq = np.einsum("ij,ij->i", cols, cols).astype(float)
    r = 1.0 / (FOUR_PI_SQ * norms_sq + rho / a.a0)

    taus = [np.zeros(d)] + [np.asarray(t, dtype=float) for t in a.modes.keys()]
    amps = [complex(a.a0)] + [complex(v) for v in a.modes.values()]
    f_tau = [np.exp(2j * np.pi * np.mod(X @ t, 1.0)) for t in taus]

    out = np.empty((m, n_cols), dtype=np.complex128)
    chunk = max(1, min(n_cols, 8_000_000 // max(m, 1)))
    for lo in range(0, n_cols, chunk):
        hi = min(lo + chunk, n_cols)
        V = cols[lo:hi].astype(float)
        f_nu = np.exp(2j * np.pi * np.mod(X @ V.T, 1.0))
        mix = np.full((m, hi - lo), rho, dtype=np.complex128)
        for t, amp, ft in zip(taus, amps, f_tau):
            w = FOUR_PI_SQ * (V @ t + norms_sq[lo:hi]) * amp
            mix += ft[:, None] * w[None, :]
        out[:, lo:hi] = f_nu * mix * r[None, lo:hi]
    return out


def synthesize(coefficients, x, rescaled: bool = False,
               rho: float | None = None, a0: float | None = None) -> complex:
    """Sum c_nu Psi_nu(x) (rescaled=True) or c_nu F_nu(x) at one point."""
    acc = 0j
    for nu, c in coefficients.items():
        w = rescale_factor(nu, rho, a0) if rescaled else 1.0
        acc += c * w * fourier_eval(nu, x)
    return acc


def synthesize_many(coefficients, X: np.ndarray, rescaled: bool = False,
                    rho: float | None = None, a0: float | None = None) -> np.ndarray:
    """Vectorized synthesis over points X of shape (m, d)."""
    X = np.atleast_2d(np.asarray(X, dtype=float))
    m = X.shape[0]
    if not coefficients:
        return np.zeros(m, dtype=np.complex128)
    indices = list(coefficients.keys())
    coeffs = np.array([coefficients[nu] for nu in indices], dtype=np.complex128)
    if rescaled:
        coeffs = coeffs * np.array([rescale_factor(nu, rho, a0) for nu in indices])
    V = np.asarray(indices, dtype=float)
    out = np.zeros(m, dtype=np.complex128)
    chunk = max(1, 4_000_000 // max(len(indices), 1))
    for lo in range(0, m, chunk):
        hi = min(lo + chunk, m)
        F = np.exp(2j * np.pi * np.mod(X[lo:hi] @ V.T, 1.0))
        out[lo:hi] = F @ coeffs
    return out
