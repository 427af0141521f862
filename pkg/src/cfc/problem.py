"""Problem specification: diffusion coefficients, built-in exact solutions,
and manufactured forcing terms.

The built-in test problems use the diffusion coefficient
a(x) = 1 + 0.25 sin(2 pi x1) sin(2 pi x2) and one of three exact solutions
(a 4-sparse trigonometric product, an anisotropic two-variable exponential,
and a fully coupled exponential with 1/k^2 weights).  Forcing terms are
manufactured so the chosen exact solution solves the PDE; gradients and
Laplacians are hand-derived closed forms, never finite differences.

Point arrays are always shaped (m, d); scalar-valued callables return (m,).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Mapping, Optional

import numpy as np

from .basis import FOUR_PI_SQ

TWO_PI = 2.0 * math.pi


class ConfigError(ValueError):
    """Malformed problem or experiment configuration."""


@dataclass(frozen=True, eq=False)
class DiffusionCoefficient:
    """Sparse Fourier representation a = a0 + sum_{tau in T} a_tau F_tau.

    ``modes`` maps nonzero multi-indices to complex amplitudes and must be
    Hermitian-symmetric (a_{-tau} = conj(a_tau)) so a is real-valued.
    Ellipticity is spot-checked on a seeded sample grid at construction.
    """

    a0: float
    modes: Mapping[tuple, complex]
    dimension: int

    def __post_init__(self):
        if self.a0 <= 0:
            raise ValueError("a0 must be positive")
        if self.dimension < 1:
            raise ValueError("dimension must be >= 1")
        clean = {}
        for tau, amp in self.modes.items():
            tau = tuple(int(v) for v in tau)
            if len(tau) != self.dimension:
                raise ValueError(f"mode {tau} does not match dimension {self.dimension}")
            if all(v == 0 for v in tau):
                raise ValueError("the zero index belongs to a0, not to modes")
            clean[tau] = complex(amp)
        object.__setattr__(self, "modes", clean)
        for tau, amp in clean.items():
            neg = tuple(-v for v in tau)
            mirror = clean.get(neg)
            if mirror is None or abs(mirror - amp.conjugate()) > 1e-12 * (1.0 + abs(amp)):
                raise ValueError(f"modes are not Hermitian-symmetric at {tau}")
        if clean:
            rng = np.random.default_rng(0)
            sample = rng.random((256, self.dimension))
            if float(np.min(self.evaluate_many(sample))) <= 0.0:
                raise ValueError("diffusion coefficient is not elliptic on the spot-check grid")

    @property
    def support(self) -> list:
        return sorted(self.modes)

    def evaluate_many(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        vals = np.full(X.shape[0], self.a0, dtype=np.complex128)
        for tau, amp in self.modes.items():
            vals += amp * np.exp(2j * np.pi * (X @ np.asarray(tau, dtype=float)))
        return vals.real

    def evaluate(self, x) -> float:
        return float(self.evaluate_many(np.asarray(x, dtype=float).reshape(1, -1))[0])

    def gradient_many(self, X: np.ndarray) -> np.ndarray:
        """grad a(x) = sum_tau a_tau (2 pi i tau) F_tau(x), shape (m, d)."""
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros((X.shape[0], self.dimension), dtype=np.complex128)
        for tau, amp in self.modes.items():
            t = np.asarray(tau, dtype=float)
            f = np.exp(2j * np.pi * (X @ t))
            out += (2j * np.pi * amp) * f[:, None] * t[None, :]
        return out.real

    def gradient(self, x) -> np.ndarray:
        return self.gradient_many(np.asarray(x, dtype=float).reshape(1, -1))[0]


def constant_diffusion(d: int, a0: float = 1.0) -> DiffusionCoefficient:
    return DiffusionCoefficient(a0=a0, modes={}, dimension=d)


def paper_diffusion(d: int) -> DiffusionCoefficient:
    """a(x) = 1 + 0.25 sin(2 pi x1) sin(2 pi x2) in sparse Fourier form.

    The product-to-sum identity gives four modes on (+-1, +-1, 0, ...) with
    amplitudes -1/16 on equal signs and +1/16 on mixed signs.
    """
    if d < 2:
        raise ValueError("the built-in diffusion coefficient needs d >= 2")
    pad = (0,) * (d - 2)
    modes = {
        (1, 1) + pad: -1.0 / 16.0,
        (1, -1) + pad: 1.0 / 16.0,
        (-1, 1) + pad: 1.0 / 16.0,
        (-1, -1) + pad: -1.0 / 16.0,
    }
    return DiffusionCoefficient(a0=1.0, modes=modes, dimension=d)


@dataclass(frozen=True)
class ExactSolution:
    """Closed-form solution with analytic gradient and Laplacian.

    ``value`` maps (m, d) -> (m,), ``gradient`` maps (m, d) -> (m, d) and
    ``laplacian`` maps (m, d) -> (m,).
    """

    value: Callable[[np.ndarray], np.ndarray]
    gradient: Callable[[np.ndarray], np.ndarray]
    laplacian: Callable[[np.ndarray], np.ndarray]
    label: str

    def value_at(self, x) -> float:
        return float(self.value(np.asarray(x, dtype=float).reshape(1, -1))[0])


def example_solution(k: int, d: int) -> ExactSolution:
    """The built-in exact solutions u_1, u_2, u_3."""
    if d < 2:
        raise ValueError("built-in examples need d >= 2")
    if k == 1:
        def value(X):
            X = np.atleast_2d(X)
            return np.sin(2 * TWO_PI * X[:, 0]) * np.sin(TWO_PI * X[:, 1])

        def gradient(X):
            X = np.atleast_2d(X)
            g = np.zeros_like(X)
            g[:, 0] = 2 * TWO_PI * np.cos(2 * TWO_PI * X[:, 0]) * np.sin(TWO_PI * X[:, 1])
            g[:, 1] = TWO_PI * np.sin(2 * TWO_PI * X[:, 0]) * np.cos(TWO_PI * X[:, 1])
            return g

        def laplacian(X):
            return -(16.0 + 4.0) * math.pi ** 2 * value(X)

        return ExactSolution(value, gradient, laplacian, label="example1")
    if k == 2:
        def value(X):
            X = np.atleast_2d(X)
            return np.exp(np.sin(TWO_PI * X[:, 0]) + np.sin(TWO_PI * X[:, 1]))

        def gradient(X):
            X = np.atleast_2d(X)
            u = value(X)
            g = np.zeros_like(X)
            g[:, 0] = TWO_PI * np.cos(TWO_PI * X[:, 0]) * u
            g[:, 1] = TWO_PI * np.cos(TWO_PI * X[:, 1]) * u
            return g

        def laplacian(X):
            X = np.atleast_2d(X)
            u = value(X)
            acc = np.zeros_like(u)
            for j in (0, 1):
                c = np.cos(TWO_PI * X[:, j])
                s = np.sin(TWO_PI * X[:, j])
                acc += FOUR_PI_SQ * (c * c - s)
            return acc * u

        return ExactSolution(value, gradient, laplacian, label="example2")
    if k == 3:
        weights = np.array([1.0 / (j + 1) ** 2 for j in range(d)])

        def value(X):
            X = np.atleast_2d(X)
            return np.exp(np.sin(TWO_PI * X) @ weights)

        def gradient(X):
            X = np.atleast_2d(X)
            u = value(X)
            return TWO_PI * weights[None, :] * np.cos(TWO_PI * X) * u[:, None]

        def laplacian(X):
            X = np.atleast_2d(X)
            u = value(X)
            c = np.cos(TWO_PI * X)
            s = np.sin(TWO_PI * X)
            acc = FOUR_PI_SQ * ((c * c) @ (weights ** 2) - s @ weights)
            return acc * u

        return ExactSolution(value, gradient, laplacian, label="example3")
    raise ValueError("example index must be 1, 2 or 3")


def example1_fourier_coefficients(d: int) -> dict:
    """Exact complex Fourier coefficients of u_1 (4-sparse, not lower)."""
    pad = (0,) * (d - 2)
    return {
        (2, 1) + pad: -0.25,
        (2, -1) + pad: 0.25,
        (-2, 1) + pad: 0.25,
        (-2, -1) + pad: -0.25,
    }


@dataclass(frozen=True, eq=False)
class ProblemSpec:
    """A concrete diffusion-reaction problem (a, rho, f) on the torus."""

    a: DiffusionCoefficient
    rho: float
    forcing: Callable[[np.ndarray], np.ndarray]
    dimension: int
    exact: Optional[ExactSolution] = None

    def __post_init__(self):
        if self.rho <= 0:
            raise ValueError("rho must be positive")
        if self.a.dimension != self.dimension:
            raise ValueError("diffusion coefficient dimension mismatch")


def manufactured_forcing(a: DiffusionCoefficient, rho: float,
                         exact: ExactSolution) -> Callable[[np.ndarray], np.ndarray]:
    """f = -grad(a).grad(u) - a Lap(u) + rho u for a prescribed exact solution."""

    def forcing(X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        grad_a = a.gradient_many(X)
        grad_u = exact.gradient(X)
        dot = np.einsum("ij,ij->i", grad_a, grad_u)
        return -dot - a.evaluate_many(X) * exact.laplacian(X) + rho * exact.value(X)

    return forcing


def manufactured_problem(example: int, d: int, rho: float = 0.5,
                         diffusion: DiffusionCoefficient | None = None) -> ProblemSpec:
    """Problem with a built-in exact solution and matching manufactured forcing."""
    a = diffusion if diffusion is not None else paper_diffusion(d)
    exact = example_solution(example, d)
    return ProblemSpec(a=a, rho=rho, forcing=manufactured_forcing(a, rho, exact),
                       dimension=d, exact=exact)


def diffusion_from_config(table: Mapping, dimension: int) -> DiffusionCoefficient:
    if "a0" not in table:
        raise ConfigError("diffusion table is missing the 'a0' key")
    modes = {}
    for entry in table.get("modes", []):
        try:
            idx = tuple(int(v) for v in entry["index"])
            modes[idx] = complex(float(entry["re"]), float(entry.get("im", 0.0)))
        except (KeyError, TypeError, ValueError) as exc:
            raise ConfigError(f"malformed diffusion mode entry {entry!r}") from exc
    try:
        return DiffusionCoefficient(a0=float(table["a0"]), modes=modes, dimension=dimension)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc


def problem_from_config(cfg: Mapping) -> ProblemSpec:
    """Build a ProblemSpec from a parsed [problem] table.

    Keys: ``dimension``, ``rho``, ``example`` (1-3 or "custom") and an optional
    ``diffusion`` sub-table (``a0`` plus ``modes`` entries).  With
    example="custom" only the coefficient analysis path is available, so the
    returned spec carries a zero forcing and no exact solution.
    """
    try:
        d = int(cfg["dimension"])
        rho = float(cfg["rho"])
        example = cfg.get("example", "custom")
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"problem table is missing or malformed: {exc}") from exc
    if rho <= 0:
        raise ConfigError("rho must be positive")
    if "diffusion" in cfg:
        a = diffusion_from_config(cfg["diffusion"], d)
    else:
        a = paper_diffusion(d)
    if example == "custom":
        return ProblemSpec(a=a, rho=rho, forcing=lambda X: np.zeros(np.atleast_2d(X).shape[0]),
                           dimension=d, exact=None)
    if example not in (1, 2, 3):
        raise ConfigError("example must be 1, 2, 3 or 'custom'")
    exact = example_solution(int(example), d)
    return ProblemSpec(a=a, rho=rho, forcing=manufactured_forcing(a, rho, exact),
                       dimension=d, exact=exact)
