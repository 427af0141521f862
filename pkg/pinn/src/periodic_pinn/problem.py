"""Problem data for the baseline: shared TOML problem tables and torch
implementations of the reference solutions for oracle tests.

The diffusion coefficient arrives as a mean plus finitely many complex Fourier
amplitudes (Hermitian-symmetric, so values and gradients are real).  Its
values and gradient at the collocation points are plain data for the residual
loss; only the network is differentiated.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np
import torch

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

TWO_PI = 2.0 * math.pi


@dataclass(frozen=True, eq=False)
class TorusProblem:
    """Dimension, reaction constant and sparse diffusion data."""

    dimension: int
    rho: float
    a0: float
    modes: Mapping[tuple, complex]
    example: object = None

    def diffusion_values(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        vals = np.full(X.shape[0], self.a0, dtype=np.complex128)
        for tau, amp in self.modes.items():
            vals += amp * np.exp(2j * np.pi * (X @ np.asarray(tau, dtype=float)))
        return vals.real

    def diffusion_gradients(self, X: np.ndarray) -> np.ndarray:
        X = np.atleast_2d(np.asarray(X, dtype=float))
        out = np.zeros((X.shape[0], self.dimension), dtype=np.complex128)
        for tau, amp in self.modes.items():
            t = np.asarray(tau, dtype=float)
            f = np.exp(2j * np.pi * (X @ t))
            out += (2j * np.pi * amp) * f[:, None] * t[None, :]
        return out.real


def load_problem(path) -> TorusProblem:
    with open(path, "rb") as fh:
        cfg = tomllib.load(fh)
    table = cfg.get("problem", cfg)
    d = int(table["dimension"])
    rho = float(table["rho"])
    diff = table.get("diffusion")
    if diff is None:
        pad = (0,) * (d - 2)
        modes = {(1, 1) + pad: -1 / 16, (1, -1) + pad: 1 / 16,
                 (-1, 1) + pad: 1 / 16, (-1, -1) + pad: -1 / 16}
        a0 = 1.0
    else:
        a0 = float(diff["a0"])
        modes = {tuple(int(v) for v in e["index"]): complex(float(e["re"]),
                                                            float(e.get("im", 0.0)))
                 for e in diff.get("modes", [])}
    return TorusProblem(dimension=d, rho=rho, a0=a0, modes=modes,
                        example=table.get("example"))


class ExactTorchSolution(torch.nn.Module):
    """Reference solutions as torch graphs, for clamped-oracle loss tests."""

    def __init__(self, example: int, d: int):
        super().__init__()
        if example not in (1, 2, 3):
            raise ValueError("example must be 1, 2 or 3")
        self.example = example
        self.d = d
        weights = torch.tensor([1.0 / (k + 1) ** 2 for k in range(d)],
                               dtype=torch.float64)
        self.register_buffer("weights", weights)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        if self.example == 1:
            return torch.sin(2 * TWO_PI * x[:, 0]) * torch.sin(TWO_PI * x[:, 1])
        if self.example == 2:
            return torch.exp(torch.sin(TWO_PI * x[:, 0]) + torch.sin(TWO_PI * x[:, 1]))
        return torch.exp(torch.sin(TWO_PI * x) @ self.weights)
