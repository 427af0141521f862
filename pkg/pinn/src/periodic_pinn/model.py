"""Periodic network architecture.

The first block maps each input coordinate through phase-shifted cosines
cos(2 pi x_i + phi_ij), which makes the whole network exactly 1-periodic in
every coordinate whatever the downstream weights do; a diagonal affine layer
with activation follows, then h dense hidden layers of width w and a linear
scalar read-out.  The read-out starts at zero so an untrained network is the
zero function.

The frozen variant replaces the trainable periodic block with fixed Fourier
features (cos(2 pi nu x_i), sin(2 pi nu x_i)) for nu = 1..M and every
coordinate, 2*M*d outputs in total; hidden layers and training are unchanged.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import torch
from torch import nn

TWO_PI = 2.0 * torch.pi

_ACTIVATIONS = {"tanh": torch.tanh, "relu": torch.relu, "identity": lambda t: t}


@dataclass(frozen=True)
class PeriodicNetConfig:
    """Architecture knobs: d input dims, l periodic nodes per dimension,
    h hidden layers of width w, optional last-layer l1 penalty weight and
    optional frozen Fourier-feature cap M (mutually exclusive with the
    trainable periodic layer)."""

    d: int
    l: int = 11
    h: int = 3
    w: int = 30
    activation: str = "tanh"
    lambda_l1: float = 0.0
    frozen_features: Optional[int] = None

    def __post_init__(self):
        if self.d < 1 or self.l < 1 or self.h < 1 or self.w < 1:
            raise ValueError("d, l, h and w must all be >= 1")
        if self.lambda_l1 < 0:
            raise ValueError("lambda_l1 must be nonnegative")
        if self.activation not in _ACTIVATIONS:
            raise ValueError(f"unknown activation {self.activation!r}")
        if self.frozen_features is not None and self.frozen_features < 1:
            raise ValueError("frozen_features must be a positive frequency cap")


class PeriodicLayer(nn.Module):
    """Trainable phase-shift cosine block followed by a diagonal affine map.

    Phases start at zero; the nodes of one coordinate differentiate through
    the random downstream weights.  Random phase starts were measurably worse
    on the reference problems (wilder interpolation between collocation
    points), so the smoother zero start is the default.
    """

    def __init__(self, d: int, l: int, activation: str, dtype=torch.float64):
        super().__init__()
        self.d, self.l = d, l
        self.act = _ACTIVATIONS[activation]
        self.phase = nn.Parameter(torch.zeros(d * l, dtype=dtype))
        self.scale = nn.Parameter(torch.ones(d * l, dtype=dtype))
        self.shift = nn.Parameter(torch.zeros(d * l, dtype=dtype))

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        rep = x.repeat_interleave(self.l, dim=1)  # (batch, d*l), coordinate blocks
        q = torch.cos(TWO_PI * rep + self.phase)
        return self.act(self.scale * q + self.shift)


class FrozenFourierFeatures(nn.Module):
    """Fixed features cos/sin(2 pi nu x_i), nu = 1..M, per coordinate."""

    def __init__(self, d: int, M: int, dtype=torch.float64):
        super().__init__()
        self.d, self.M = d, M
        freqs = torch.arange(1, M + 1, dtype=dtype)
        self.register_buffer("freqs", freqs)

    @property
    def width(self) -> int:
        return 2 * self.M * self.d

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        # (batch, d, M) phase grid, flattened to [cos block, sin block]
        phases = TWO_PI * x[:, :, None] * self.freqs[None, None, :]
        feats = torch.cat([torch.cos(phases), torch.sin(phases)], dim=2)
        return feats.reshape(x.shape[0], -1)


class PeriodicNet(nn.Module):
    def __init__(self, cfg: PeriodicNetConfig, dtype=torch.float64):
        super().__init__()
        self.cfg = cfg
        self.act = _ACTIVATIONS[cfg.activation]
        if cfg.frozen_features is not None:
            self.first = FrozenFourierFeatures(cfg.d, cfg.frozen_features, dtype=dtype)
            first_width = self.first.width
        else:
            self.first = PeriodicLayer(cfg.d, cfg.l, cfg.activation, dtype=dtype)
            first_width = cfg.d * cfg.l
        widths = [first_width] + [cfg.w] * cfg.h
        self.hidden = nn.ModuleList(
            nn.Linear(widths[i], widths[i + 1], dtype=dtype) for i in range(cfg.h))
        self.readout = nn.Linear(cfg.w, 1, bias=False, dtype=dtype)
        nn.init.zeros_(self.readout.weight)

    def forward(self, x: torch.Tensor) -> torch.Tensor:
        y = self.first(x)
        for layer in self.hidden:
            y = self.act(layer(y))
        return self.readout(y).squeeze(-1)

    def last_layer_l1(self) -> torch.Tensor:
        return self.readout.weight.abs().sum()


def build_model(cfg: PeriodicNetConfig, seed: int = 0, dtype=torch.float64) -> PeriodicNet:
    """Seeded construction; the output is exactly 1-periodic in every coordinate."""
    torch.manual_seed(seed)
    return PeriodicNet(cfg, dtype=dtype)
