"""Architecture: periodicity, frozen features, initialization."""

import math

import numpy as np
import pytest
import torch

from periodic_pinn import PeriodicNetConfig, build_model


def test_config_validation():
    with pytest.raises(ValueError):
        PeriodicNetConfig(d=0)
    with pytest.raises(ValueError):
        PeriodicNetConfig(d=2, l=0)
    with pytest.raises(ValueError):
        PeriodicNetConfig(d=2, lambda_l1=-0.1)
    with pytest.raises(ValueError):
        PeriodicNetConfig(d=2, activation="sigmoidish")
    with pytest.raises(ValueError):
        PeriodicNetConfig(d=2, frozen_features=0)


def test_zero_initialized_readout_gives_zero_function():
    model = build_model(PeriodicNetConfig(d=3, l=4, h=2, w=12), seed=0)
    x = torch.rand(50, 3, dtype=torch.float64)
    assert float(model(x).detach().abs().max()) == 0.0


def _randomize(model, seed=0):
    g = torch.Generator().manual_seed(seed)
    with torch.no_grad():
        for p in model.parameters():
            p.copy_(0.5 * torch.randn(p.shape, generator=g, dtype=p.dtype))
    return model


@pytest.mark.parametrize("frozen", [None, 4])
def test_output_is_one_periodic_in_every_coordinate(frozen):
    d = 3
    cfg = PeriodicNetConfig(d=d, l=5, h=2, w=16, frozen_features=frozen)
    model = _randomize(build_model(cfg, seed=1), seed=2)
    x = torch.rand(100, d, dtype=torch.float64)
    base = model(x).detach()
    for k in range(d):
        shifted = x.clone()
        shifted[:, k] += 1.0
        diff = (model(shifted).detach() - base).abs().max()
        assert float(diff) <= 1e-6


def test_periodicity_survives_training_steps():
    from periodic_pinn import TorusProblem, residual_loss
    d = 2
    problem = TorusProblem(dimension=d, rho=0.5, a0=1.0, modes={})
    cfg = PeriodicNetConfig(d=d, l=4, h=2, w=12)
    model = build_model(cfg, seed=3)
    rng = np.random.default_rng(0)
    pts = rng.random((32, d))
    f = np.sin(2 * np.pi * pts[:, 0])
    opt = torch.optim.Adam(model.parameters(), lr=1e-2)
    for _ in range(10):
        opt.zero_grad()
        loss = residual_loss(model, problem, pts, f)
        loss.backward()
        opt.step()
    x = torch.rand(40, d, dtype=torch.float64)
    for k in range(d):
        shifted = x.clone()
        shifted[:, k] += 1.0
        assert float((model(x) - model(shifted)).detach().abs().max()) <= 1e-6


def test_frozen_features_content_and_width():
    d, M = 2, 16
    cfg = PeriodicNetConfig(d=d, l=1, h=1, w=4, frozen_features=M)
    model = build_model(cfg, seed=0)
    x = torch.rand(7, d, dtype=torch.float64)
    feats = model.first(x)
    assert feats.shape == (7, 2 * M * d)
    manual = []
    for i in range(d):
        for nu in range(1, M + 1):
            manual.append(torch.cos(2 * math.pi * nu * x[:, i]))
        for nu in range(1, M + 1):
            manual.append(torch.sin(2 * math.pi * nu * x[:, i]))
    manual = torch.stack(manual, dim=1)
    assert float((feats - manual).abs().max()) <= 1e-12
    assert all(not p.requires_grad for p in model.first.parameters())


def test_trainable_periodic_layer_has_phase_parameters():
    cfg = PeriodicNetConfig(d=2, l=11, h=3, w=30)
    model = build_model(cfg, seed=0)
    names = {name for name, _ in model.named_parameters()}
    assert "first.phase" in names
    assert model.first.phase.numel() == 2 * 11


def test_default_architecture_shapes():
    cfg = PeriodicNetConfig(d=6)
    model = build_model(cfg, seed=0)
    assert len(model.hidden) == 3
    assert model.hidden[0].in_features == 6 * 11
    assert model.hidden[0].out_features == 30
    assert model.hidden[1].in_features == 30
    assert model.readout.out_features == 1
    assert model.readout.bias is None


def test_two_dimensional_two_node_instance():
    # smallest planar instance: two periodic nodes per coordinate feeding
    # three hidden layers, scalar read-out
    cfg = PeriodicNetConfig(d=2, l=2, h=3, w=5)
    model = build_model(cfg, seed=0)
    assert model.first.phase.numel() == 4
    assert model.hidden[0].in_features == 4
    assert len(model.hidden) == 3
    x = torch.rand(9, 2, dtype=torch.float64)
    assert model(x).shape == (9,)


def test_seeded_build_is_deterministic():
    cfg = PeriodicNetConfig(d=2, l=3, h=2, w=8)
    m1 = build_model(cfg, seed=9)
    m2 = build_model(cfg, seed=9)
    for p1, p2 in zip(m1.parameters(), m2.parameters()):
        assert torch.equal(p1, p2)
