"""Training loop behavior on tiny synthetic dumps."""

import math

import numpy as np
import pytest

from periodic_pinn import (
    PeriodicNetConfig,
    TorusProblem,
    train_and_evaluate,
    write_result_row,
)
from periodic_pinn.train import RESULT_FIELDS, relative_l2

TWO_PI = 2 * math.pi


def make_dump(tmp_path, m=64, eval_m=256, d=2, rho=0.5, seed=0):
    """Self-contained dump for u = sin(2 pi x1) with a == 1."""
    rng = np.random.default_rng(seed)
    pts = rng.random((m, d))
    f = (4 * math.pi ** 2 + rho) * np.sin(TWO_PI * pts[:, 0])
    eval_pts = rng.random((eval_m, d))
    u = np.sin(TWO_PI * eval_pts[:, 0])
    lines = ["x1,x2,f"] + [f"{float(p[0])!r},{float(p[1])!r},{float(v)!r}"
                           for p, v in zip(pts, f)]
    (tmp_path / "sample_points.csv").write_text("\n".join(lines) + "\n")
    lines = ["x1,x2,u"] + [f"{float(p[0])!r},{float(p[1])!r},{float(v)!r}"
                           for p, v in zip(eval_pts, u)]
    (tmp_path / "eval_points.csv").write_text("\n".join(lines) + "\n")
    (tmp_path / "meta.json").write_text('{"d": 2, "seed": 0, "m": %d}' % m)
    return TorusProblem(dimension=d, rho=rho, a0=1.0, modes={})


def test_zero_epochs_gives_unit_error(tmp_path):
    problem = make_dump(tmp_path)
    cfg = PeriodicNetConfig(d=2, l=4, h=2, w=12)
    report = train_and_evaluate(cfg, problem, tmp_path, epochs=0, seed=0)
    assert report["rel_l2"] == pytest.approx(1.0)
    assert report["status"] == "ok"
    assert report["best_epoch"] == 0


def test_training_reduces_loss_and_error(tmp_path):
    # short seeded run: the machinery must beat the zero model; paper-scale
    # accuracy needs the hours-scale budget and lives in scripts/
    problem = make_dump(tmp_path)
    cfg = PeriodicNetConfig(d=2, l=6, h=2, w=24)
    base = train_and_evaluate(cfg, problem, tmp_path, epochs=0, seed=1)
    trained = train_and_evaluate(cfg, problem, tmp_path, epochs=2000, seed=1,
                                 lr=1e-2, log_csv=tmp_path / "log.csv")
    assert trained["best_loss"] < 1e-4 * base["best_loss"]
    assert trained["rel_l2"] < 0.8 * base["rel_l2"]
    assert trained["best_epoch"] > 0
    log = (tmp_path / "log.csv").read_text().splitlines()
    assert log[0] == "epoch,loss,rel_l2"
    assert len(log) == 2001


def test_best_checkpoint_is_restored(tmp_path):
    problem = make_dump(tmp_path)
    cfg = PeriodicNetConfig(d=2, l=3, h=1, w=8)
    report = train_and_evaluate(cfg, problem, tmp_path, epochs=120, seed=2, lr=5e-3)
    # the reported error must come from the best-loss parameters, which by
    # construction are at least as good on the training objective as epoch 120
    assert report["best_epoch"] <= report["epochs"]
    assert report["status"] == "ok"


def test_dimension_mismatch_rejected(tmp_path):
    problem_3d = TorusProblem(dimension=3, rho=0.5, a0=1.0, modes={})
    make_dump(tmp_path)
    cfg = PeriodicNetConfig(d=3, l=3, h=1, w=8)
    with pytest.raises(ValueError):
        train_and_evaluate(cfg, problem_3d, tmp_path, epochs=1)


def test_result_row_schema(tmp_path):
    problem = make_dump(tmp_path)
    cfg = PeriodicNetConfig(d=2, l=3, h=1, w=8, lambda_l1=0.01)
    report = train_and_evaluate(cfg, problem, tmp_path, epochs=5, seed=3)
    out = tmp_path / "results.csv"
    write_result_row(out, report, problem, m=64, run=1)
    write_result_row(out, report, problem, m=64, run=2)
    lines = out.read_text().splitlines()
    assert lines[0] == ",".join(RESULT_FIELDS)
    assert len(lines) == 3
    row = dict(zip(RESULT_FIELDS, lines[1].split(",")))
    assert row["method"] == "pinn"
    assert row["epochs"] == "5"
    assert float(row["lambda_l1"]) == 0.01


def test_relative_l2_guard():
    with pytest.raises(ValueError):
        relative_l2(np.zeros(4), np.ones(4))
