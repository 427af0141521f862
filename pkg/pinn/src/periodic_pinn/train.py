"""Full-batch Adam training on the PDE residual with best-checkpoint tracking.

Defaults (learning rate 1e-3, full batch, no schedule) are recorded in the
output metadata.  Early stopping keeps the parameters with the lowest training
loss seen and restores them before evaluation.  Per-epoch losses stream to CSV
when a log path is given; the final row follows the solver package's result
schema with method = pinn plus epochs, lambda_l1 and frozen_M columns.
"""

from __future__ import annotations

import copy
import math
from pathlib import Path

import numpy as np
import torch

from .data import read_eval_dump, read_sample_dump
from .loss import residual_loss
from .model import PeriodicNetConfig, build_model
from .problem import TorusProblem

RESULT_FIELDS = ["example", "d", "m", "method", "run", "seed", "iterations",
                 "support_size", "rel_l2", "status", "epochs", "lambda_l1", "frozen_M"]


def relative_l2(u: np.ndarray, uh: np.ndarray) -> float:
    denom = float(np.sum(u ** 2))
    if denom == 0.0:
        raise ValueError("zero denominator in relative error")
    return math.sqrt(float(np.sum((u - uh) ** 2)) / denom)


def evaluate_model(model, eval_points: np.ndarray, eval_values: np.ndarray) -> float:
    with torch.no_grad():
        pred = model(torch.as_tensor(np.asarray(eval_points, dtype=np.float64)))
    return relative_l2(np.asarray(eval_values, dtype=float), pred.numpy())


def train_and_evaluate(cfg: PeriodicNetConfig, problem: TorusProblem,
                       dump_dir, epochs: int, seed: int = 0, lr: float = 1e-3,
                       log_csv=None, eval_every: int = 0) -> dict:
    """Train on the shared sample dump; score on the shared evaluation dump."""
    points, f_values = read_sample_dump(dump_dir)
    eval_points, eval_values = read_eval_dump(dump_dir)
    if points.shape[1] != problem.dimension:
        raise ValueError("dump dimension does not match the problem")

    model = build_model(cfg, seed=seed)
    optimizer = torch.optim.Adam(model.parameters(), lr=lr)
    best_loss = float(residual_loss(model, problem, points, f_values,
                                    cfg.lambda_l1).item())
    best_state = copy.deepcopy(model.state_dict())
    best_epoch = 0
    status = "ok"

    log_fh = open(log_csv, "w") if log_csv is not None else None
    if log_fh:
        log_fh.write("epoch,loss,rel_l2\n")
    try:
        for epoch in range(1, epochs + 1):
            optimizer.zero_grad()
            loss = residual_loss(model, problem, points, f_values, cfg.lambda_l1)
            loss.backward()
            optimizer.step()
            loss_val = float(loss.item())
            if math.isnan(loss_val):
                status = "diverged"
                break
            if loss_val < best_loss:
                best_loss = loss_val
                best_state = copy.deepcopy(model.state_dict())
                best_epoch = epoch
            if log_fh:
                row = f"{epoch},{loss_val!r}"
                if eval_every and epoch % eval_every == 0:
                    row += f",{evaluate_model(model, eval_points, eval_values)!r}"
                log_fh.write(row + "\n")
                if epoch % 100 == 0:
                    log_fh.flush()
    finally:
        if log_fh:
            log_fh.close()

    model.load_state_dict(best_state)
    rel = evaluate_model(model, eval_points, eval_values)

    n_params = sum(p.numel() for p in model.parameters() if p.requires_grad)
    return {
        "rel_l2": rel,
        "best_epoch": best_epoch,
        "best_loss": best_loss,
        "epochs": epochs,
        "status": status,
        "trainable_parameters": n_params,
        "optimizer": {"name": "adam", "lr": lr, "batch": "full"},
        "lambda_l1": cfg.lambda_l1,
        "frozen_M": cfg.frozen_features,
        "seed": seed,
    }


def write_result_row(path, report: dict, problem: TorusProblem, m: int,
                     run: int = 0) -> None:
    """Append-style result CSV in the shared schema (one header, one row)."""
    row = [str(problem.example), str(problem.dimension), str(m), "pinn",
           str(run), str(report["seed"]), str(report["epochs"]),
           str(report["trainable_parameters"]), repr(report["rel_l2"]),
           report["status"], str(report["epochs"]), repr(report["lambda_l1"]),
           str(report["frozen_M"] if report["frozen_M"] is not None else 0)]
    new = not Path(path).exists()
    with open(path, "a") as fh:
        if new:
            fh.write(",".join(RESULT_FIELDS) + "\n")
        fh.write(",".join(row) + "\n")
