"""PDE residual loss with automatic second derivatives.

The operator value -grad(a).grad(psi) - a lap(psi) + rho psi is built from
autograd: one backward pass for the gradient, then one per coordinate for the
Hessian diagonal.  Periodicity is enforced by the architecture, so the loss
carries no boundary term.  With lambda_l1 = 0 the loss is the plain MSE of the
residual; otherwise it is the RMSE plus lambda_l1 times the l1 norm of the
read-out weights.
"""

from __future__ import annotations

import numpy as np
import torch

from .problem import TorusProblem


def _grad_or_zero(scalar, x):
    if not scalar.requires_grad:
        return torch.zeros_like(x)
    g = torch.autograd.grad(scalar, x, create_graph=True, allow_unused=True)[0]
    return torch.zeros_like(x) if g is None else g


def operator_values(model, x: torch.Tensor, a_vals: torch.Tensor,
                    grad_a_vals: torch.Tensor, rho: float) -> torch.Tensor:
    """[-div(a grad psi) + rho psi](x_i) for a differentiable scalar field."""
    x = x.detach().requires_grad_(True)
    u = model(x)
    grad = _grad_or_zero(u.sum(), x)
    lap = torch.zeros_like(u)
    for k in range(x.shape[1]):
        lap = lap + _grad_or_zero(grad[:, k].sum(), x)[:, k]
    return -(grad_a_vals * grad).sum(dim=1) - a_vals * lap + rho * u


def residual_loss(model, problem: TorusProblem, points: np.ndarray,
                  f_values: np.ndarray, lambda_l1: float = 0.0) -> torch.Tensor:
    """Training loss at the shared collocation points."""
    x = torch.as_tensor(np.asarray(points, dtype=np.float64))
    f = torch.as_tensor(np.asarray(f_values, dtype=np.float64))
    a_vals = torch.as_tensor(problem.diffusion_values(points))
    grad_a = torch.as_tensor(problem.diffusion_gradients(points))
    residual = operator_values(model, x, a_vals, grad_a, problem.rho) - f
    mse = torch.mean(residual ** 2)
    if lambda_l1 == 0.0:
        return mse
    return torch.sqrt(mse) + lambda_l1 * model.last_layer_l1()


def laplacian_autograd(model, points: np.ndarray) -> np.ndarray:
    """Hessian-diagonal sum of the network at given points (diagnostic)."""
    x = torch.as_tensor(np.asarray(points, dtype=np.float64)).requires_grad_(True)
    u = model(x)
    grad = _grad_or_zero(u.sum(), x)
    lap = torch.zeros_like(u)
    for k in range(x.shape[1]):
        lap = lap + _grad_or_zero(grad[:, k].sum(), x)[:, k]
    return lap.detach().numpy()
