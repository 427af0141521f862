"""Diffusion coefficients, exact solutions and manufactured forcing."""

import math

import numpy as np
import pytest

from cfc.problem import (
    ConfigError,
    DiffusionCoefficient,
    ExactSolution,
    ProblemSpec,
    constant_diffusion,
    diffusion_from_config,
    example1_fourier_coefficients,
    example_solution,
    manufactured_forcing,
    manufactured_problem,
    paper_diffusion,
    problem_from_config,
)

TWO_PI = 2 * math.pi


# ------------------------------------------------------------- diffusion


def test_paper_diffusion_point_values():
    a = paper_diffusion(2)
    assert a.evaluate((0.0, 0.0)) == pytest.approx(1.0)
    assert a.evaluate((0.25, 0.25)) == pytest.approx(1.25)


def test_paper_diffusion_modes():
    a = paper_diffusion(4)
    assert len(a.modes) == 4
    assert all(abs(v) == pytest.approx(1 / 16) for v in a.modes.values())
    assert set(a.support) == {(1, 1, 0, 0), (1, -1, 0, 0), (-1, 1, 0, 0), (-1, -1, 0, 0)}


def test_paper_diffusion_matches_closed_form():
    a = paper_diffusion(3)
    rng = np.random.default_rng(0)
    X = rng.random((200, 3))
    expected = 1 + 0.25 * np.sin(TWO_PI * X[:, 0]) * np.sin(TWO_PI * X[:, 1])
    assert np.allclose(a.evaluate_many(X), expected, atol=1e-13)


def test_paper_diffusion_grid_minimum():
    a = paper_diffusion(2)
    g = np.linspace(0.0, 1.0, 101)
    XX, YY = np.meshgrid(g, g)
    pts = np.column_stack([XX.ravel(), YY.ravel()])
    assert float(np.min(a.evaluate_many(pts))) >= 0.75 - 1e-12


def test_paper_diffusion_rejects_low_dimension():
    with pytest.raises(ValueError):
        paper_diffusion(1)


def test_diffusion_validation():
    with pytest.raises(ValueError):
        DiffusionCoefficient(a0=-1.0, modes={}, dimension=2)
    with pytest.raises(ValueError):  # not Hermitian
        DiffusionCoefficient(a0=1.0, modes={(1, 0): 0.5}, dimension=2)
    with pytest.raises(ValueError):  # zero index in modes
        DiffusionCoefficient(a0=1.0, modes={(0, 0): 0.5}, dimension=2)
    with pytest.raises(ValueError):  # not elliptic
        DiffusionCoefficient(a0=0.1, modes={(1, 0): 0.5, (-1, 0): 0.5}, dimension=2)


def test_diffusion_gradient_matches_finite_differences():
    a = paper_diffusion(2)
    rng = np.random.default_rng(1)
    h = 1e-6
    for _ in range(20):
        x = rng.random(2)
        g = a.gradient(x)
        for k in range(2):
            e = np.zeros(2)
            e[k] = h
            fd = (a.evaluate(x + e) - a.evaluate(x - e)) / (2 * h)
            assert g[k] == pytest.approx(fd, rel=1e-6, abs=1e-6)


# -------------------------------------------------------- exact solutions


def test_example_values():
    u1 = example_solution(1, 2)
    assert u1.value_at((0.125, 0.25)) == pytest.approx(1.0)
    u2 = example_solution(2, 2)
    assert u2.value_at((0.0, 0.0)) == pytest.approx(1.0)
    with pytest.raises(ValueError):
        example_solution(4, 2)
    with pytest.raises(ValueError):
        example_solution(1, 1)


def test_example3_uniform_bound():
    u3 = example_solution(3, 6)
    rng = np.random.default_rng(2)
    vals = u3.value(rng.random((5000, 6)))
    assert float(np.max(vals)) <= math.exp(math.pi ** 2 / 6) + 1e-12


@pytest.mark.parametrize("k,d", [(1, 2), (1, 5), (2, 3), (3, 4), (3, 6)])
def test_gradient_and_laplacian_consistency(k, d):
    u = example_solution(k, d)
    rng = np.random.default_rng(3)
    h = 1e-5
    X = rng.random((10, d))
    g = u.gradient(X)
    lap = u.laplacian(X)
    for i in range(X.shape[0]):
        fd_lap = 0.0
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            up = u.value((X[i] + e).reshape(1, -1))[0]
            dn = u.value((X[i] - e).reshape(1, -1))[0]
            mid = u.value(X[i].reshape(1, -1))[0]
            fd_grad = (up - dn) / (2 * h)
            assert g[i, j] == pytest.approx(fd_grad, rel=1e-5, abs=1e-5)
            fd_lap += (up - 2 * mid + dn) / h ** 2
        assert lap[i] == pytest.approx(fd_lap, rel=1e-4, abs=1e-4)


def test_example1_fourier_coefficients_synthesize():
    from cfc.basis import synthesize_many
    coeffs = example1_fourier_coefficients(3)
    u1 = example_solution(1, 3)
    rng = np.random.default_rng(4)
    X = rng.random((100, 3))
    synth = synthesize_many(coeffs, X)
    assert np.max(np.abs(synth - u1.value(X))) <= 1e-12


# ----------------------------------------------------- manufactured terms


def test_manufactured_forcing_constant_coefficient():
    d = 3
    a = constant_diffusion(d, 1.0)

    def value(X):
        X = np.atleast_2d(X)
        return np.sin(TWO_PI * X[:, 0])

    def gradient(X):
        X = np.atleast_2d(X)
        g = np.zeros_like(X)
        g[:, 0] = TWO_PI * np.cos(TWO_PI * X[:, 0])
        return g

    def laplacian(X):
        return -4 * math.pi ** 2 * value(X)

    u = ExactSolution(value, gradient, laplacian, label="sine")
    f = manufactured_forcing(a, 0.5, u)
    rng = np.random.default_rng(5)
    X = rng.random((50, d))
    expected = (4 * math.pi ** 2 + 0.5) * np.sin(TWO_PI * X[:, 0])
    assert np.allclose(f(X), expected, atol=1e-12)


def test_manufactured_forcing_zero_solution():
    d = 2
    zero = ExactSolution(lambda X: np.zeros(np.atleast_2d(X).shape[0]),
                         lambda X: np.zeros_like(np.atleast_2d(X)),
                         lambda X: np.zeros(np.atleast_2d(X).shape[0]),
                         label="zero")
    f = manufactured_forcing(paper_diffusion(d), 0.5, zero)
    X = np.random.default_rng(6).random((20, d))
    assert np.allclose(f(X), 0.0)


def test_manufactured_forcing_matches_finite_difference_operator():
    # apply the operator to u1 by finite differences and compare with f
    d = 2
    prob = manufactured_problem(1, d, rho=0.5)
    u = prob.exact
    a = prob.a
    rng = np.random.default_rng(7)
    h = 1e-5
    for _ in range(10):
        x = rng.random(d)
        lap_u = 0.0
        grad_u = np.zeros(d)
        for j in range(d):
            e = np.zeros(d)
            e[j] = h
            up = u.value((x + e).reshape(1, -1))[0]
            dn = u.value((x - e).reshape(1, -1))[0]
            mid = u.value(x.reshape(1, -1))[0]
            grad_u[j] = (up - dn) / (2 * h)
            lap_u += (up - 2 * mid + dn) / h ** 2
        val = -a.gradient(x) @ grad_u - a.evaluate(x) * lap_u + 0.5 * u.value_at(x)
        f_val = prob.forcing(x.reshape(1, -1))[0]
        assert f_val == pytest.approx(val, rel=1e-5, abs=1e-4)


@pytest.mark.parametrize("k", [1, 2, 3])
def test_pointwise_pde_residual(k):
    prob = manufactured_problem(k, 4, rho=0.5)
    rng = np.random.default_rng(8)
    X = rng.random((100, 4))
    grad_a = prob.a.gradient_many(X)
    grad_u = prob.exact.gradient(X)
    lhs = -np.einsum("ij,ij->i", grad_a, grad_u) \
        - prob.a.evaluate_many(X) * prob.exact.laplacian(X) + prob.rho * prob.exact.value(X)
    f = prob.forcing(X)
    assert np.all(np.abs(lhs - f) <= 1e-10 * (1.0 + np.abs(f)))


def test_problem_spec_validation():
    with pytest.raises(ValueError):
        ProblemSpec(a=constant_diffusion(2), rho=0.0,
                    forcing=lambda X: np.zeros(1), dimension=2)
    with pytest.raises(ValueError):
        ProblemSpec(a=constant_diffusion(3), rho=0.5,
                    forcing=lambda X: np.zeros(1), dimension=2)


# ------------------------------------------------------------------ config


def test_problem_from_config_builtin():
    cfg = {"dimension": 3, "rho": 0.5, "example": 2}
    prob = problem_from_config(cfg)
    assert prob.dimension == 3
    assert prob.exact is not None
    assert prob.a.modes  # defaults to the built-in oscillatory coefficient


def test_problem_from_config_custom_diffusion():
    cfg = {
        "dimension": 2, "rho": 0.7, "example": 1,
        "diffusion": {
            "a0": 2.0,
            "modes": [
                {"index": [1, 0], "re": 0.1, "im": 0.05},
                {"index": [-1, 0], "re": 0.1, "im": -0.05},
            ],
        },
    }
    prob = problem_from_config(cfg)
    assert prob.a.a0 == 2.0
    assert prob.a.modes[(1, 0)] == pytest.approx(0.1 + 0.05j)


def test_config_errors():
    with pytest.raises(ConfigError):
        problem_from_config({"rho": 0.5})
    with pytest.raises(ConfigError):
        problem_from_config({"dimension": 2, "rho": -1.0})
    with pytest.raises(ConfigError):
        problem_from_config({"dimension": 2, "rho": 0.5, "example": 7})
    with pytest.raises(ConfigError):
        diffusion_from_config({"modes": []}, 2)  # missing a0
    with pytest.raises(ConfigError):
        diffusion_from_config({"a0": 1.0, "modes": [{"re": 1.0}]}, 2)


def test_custom_example_has_no_oracle():
    prob = problem_from_config({"dimension": 2, "rho": 0.5, "example": "custom",
                                "diffusion": {"a0": 1.0, "modes": []}})
    assert prob.exact is None
    assert np.allclose(prob.forcing(np.random.default_rng(0).random((5, 2))), 0.0)
