"""Sampling determinism and collocation system assembly."""

import numpy as np
import pytest

from cfc.basis import rescale_factor
from cfc.collocation import (
    SamplePlan,
    assemble,
    evaluation_points,
    extend_columns,
    load_system,
    read_points_csv,
    sample_points,
    save_system,
    write_points_csv,
)
from cfc.multiindex import enumerate_hyperbolic_cross
from cfc.problem import (
    constant_diffusion,
    example1_fourier_coefficients,
    manufactured_problem,
)


def test_sampling_is_deterministic():
    p1 = sample_points(3, 2, seed=7)
    p2 = sample_points(3, 2, seed=7)
    assert np.array_equal(p1.points, p2.points)
    assert not np.array_equal(p1.points, sample_points(3, 2, seed=8).points)


def test_sampling_range_and_mean():
    plan = sample_points(100_000, 3, seed=1)
    assert np.all(plan.points >= 0.0) and np.all(plan.points < 1.0)
    means = plan.points.mean(axis=0)
    assert np.all(np.abs(means - 0.5) < 0.01)


def test_evaluation_stream_is_distinct():
    pts = evaluation_points(50, 2, seed=7)
    plan = sample_points(50, 2, seed=7)
    assert not np.allclose(pts, plan.points)


def test_plan_points_are_read_only():
    plan = sample_points(4, 2, seed=0)
    with pytest.raises(ValueError):
        plan.points[0, 0] = 2.0


def test_constant_coefficient_matrix_is_fourier_sampling():
    d, n, m = 3, 4, 60
    prob = manufactured_problem(2, d, 0.5, diffusion=constant_diffusion(d))
    cols = enumerate_hyperbolic_cross(d, n)
    plan = sample_points(m, d, seed=3)
    system = assemble(prob, cols, plan)
    V = np.asarray(cols, dtype=float)
    F = np.exp(2j * np.pi * np.mod(plan.points @ V.T, 1.0)) / np.sqrt(m)
    assert np.max(np.abs(system.matrix - F)) < 1e-12


def test_single_zero_column_is_constant():
    d, m = 2, 25
    prob = manufactured_problem(1, d, 0.8, diffusion=constant_diffusion(d, a0=1.7))
    plan = sample_points(m, d, seed=5)
    system = assemble(prob, [(0, 0)], plan)
    assert np.allclose(system.matrix[:, 0], 1.7 / np.sqrt(m), atol=1e-13)


def test_exact_solution_residual_when_support_covered():
    d = 6
    prob = manufactured_problem(1, d, 0.5)
    support = list(example1_fourier_coefficients(d).keys())
    columns = support + [(0,) * d, (1, 0, 0, 0, 0, 0)]
    plan = sample_points(400, d, seed=11)
    system = assemble(prob, columns, plan)
    c = np.zeros(len(columns), dtype=complex)
    fc = example1_fourier_coefficients(d)
    for j, nu in enumerate(columns):
        c[j] = fc.get(nu, 0.0) / rescale_factor(nu, prob.rho, prob.a.a0)
    assert np.linalg.norm(system.matrix @ c - system.rhs) <= 1e-10


def test_extend_columns():
    d = 2
    prob = manufactured_problem(2, d, 0.5)
    plan = sample_points(40, d, seed=2)
    base_cols = [(0, 0), (1, 0), (-1, 0)]
    new_cols = [(0, 1), (0, -1)]
    system = assemble(prob, base_cols, plan)
    assert extend_columns(system, []) is system
    extended = extend_columns(system, new_cols)
    oneshot = assemble(prob, base_cols + new_cols, plan)
    assert np.array_equal(extended.matrix, oneshot.matrix)
    assert extended.columns == oneshot.columns
    assert np.array_equal(extended.matrix[:, :3], system.matrix)
    with pytest.raises(ValueError):
        extend_columns(system, [(1, 0)])


def test_extend_by_unit_vector_constant_coefficient():
    d, m = 2, 30
    prob = manufactured_problem(2, d, 0.5, diffusion=constant_diffusion(d))
    plan = sample_points(m, d, seed=4)
    system = assemble(prob, [(0, 0)], plan)
    extended = extend_columns(system, [(1, 0)])
    expected = np.exp(2j * np.pi * plan.points[:, 0]) / np.sqrt(m)
    assert np.allclose(extended.matrix[:, 1], expected, atol=1e-13)


def test_row_scaling_with_m():
    d = 2
    prob = manufactured_problem(2, d, 0.5)
    plan = sample_points(20, d, seed=6)
    tiled = SamplePlan(points=np.tile(plan.points, (4, 1)), seed=plan.seed,
                       m=4 * plan.m, d=d)
    cols = [(0, 0), (1, 0), (1, -1)]
    small = assemble(prob, cols, plan)
    big = assemble(prob, cols, tiled)
    assert np.allclose(big.matrix[:20], 0.5 * small.matrix, atol=1e-14)


def test_duplicate_columns_rejected():
    prob = manufactured_problem(2, 2, 0.5)
    plan = sample_points(10, 2, seed=0)
    with pytest.raises(ValueError):
        assemble(prob, [(0, 0), (0, 0)], plan)


def test_dimension_mismatch_rejected():
    prob = manufactured_problem(2, 3, 0.5)
    plan = sample_points(10, 2, seed=0)
    with pytest.raises(ValueError):
        assemble(prob, [(0, 0)], plan)


def test_empirical_gram_smoke():
    # mean of A*A over independent plans approaches the explicit Gram matrix
    from cfc.analysis import gram_matrix
    d, n = 2, 2
    prob = manufactured_problem(2, d, 0.5)
    cols = enumerate_hyperbolic_cross(d, n)
    G = gram_matrix(prob.a, prob.rho, cols)
    acc = np.zeros_like(G)
    reps, m = 40, 2500
    for r in range(reps):
        system = assemble(prob, cols, sample_points(m, d, seed=1000 + r))
        acc += system.matrix.conj().T @ system.matrix
    acc /= reps
    assert np.max(np.abs(acc - G)) < 0.1


def test_save_load_roundtrip(tmp_path):
    prob = manufactured_problem(1, 2, 0.5)
    plan = sample_points(12, 2, seed=9)
    system = assemble(prob, [(0, 0), (2, 1), (-2, -1)], plan)
    path = tmp_path / "system.bin"
    save_system(system, path)
    back = load_system(path)
    assert np.array_equal(back.matrix, system.matrix)
    assert np.array_equal(back.rhs, system.rhs)
    assert back.columns == system.columns
    assert back.plan.seed == plan.seed
    assert np.array_equal(back.plan.points, plan.points)


def test_points_csv_roundtrip(tmp_path):
    pts = sample_points(17, 3, seed=1).points
    vals = np.arange(17, dtype=float) * 0.25
    path = tmp_path / "pts.csv"
    write_points_csv(path, pts, vals, label="f")
    back_pts, back_vals = read_points_csv(path)
    assert np.array_equal(back_pts, pts)
    assert np.array_equal(back_vals, vals)
    path2 = tmp_path / "bare.csv"
    write_points_csv(path2, pts)
    bare_pts, bare_vals = read_points_csv(path2)
    assert np.array_equal(bare_pts, pts)
    assert bare_vals is None
