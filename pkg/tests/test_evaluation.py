"""Monte Carlo error measurement and geometric aggregation."""

import math

import numpy as np
import pytest

from cfc.evaluation import geometric_stats, relative_l2_error
from cfc.problem import example_solution


def test_exact_against_itself_is_zero():
    u = example_solution(2, 3)
    rep = relative_l2_error(u, u, M=2000, seed=0, d=3)
    assert rep.relative_l2 <= 1e-14


def test_zero_approximation_gives_one():
    u = example_solution(2, 2)
    rep = relative_l2_error(u, lambda X: np.zeros(np.atleast_2d(X).shape[0]),
                            M=2000, seed=0, d=2)
    assert rep.relative_l2 == pytest.approx(1.0)


def test_fourier_synthesis_of_sine():
    from cfc.basis import synthesize_many

    def exact(X):
        X = np.atleast_2d(X)
        return np.sin(2 * np.pi * X[:, 0])

    coeffs = {(1, 0): -0.5j, (-1, 0): 0.5j}
    rep = relative_l2_error(exact, lambda X: synthesize_many(coeffs, X),
                            M=5000, seed=1, d=2)
    assert rep.relative_l2 <= 1e-12


def test_zero_denominator_guard():
    zero = lambda X: np.zeros(np.atleast_2d(X).shape[0])
    with pytest.raises(ValueError):
        relative_l2_error(zero, zero, M=100, seed=0, d=2)


def test_requires_dimension_or_points():
    u = example_solution(1, 2)
    with pytest.raises(ValueError):
        relative_l2_error(u, u, M=10, seed=0)


def test_explicit_points_override():
    u = example_solution(1, 2)
    pts = np.random.default_rng(2).random((64, 2))
    rep = relative_l2_error(u, lambda X: np.zeros(np.atleast_2d(X).shape[0]),
                            points=pts)
    assert rep.M == 64
    assert rep.relative_l2 == pytest.approx(1.0)


def test_reproducibility_per_seed():
    u = example_solution(3, 4)
    approx = lambda X: u.value(X) + 0.05 * np.cos(2 * np.pi * X[:, 0])
    a = relative_l2_error(u, approx, M=1000, seed=5, d=4)
    b = relative_l2_error(u, approx, M=1000, seed=5, d=4)
    c = relative_l2_error(u, approx, M=1000, seed=6, d=4)
    assert a.relative_l2 == b.relative_l2
    assert a.relative_l2 != c.relative_l2


def test_scale_equivariance():
    u = example_solution(2, 2)
    approx = lambda X: 0.7 * u.value(X)
    base = relative_l2_error(u, approx, M=2000, seed=3, d=2).relative_l2
    scaled_exact = lambda X: -13.7 * u.value(X)
    scaled_approx = lambda X: -13.7 * 0.7 * u.value(X)
    scaled = relative_l2_error(scaled_exact, scaled_approx, M=2000, seed=3, d=2).relative_l2
    assert scaled == pytest.approx(base, abs=1e-14)


def test_monte_carlo_consistency_across_sample_sizes():
    u = example_solution(2, 2)
    approx = lambda X: u.value(X) * (1.0 + 0.1 * np.sin(2 * np.pi * X[:, 1]))
    small = [relative_l2_error(u, approx, M=10_000, seed=s, d=2).relative_l2
             for s in range(20)]
    big = relative_l2_error(u, approx, M=100_000, seed=100, d=2).relative_l2
    se = float(np.std(small, ddof=1))
    assert abs(float(np.mean(small)) - big) < 3 * se


def test_geometric_stats_log_midpoint():
    stats = geometric_stats([1e-2, 1e-4])
    assert stats["geo_mean"] == pytest.approx(1e-3)


def test_geometric_stats_constant_sequence():
    stats = geometric_stats([0.37, 0.37, 0.37])
    assert stats["geo_mean"] == pytest.approx(0.37)
    assert stats["geo_std_corrected"] == pytest.approx(1.0)


def test_geometric_stats_two_point_std():
    stats = geometric_stats([1.0, math.e ** 2])
    assert stats["geo_std_corrected"] == pytest.approx(math.exp(math.sqrt(2.0)))


def test_geometric_stats_guards():
    with pytest.raises(ValueError):
        geometric_stats([])
    with pytest.raises(ValueError):
        geometric_stats([0.1, -0.2])
    assert geometric_stats([0.5])["geo_std_corrected"] == 1.0
