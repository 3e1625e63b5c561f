from __future__ import annotations

import dataclasses
import math

import numpy as np
import pytest
from scipy.integrate import quad

from grauert_tubes import DomainError, Family, InsufficientGridError, SpaceSpec, ricci_flat_potential, solve_potential
from grauert_tubes.analysis import (
    boundary_growth_check,
    completeness_length,
    curvature_center_sweep,
    curvature_threshold,
    lemma41_check,
    lower_bound_hyperbolic,
    ricci_flat_completeness,
)

HALF_PI = math.pi / 2


def analytic_length(delta):
    # (1/sqrt 2) int_0^(pi/2 - delta) sec u du for h = -log cos u
    u = HALF_PI - delta
    return math.log(1.0 / math.cos(u) + math.tan(u)) / math.sqrt(2.0)


def test_oracle_lengths(log_cos_solution):
    rep = completeness_length(log_cos_solution, [1e-2, 1e-3, 1e-4])
    assert rep.lengths[1] == pytest.approx(5.3746, abs=0.01)
    assert rep.lengths[1] == pytest.approx(analytic_length(1e-3), abs=1e-3)
    assert rep.lengths[2] / rep.lengths[0] == pytest.approx(1.869, abs=0.02)
    assert rep.log_slope == pytest.approx(1.0 / math.sqrt(2.0), abs=0.01)
    assert all(b > a for a, b in zip(rep.lengths, rep.lengths[1:]))


def test_single_cutoff(log_cos_solution):
    rep = completeness_length(log_cos_solution, [1e-2])
    assert len(rep.lengths) == 1 and rep.log_slope is None


def test_cutoff_validation(log_cos_solution):
    with pytest.raises(DomainError):
        completeness_length(log_cos_solution, [1e-3, 1e-2])
    with pytest.raises(DomainError):
        completeness_length(log_cos_solution, [2.0])
    with pytest.raises(DomainError):
        completeness_length(log_cos_solution, [])
    short = dataclasses.replace(log_cos_solution, grid=log_cos_solution.grid.restrict(1.0))
    with pytest.raises(InsufficientGridError):
        completeness_length(short, [1e-3])


@pytest.mark.parametrize(
    "family, n, lam, r",
    [(Family.REAL_HYPERBOLIC, 2, 3.0, HALF_PI), (Family.REAL_HYPERBOLIC, 3, 1.0, 3.0),
     (Family.ROUND_SPHERE, 2, 1.0, 2.0), (Family.COMPLEX_PROJECTIVE, 4, 1.0, 3.0), (Family.EUCLIDEAN, 2, 1.0, 1.0)],
)
def test_boundary_growth(family, n, lam, r):
    sol = solve_potential(SpaceSpec(family, n), lam, r)
    rep = boundary_growth_check(sol)
    assert rep.ok
    assert all(r - u < 0.05 for u in rep.u)


def test_boundary_growth_offsets_must_be_in_window(log_cos_solution):
    with pytest.raises(DomainError):
        boundary_growth_check(log_cos_solution, offsets=[0.1])


def test_ricci_flat_completeness_euclidean():
    K = ricci_flat_potential(SpaceSpec(Family.EUCLIDEAN, 3), 4.0)
    lengths = ricci_flat_completeness(K, [0.0, 1.0, 2.0, 4.0])
    assert lengths[0] == 0.0
    assert lengths[2] == pytest.approx(math.sqrt(2.0), abs=1e-12)
    assert np.allclose(lengths, np.array([0.0, 1.0, 2.0, 4.0]) / math.sqrt(2.0), atol=1e-12)


def test_ricci_flat_completeness_sphere(sphere2):
    K = ricci_flat_potential(sphere2, 8.0)
    t = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0]
    lengths = ricci_flat_completeness(K, t)
    for ti, Li in zip(t, lengths):
        exact = quad(lambda x: math.sqrt(math.cosh(x / 2)), 0.0, ti, epsabs=1e-13)[0] / math.sqrt(2.0)
        assert Li == pytest.approx(exact, abs=1e-8)
    assert lengths[3] > lengths[1] > 0.0
    steps = np.diff(lengths[1:])
    assert np.all(np.diff(steps) > 0.0)


def test_ricci_flat_completeness_checks(sphere2):
    K = ricci_flat_potential(sphere2, 2.0)
    assert ricci_flat_completeness(K, []) == []
    with pytest.raises(DomainError):
        ricci_flat_completeness(K, [1.0, 0.5])
    with pytest.raises(DomainError):
        ricci_flat_completeness(K, [3.0])


def test_lower_bounds():
    assert lower_bound_hyperbolic(2) == pytest.approx(-7.87480, abs=1e-5)
    assert lower_bound_hyperbolic(3) == pytest.approx(-math.pi * (3 * math.pi) ** (1 / 3), abs=1e-12)
    assert lower_bound_hyperbolic(3) == pytest.approx(-6.63601, abs=1e-5)


@pytest.mark.parametrize("n", [2, 3])
def test_lemma41(n):
    rep = lemma41_check(n, [0.1, 1.0, 2.0, 3.0])
    assert rep.ok and rep.monotone_ok
    assert rep.a[0] > 0.0
    assert rep.worst_margin == pytest.approx(rep.a[-1] - rep.bound)


def test_thresholds():
    assert curvature_threshold(5) == pytest.approx(1.0 / 9.0)
    assert curvature_threshold(2) == pytest.approx(1.0 / 18.0)


def test_curvature_examples():
    sweep = curvature_center_sweep(2, [0.5, HALF_PI])
    small, half = sweep.reports
    assert small.a > 0.0 and small.b > 0.5 and small.negative_at_center
    assert half.a == pytest.approx(0.0, abs=1e-4)
    assert half.b == pytest.approx(0.5, abs=1e-4) and half.negative_at_center
    for rep in sweep.reports:
        assert rep.b == pytest.approx(rep.b_from_grid, abs=1e-10)


@pytest.mark.parametrize("n", range(2, 9))
def test_epsilon_estimate_nonnegative(n):
    radii = [round(1.5 + 0.01 * i, 10) for i in range(11)]
    sweep = curvature_center_sweep(n, radii)
    assert not sweep.failures
    assert sweep.epsilon_estimate is not None and sweep.epsilon_estimate >= 0.0
    assert sweep.resolution == pytest.approx(0.01)
    assert all(rep.negative_at_center for rep in sweep.reports if rep.r <= HALF_PI)
