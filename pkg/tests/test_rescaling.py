from __future__ import annotations

import math

import numpy as np
import pytest

from grauert_tubes import (
    DomainError,
    Family,
    InconsistentInputError,
    SpaceSpec,
    UnsupportedFamilyError,
    ball_exhaustion_check,
    exhaustion_experiment,
    family_sweep,
    ode_residual,
    rescale,
    ricci_flat_potential,
    solve_potential,
)

WINDOW = np.linspace(0.0, 1.9, 39)


@pytest.fixture(scope="module")
def sphere_family(sphere2):
    entries = family_sweep(sphere2, 1.0, [2.0, 3.0], probes=WINDOW)
    return [rescale(e.solution) for e in entries]


def test_rescaled_center_identities(sphere_family):
    for K in sphere_family:
        assert K.grid.h[0] == 0.0
        assert K.grid.h2[0] == pytest.approx(1.0, abs=1e-10)
        assert np.all(K.grid.h >= 0.0)
        assert K.effective_lambda == pytest.approx(math.exp(K.base.a / 2))
        assert K.residual < 1e-8


def test_round_trip(sphere_family):
    for K in sphere_family:
        h = K.base.grid.h
        assert np.all(np.abs(K.reconstruct() - h) <= 1e-12 * np.maximum(1.0, np.abs(h)))


def test_rescaled_ordering_and_slopes(sphere_family):
    K2, K3 = sphere_family
    i2, i3 = K2.grid.index_of(WINDOW), K3.grid.index_of(WINDOW)
    assert np.all(K3.grid.h[i3] <= K2.grid.h[i2] + 1e-12)
    # the slope inequality K_r' < K_s' for r > s, away from the center where both vanish
    assert np.all(K3.grid.h1[i3][1:] < K2.grid.h1[i2][1:])


def test_rescale_requires_lambda_one(hyp2):
    with pytest.raises(InconsistentInputError):
        rescale(solve_potential(hyp2, 3.0, 1.0))


@pytest.mark.parametrize("n", [1, 2, 3, 6])
def test_euclidean_ricci_flat(n):
    K = ricci_flat_potential(SpaceSpec(Family.EUCLIDEAN, n), 10.0, probes=[2.0])
    assert np.max(np.abs(K.grid.h - K.grid.u**2 / 2)) < 1e-10
    assert K.grid.h[K.grid.index_of([2.0])[0]] == pytest.approx(2.0, abs=1e-12)
    assert ode_residual(K.space, 0.0, K.grid) < 1e-12


def test_sphere_ricci_flat(sphere2):
    K = ricci_flat_potential(sphere2, 4.0, probes=[1.0])
    u = K.grid.u
    assert K.grid.h1[0] == 0.0
    assert np.max(np.abs(K.grid.h1 - 2.0 * np.sinh(u / 2))) < 1e-10
    assert K.grid.h[K.grid.index_of([1.0])[0]] == pytest.approx(4.0 * (math.cosh(0.5) - 1.0), abs=1e-12)
    assert K.grid.h[K.grid.index_of([1.0])[0]] == pytest.approx(0.5105038608, abs=1e-9)


@pytest.mark.parametrize(
    "family, n", [(Family.ROUND_SPHERE, 3), (Family.COMPLEX_PROJECTIVE, 4), (Family.CAYLEY_PLANE, 16)]
)
def test_ricci_flat_invariants(family, n):
    K = ricci_flat_potential(SpaceSpec(family, n), 3.0)
    assert K.grid.h2[0] == 1.0 and K.grid.h[0] == 0.0
    assert ode_residual(K.space, 0.0, K.grid) < 1e-8
    rel = np.abs(K.grid.h1**n - K.cumulative_density) / np.maximum(1.0, K.cumulative_density)
    assert np.max(rel) < 1e-8


def test_ricci_flat_input_checks(hyp2, sphere2):
    with pytest.raises(UnsupportedFamilyError):
        ricci_flat_potential(hyp2, 1.0)
    with pytest.raises(DomainError):
        ricci_flat_potential(sphere2, 0.0)
    with pytest.raises(DomainError):
        ricci_flat_potential(sphere2, 2.0, probes=[3.0])


def test_sphere_exhaustion_default_window(sphere2):
    report, family, limit = exhaustion_experiment(sphere2, [2, 3, 4, 5], 1.5)
    assert report.radii == [2.0, 3.0, 4.0, 5.0]
    assert report.strictly_decreasing and report.monotone_ok
    assert report.lower_bound_ok and report.ordering_ok
    assert all(g >= 0 for g in report.derivative_gaps["first"])


def test_exhaustion_edge_cases(sphere2):
    report, _, _ = exhaustion_experiment(sphere2, [3.0], 1.0)
    assert len(report.sup_gap) == 1 and report.monotone_ok
    with pytest.raises(DomainError):
        exhaustion_experiment(sphere2, [2.0, 3.0], 2.0)


def test_euclidean_scaling_law():
    # h_r(u) = h_1(u / r) - 2n log r, so a_r - a_s = -2n log(r / s)
    space = SpaceSpec(Family.EUCLIDEAN, 2)
    a2, a4 = (solve_potential(space, 1.0, r).a for r in (2.0, 4.0))
    assert a4 - a2 == pytest.approx(-4.0 * math.log(2.0), abs=1e-5)


def test_ball_exhaustion_examples():
    rep = ball_exhaustion_check(2, [10.0, 100.0, 1000.0], [1.0])
    assert rep.sup_gap[0] == pytest.approx(100.0 * math.log(100.0 / 99.0) - 1.0, rel=1e-12)
    assert rep.sup_gap[0] == pytest.approx(0.005034, abs=1e-6)
    # next-order term of the log expansion: |z|^4 / (2 r^2)
    assert rep.sup_gap[2] == pytest.approx(5.0e-7, rel=1e-5)
    assert rep.strictly_decreasing and rep.monotone_ok and rep.lower_bound_ok
    zero = ball_exhaustion_check(3, [2.0, 5.0], [0.0])
    assert zero.sup_gap == [0.0, 0.0]
    with pytest.raises(DomainError):
        ball_exhaustion_check(2, [1.0, 2.0], [1.0])


def test_both_exhaustions_reach_unit_hessian():
    eucl, _, _ = exhaustion_experiment(SpaceSpec(Family.EUCLIDEAN, 2), [2, 4, 8], 1.0)
    ball_rep = ball_exhaustion_check(2, [2.0, 4.0, 8.0], np.linspace(0.0, 1.0, 11))
    for rep in (eucl, ball_rep):
        second = rep.derivative_gaps["second"]
        assert all(b < a for a, b in zip(second, second[1:]))
        assert second[-1] < 0.05
