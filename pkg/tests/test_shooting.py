from __future__ import annotations

import math

import numpy as np
import pytest

from grauert_tubes import (
    ConvergenceError,
    DomainError,
    Family,
    NoBracketError,
    ShootingConfig,
    SpaceSpec,
    family_sweep,
    radius_of,
    solve_potential,
)
from grauert_tubes.analysis import lower_bound_hyperbolic

HALF_PI = math.pi / 2

# Blow-up radii from scripts/derive_shooting_oracles.py (scipy DOP853, independent of this package)
ORACLE_RADII = [
    (Family.REAL_HYPERBOLIC, 2, 3.0, 1.0, 0.7210665248442714),
    (Family.REAL_HYPERBOLIC, 2, 3.0, 0.0, 1.5707963267949745),
    (Family.ROUND_SPHERE, 2, 1.0, -2.0, 3.660386454875415),
    (Family.ROUND_SPHERE, 2, 1.0, 0.0, 2.4276938437845907),
    (Family.ROUND_SPHERE, 2, 1.0, 1.0, 1.942503078487089),
    (Family.COMPLEX_PROJECTIVE, 4, 1.0, 0.0, 2.9661813475608976),
]


def test_config_validation():
    with pytest.raises(DomainError):
        ShootingConfig(a_lo=1.0, a_hi=0.0)
    with pytest.raises(DomainError):
        ShootingConfig(radius_tol=0.0)


@pytest.mark.parametrize("family, n, lam, a, expected", ORACLE_RADII)
def test_radius_of_matches_independent_integration(family, n, lam, a, expected):
    assert radius_of(SpaceSpec(family, n), lam, a) == pytest.approx(expected, abs=1e-7)


def test_radius_of_examples():
    assert radius_of(SpaceSpec(Family.REAL_HYPERBOLIC, 2), 3.0, 1.0) < HALF_PI
    assert radius_of(SpaceSpec(Family.EUCLIDEAN, 1), 1.0, math.log(2.0)) == pytest.approx(HALF_PI, abs=1e-3)
    assert math.isinf(radius_of(SpaceSpec(Family.REAL_HYPERBOLIC, 2), 3.0, -5.0))


def test_log_cos_solution(log_cos_solution):
    sol = log_cos_solution
    assert abs(sol.a) < 1e-4
    h, _, _ = sol.grid.sample([1.0])
    assert h[0] == pytest.approx(0.6156264703860142, abs=1e-4)
    assert abs(sol.achieved_radius - HALF_PI) < 1e-6
    assert sol.grid.h[0] == sol.a and sol.grid.h1[0] == 0.0
    assert sol.grid.h2[0] == pytest.approx(math.exp(3.0 * sol.a / 2), abs=1e-10)


def test_one_dimensional_center_value():
    sol = solve_potential(SpaceSpec(Family.EUCLIDEAN, 1), 1.0, HALF_PI)
    assert sol.a == pytest.approx(math.log(2.0), abs=1e-4)


def test_sphere_center_values_decrease(sphere2):
    a = [solve_potential(sphere2, 1.0, r).a for r in (1.0, 2.0, 3.0)]
    assert a[0] > a[1] > a[2]


def test_hyperbolic_bound_single(hyp2):
    assert solve_potential(hyp2, 1.0, 3.0).a >= lower_bound_hyperbolic(2)


def test_input_checks(hyp2):
    with pytest.raises(DomainError):
        solve_potential(hyp2, 0.0, 1.0)
    with pytest.raises(DomainError):
        solve_potential(hyp2, 1.0, math.pi)
    with pytest.raises(DomainError):
        solve_potential(hyp2, 1.0, -1.0)


def test_no_bracket(sphere2):
    with pytest.raises(NoBracketError):
        solve_potential(sphere2, 1.0, 5.0, ShootingConfig(a_lo=-1.0, a_hi=0.0, expand_limit=2.0))


def test_max_iters_carries_best_a(sphere2):
    with pytest.raises(ConvergenceError) as info:
        solve_potential(sphere2, 1.0, 2.0, ShootingConfig(max_iters=2))
    assert math.isfinite(info.value.best_a)


def test_deterministic(sphere2):
    a = solve_potential(sphere2, 1.0, 2.5)
    b = solve_potential(sphere2, 1.0, 2.5)
    assert a.a == b.a
    assert np.array_equal(a.grid.h, b.grid.h) and np.array_equal(a.grid.u, b.grid.u)


def test_sweep_comparison(sphere2):
    probes = np.linspace(0.0, 0.95, 20)
    entries = family_sweep(sphere2, 1.0, [1.0, 2.0, 3.0, 4.0], probes=probes)
    assert all(e.ok for e in entries)
    a = [e.solution.a for e in entries]
    assert all(y < x for x, y in zip(a, a[1:]))
    values = [e.solution.grid.h[e.solution.grid.index_of(probes)] for e in entries]
    for small, big in zip(values, values[1:]):
        assert np.all(big <= small + 1e-3)


def test_sweep_comparison_on_common_window(hyp2):
    s_probes = np.linspace(0.0, 0.95 * 1.5, 25)
    entries = family_sweep(hyp2, 1.0, [1.5, 2.5], probes=s_probes)
    hs, hr = (e.solution.grid.h[e.solution.grid.index_of(s_probes)] for e in entries)
    assert np.all(hr <= hs + 1e-3)


def test_sweep_hyperbolic_bound(hyp2):
    entries = family_sweep(hyp2, 1.0, [0.5, 1.5, 2.5, 3.0])
    assert all(e.ok and e.solution.a >= -7.8748 for e in entries)


def test_sweep_edge_cases(hyp2):
    assert family_sweep(hyp2, 1.0, []) == []
    with pytest.raises(DomainError):
        family_sweep(hyp2, 1.0, [2.0, 1.0])
    entries = family_sweep(hyp2, 1.0, [1.0, 3.5])
    assert entries[0].ok and not entries[1].ok
    assert "DomainError" in entries[1].error


def test_parallel_cold_sweep_matches_serial(sphere2):
    radii = [1.0, 2.0, 3.0]
    serial = family_sweep(sphere2, 1.0, radii, warm_start=False)
    parallel = family_sweep(sphere2, 1.0, radii, warm_start=False, jobs=2)
    assert [e.solution.a for e in serial] == [e.solution.a for e in parallel]


def test_warm_and_cold_agree_within_tolerance(sphere2):
    radii = [1.0, 2.0, 3.0]
    warm = family_sweep(sphere2, 1.0, radii)
    cold = family_sweep(sphere2, 1.0, radii, warm_start=False)
    for w, c in zip(warm, cold):
        assert abs(w.solution.achieved_radius - w.r) < 1e-6
        assert w.solution.a == pytest.approx(c.solution.a, abs=1e-5)
