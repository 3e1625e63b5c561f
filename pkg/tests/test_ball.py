from __future__ import annotations

import math

import numpy as np
import pytest

from grauert_tubes import DomainError, ball


def _samples(seed, count, n_max=4):
    rng = np.random.default_rng(seed)
    for _ in range(count):
        n = int(rng.integers(1, n_max + 1))
        r = float(rng.uniform(0.2, 50.0))
        yield r, n, float(rng.uniform(0.0, 0.99)) * r * r


def test_center_value_examples():
    assert ball.center_value(math.e, 1) == pytest.approx(-1.0, abs=1e-15)
    for n in (1, 2, 5):
        assert ball.w_potential(1.0, n, 0.0) == 0.0
        assert ball.w_potential(3.0, n, 0.0) == pytest.approx(ball.center_value(3.0, n), abs=1e-15)
    assert ball.dw_dr(2.0, 2, 1.0) < 0.0


def test_w_tilde_examples():
    assert ball.w_tilde(2.0, 2, 1.0) == pytest.approx(1.1507282898071236, abs=1e-12)
    assert ball.w_tilde(5.0, 3, 0.0) == 0.0
    # log expansion: r^2 log(r^2/(r^2-x)) = x + x^2/(2 r^2) + O(r^-4)
    assert ball.w_tilde(1000.0, 2, 1.0) == pytest.approx(1.0 + 5.0e-7, abs=1e-12)


def test_dw_tilde_dr_examples():
    assert ball.dw_tilde_dr(3.0, 2, 0.0) == 0.0
    assert ball.dw_tilde_dr(2.0, 2, 1.0) == pytest.approx(4.0 * math.log(4.0 / 3.0) - 4.0 / 3.0, abs=1e-14)
    assert ball.dw_tilde_dr(2.0, 2, 1.0) == pytest.approx(-0.182605, abs=1e-6)


def test_dw_tilde_dr_matches_finite_difference():
    for r, n, x in _samples(3, 20):
        step = 1e-5 * r
        x = min(x, 0.9 * (r - step) ** 2)
        fd = (ball.w_tilde(r + step, n, x) - ball.w_tilde(r - step, n, x)) / (2 * step)
        assert ball.dw_tilde_dr(r, n, x) == pytest.approx(fd, rel=1e-6, abs=1e-8)


def test_dw_tilde_dr_nonpositive():
    assert all(ball.dw_tilde_dr(r, n, x) <= 0.0 for r, n, x in _samples(7, 100))


def test_rescaling_identity():
    for r, n, x in _samples(11, 200):
        wt = ball.w_tilde(r, n, x)
        direct = r * r * (ball.w_potential(r, n, x) - ball.center_value(r, n))
        assert abs(wt - direct) <= 1e-12 * max(1.0, wt)


def test_ma_residual_examples():
    assert ball.ma_residual_ball(2.0, 3, 1.0) < 1e-12
    assert ball.ma_residual_ball(10.0, 2, 50.0) < 1e-12
    for n in (1, 2, 4):
        assert ball.ma_residual_ball(7.0, n, 0.0) < 1e-15


def test_ma_residual_random():
    assert max(ball.ma_residual_ball(r, n, x) for r, n, x in _samples(1, 1000)) < 1e-12


@pytest.mark.parametrize("n", [1, 2, 3, 4])
def test_dense_hessian_cross_check(n):
    r, x = 2.5, 3.1
    H = ball.dense_hessian(r, n, x)
    radial, tangential = ball.hessian_eigs(r, n, x)
    eig = np.sort(np.linalg.eigvalsh(H))
    expected = np.sort([radial] + [tangential] * (n - 1))
    assert np.allclose(eig, expected, rtol=1e-13)
    alpha = r * r / (r * r - x)
    assert np.linalg.det(H).real == pytest.approx(alpha ** (n + 1), rel=1e-12)


def test_limit_bound_and_monotonicity():
    for r, n, x in _samples(5, 200):
        wt = ball.w_tilde(r, n, x)
        assert 0.0 <= wt - x <= x * x / (r * r - x) * (1 + 1e-12)
        s = math.sqrt(x) * 1.01 + 0.01
        if s < r:
            assert wt < ball.w_tilde(s, n, x)


def test_gradient_and_hessian_converge():
    x = 1.0
    grads = [ball.gradient_norm(r, 2, x) for r in (10.0, 100.0, 1000.0)]
    assert all(abs(g - 1.0) > abs(h - 1.0) for g, h in zip(grads, grads[1:]))
    assert abs(grads[-1] - 1.0) < 1e-5
    radial, tangential = ball.hessian_eigs(1000.0, 2, x)
    assert radial == pytest.approx(1.0, abs=1e-5) and tangential == pytest.approx(1.0, abs=1e-5)


def test_domain_errors():
    with pytest.raises(DomainError):
        ball.w_potential(1.0, 2, 1.0)
    with pytest.raises(DomainError):
        ball.w_tilde(0.0, 2, 0.0)
    with pytest.raises(DomainError):
        ball.ma_residual_ball(2.0, 0, 1.0)
    with pytest.raises(DomainError):
        ball.dw_tilde_dr(2.0, 2, -1.0)


def test_evaluate_record():
    rec = ball.evaluate(2.0, 2, 1.0).to_dict()
    assert rec["w_tilde"] == pytest.approx(4.0 * math.log(4.0 / 3.0))
    assert len(rec["hessian_eigs"]) == 2
