"""Blow-up radii for a few center values, from scipy's DOP853 alone.

The frozen values in tests/test_shooting.py come from this script.  It
integrates the (h, v) system independently of the package and stops once the
local profile predicts a remaining distance below 1e-8 (relative), then adds
that tail.
"""

from __future__ import annotations

import math

from scipy.integrate import solve_ivp


def blowup_radius(D, n: int, lam: float, a: float, cap: float) -> float:
    def rhs(u, y):
        return [max(y[1], 0.0) ** (1.0 / n), n * math.exp(lam * y[0]) * D(u)]

    def small_tail(u, y):
        return max(y[1], 0.0) ** (1.0 / n) - (n + 1) / lam * 1e8

    small_tail.terminal = True
    sol = solve_ivp(rhs, (0.0, cap), [a, 0.0], method="DOP853", rtol=1e-12, atol=1e-14, events=small_tail)
    u, v = sol.t_events[0][0], sol.y_events[0][0][1]
    return float(u + (n + 1) / lam / v ** (1.0 / n))


CASES = {
    "hyperbolic n=2 lam=3 a=1": (math.sin, 2, 3.0, 1.0, math.pi),
    "hyperbolic n=2 lam=3 a=0": (math.sin, 2, 3.0, 0.0, math.pi),
    "sphere n=2 lam=1 a=-2": (math.sinh, 2, 1.0, -2.0, 50.0),
    "sphere n=2 lam=1 a=0": (math.sinh, 2, 1.0, 0.0, 50.0),
    "sphere n=2 lam=1 a=1": (math.sinh, 2, 1.0, 1.0, 50.0),
    "cp n=4 lam=1 a=0": (lambda u: 8.0 * math.cosh(u / 2) * math.sinh(u / 2) ** 3, 4, 1.0, 0.0, 50.0),
}

if __name__ == "__main__":
    for name, args in CASES.items():
        print(f"{name}: {blowup_radius(*args)!r}")
