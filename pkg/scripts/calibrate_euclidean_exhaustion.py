"""Independent calibration of the Euclidean (n=2) exhaustion gaps.

Uses scipy's DOP853 on the (h, v) system and the scaling law of the
Euclidean equation: if h_1 blows up at 1 then h_r(u) = h_1(u / r) - 2n log r,
so the rescaled potentials satisfy K_r(u) = r^2 K_1(u / r).  Only one
shooting problem is solved, at tight tolerance, and none of the package's
integrator or shooting code is used.

Writes calibration/euclidean_exhaustion.json.
"""

from __future__ import annotations

import json
import math
from pathlib import Path

import numpy as np
from scipy.integrate import solve_ivp
from scipy.optimize import brentq

N = 2
RADII = [2.0, 4.0, 8.0, 16.0]
WINDOW = 1.5
H_MAX = 60.0


def rhs(u, y):
    h, v = y
    return [max(v, 0.0) ** (1.0 / N), N * math.exp(h) * u ** (N - 1)]


def blowup(a: float) -> float:
    event = lambda u, y: y[0] - (a + H_MAX) if a > 0 else y[0] - H_MAX
    event.terminal = True
    sol = solve_ivp(rhs, (0.0, 10.0), [a, 0.0], method="DOP853", rtol=1e-13, atol=1e-14, events=event)
    if not sol.t_events[0].size:
        return math.inf
    u, (h, v) = sol.t_events[0][0], sol.y_events[0][0]
    return u + (N + 1) / v ** (1.0 / N)  # tail of the local -(n+1) log(r - u) profile


def main() -> None:
    a1 = brentq(lambda a: blowup(a) - 1.0, -5.0, 10.0, xtol=1e-14, rtol=1e-15)
    u = np.linspace(0.0, WINDOW, 50)
    gaps = []
    for r in RADII:
        sol = solve_ivp(rhs, (0.0, WINDOW / r), [a1, 0.0], method="DOP853", rtol=1e-13, atol=1e-16, t_eval=u / r)
        Kr = r * r * math.exp(-a1 / N) * (sol.y[0] - a1)
        gaps.append(float(np.max(np.abs(Kr - 0.5 * u * u))))
    out = {
        "n": N,
        "radii": RADII,
        "window": WINDOW,
        "center_value_r1": a1,
        "sup_gap": gaps,
        "threshold": 5e-3,
        "method": "scipy DOP853 at rtol 1e-13, single shot at r=1, scaling law K_r(u) = r^2 K_1(u/r)",
    }
    path = Path(__file__).resolve().parents[1] / "calibration" / "euclidean_exhaustion.json"
    path.write_text(json.dumps(out, indent=2) + "\n")
    print(json.dumps(out, indent=2))


if __name__ == "__main__":
    main()
