"""Outward integration of the radial Kähler–Einstein ODE.

The equation ``h'' (h')^(n-1) = exp(lam h) D(u)`` is singular at the center,
where both ``h'`` and ``D`` vanish.  Writing ``v = (h')^n`` turns it into the
regular first-order system

    h' = v^(1/n),    v' = n exp(lam h) D(u),    (h, v)(0) = (a, 0),

which is integrated with an embedded Dormand–Prince 5(4) pair.  Internally the
state carries the excess ``H = h - a`` instead of ``h`` so that values near the
center keep full relative precision after the ``exp(-a/n)`` rescaling.

Near a blow-up point ``r`` the potential behaves like ``-((n+1)/lam) log(r-u)``,
so ``r - u ~ ((n+1)/lam) / h'`` with a relative error that vanishes with
``r - u``.  Blow-up is declared once ``h`` has crossed ``h_max_blowup`` and the
predicted tail is below ``tail_accept``; the reported radius is the last node
plus the tail.  It is also declared, whatever ``h`` is, once the tail drops
below ``tail_floor``: there the estimate is exact to working precision, and
for ``lam`` large compared with ``n + 1`` the level ``h = 40`` would sit
below the floating-point resolution of ``u``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Sequence

import numpy as np
from scipy.optimize import brentq

from .errors import DomainError, IntegrationDivergedError
from .spaces import SpaceSpec, log_density_function

__all__ = [
    "OdeProblem",
    "IntegratorConfig",
    "GridFunction",
    "Status",
    "IntegrationOutcome",
    "integrate",
    "ode_residual",
    "quintic_hermite",
]


@dataclass(frozen=True)
class OdeProblem:
    space: SpaceSpec
    lam: float
    a: float

    def __post_init__(self):
        if not (self.lam >= 0.0) or math.isinf(self.lam):
            raise DomainError(f"lambda must be finite and >= 0, got {self.lam!r}")
        if not math.isfinite(self.a):
            raise DomainError(f"center value a must be finite, got {self.a!r}")


@dataclass(frozen=True)
class IntegratorConfig:
    rel_tol: float = 1e-10
    abs_tol: float = 1e-12
    h_max_blowup: float = 40.0
    u_cap: float | None = None  # None: r_max, or 100 for unbounded families
    max_steps: int = 200_000
    tail_floor: float = 1e-8  # relative to max(1, u)
    tail_accept: float = 1e-4  # past h_max_blowup, keep going until the tail is this small
    min_step: float = 1e-14  # relative to max(1, u)

    def __post_init__(self):
        for name in ("rel_tol", "abs_tol"):
            val = getattr(self, name)
            if not (0.0 < val < 1.0):
                raise DomainError(f"{name} must lie in (0, 1), got {val!r}")
        if not (self.h_max_blowup >= 10.0):
            raise DomainError(f"h_max_blowup must be >= 10, got {self.h_max_blowup!r}")
        if self.u_cap is not None and not (self.u_cap > 0.0):
            raise DomainError(f"u_cap must be positive, got {self.u_cap!r}")
        if self.max_steps < 1:
            raise DomainError("max_steps must be a positive integer")

    def resolved_cap(self, space: SpaceSpec) -> float:
        if self.u_cap is None:
            return space.r_max if math.isfinite(space.r_max) else 100.0
        if self.u_cap > space.r_max:
            raise DomainError(f"u_cap={self.u_cap!r} exceeds r_max={space.r_max!r} of {space.name}")
        return float(self.u_cap)


def quintic_hermite(x0, x1, y0, d0, s0, y1, d1, s1, x):
    """Quintic Hermite interpolant matching value, slope and curvature at both ends.

    Returns ``(value, first derivative, second derivative)`` at ``x``.  All
    arguments broadcast.
    """
    dx = x1 - x0
    t = (x - x0) / dx
    c0, c1, c2 = y0, dx * d0, 0.5 * dx * dx * s0
    A = y1 - (c0 + c1 + c2)
    B = dx * d1 - (c1 + 2.0 * c2)
    C = dx * dx * s1 - 2.0 * c2
    c3 = 10.0 * A - 4.0 * B + 0.5 * C
    c4 = -15.0 * A + 7.0 * B - C
    c5 = 6.0 * A - 3.0 * B + 0.5 * C
    val = c0 + t * (c1 + t * (c2 + t * (c3 + t * (c4 + t * c5))))
    der = c1 + t * (2.0 * c2 + t * (3.0 * c3 + t * (4.0 * c4 + t * 5.0 * c5)))
    sec = 2.0 * c2 + t * (6.0 * c3 + t * (12.0 * c4 + t * 20.0 * c5))
    return val, der / dx, sec / (dx * dx)


GRID_COLUMNS = ("u", "h", "h1", "h2")
RICCI_FLAT_COLUMNS = ("u", "K", "K1", "K2")


@dataclass
class GridFunction:
    """Samples of a radial potential and its first two derivatives."""

    u: np.ndarray
    h: np.ndarray
    h1: np.ndarray
    h2: np.ndarray

    def __post_init__(self):
        self.u = np.asarray(self.u, dtype=float)
        self.h = np.asarray(self.h, dtype=float)
        self.h1 = np.asarray(self.h1, dtype=float)
        self.h2 = np.asarray(self.h2, dtype=float)
        if not (self.u.shape == self.h.shape == self.h1.shape == self.h2.shape) or self.u.ndim != 1:
            raise DomainError("grid columns must be one-dimensional and of equal length")
        if self.u.size == 0:
            raise DomainError("grid must contain at least one point")
        if self.u[0] < 0.0 or np.any(np.diff(self.u) <= 0.0):
            raise DomainError("grid abscissae must be nonnegative and strictly increasing")

    def __len__(self) -> int:
        return self.u.size

    def violations(self) -> list[str]:
        """Names of the structural properties of a KE potential this grid breaks."""
        out = []
        if self.u[0] != 0.0:
            out.append("u does not start at 0")
        if self.h1[0] != 0.0:
            out.append("h'(0) != 0")
        if np.any(self.h1 < 0.0):
            out.append("h' < 0 somewhere")
        if np.any(self.h1[1:] <= 0.0):
            out.append("h' not positive for u > 0")
        if np.any(self.h2 <= 0.0):
            out.append("h'' not positive")
        if np.any(np.diff(self.h) < 0.0):
            out.append("h decreasing somewhere")
        return out

    def index_of(self, points) -> np.ndarray:
        """Indices of grid nodes that coincide exactly with ``points``."""
        pts = np.atleast_1d(np.asarray(points, dtype=float))
        idx = np.searchsorted(self.u, pts)
        idx = np.clip(idx, 0, self.u.size - 1)
        if not np.all(self.u[idx] == pts):
            missing = pts[self.u[idx] != pts]
            raise DomainError(f"points not on the grid: {missing[:5]!r}")
        return idx

    def sample(self, points):
        """Quintic Hermite values ``(h, h1, h2)`` at arbitrary points in range.

        Grid nodes are reproduced exactly.
        """
        x = np.atleast_1d(np.asarray(points, dtype=float))
        if np.any(x < self.u[0]) or np.any(x > self.u[-1]):
            raise DomainError("sample points outside the grid range")
        if self.u.size == 1:
            return self.h.copy(), self.h1.copy(), self.h2.copy()
        i = np.clip(np.searchsorted(self.u, x, side="right") - 1, 0, self.u.size - 2)
        j = i + 1
        val, der, sec = quintic_hermite(
            self.u[i], self.u[j], self.h[i], self.h1[i], self.h2[i], self.h[j], self.h1[j], self.h2[j], x
        )
        exact = self.u[i] == x
        val[exact], der[exact], sec[exact] = self.h[i][exact], self.h1[i][exact], self.h2[i][exact]
        last = x == self.u[-1]
        val[last], der[last], sec[last] = self.h[-1], self.h1[-1], self.h2[-1]
        return val, der, sec

    def restrict(self, upper: float) -> "GridFunction":
        keep = self.u <= upper
        return GridFunction(self.u[keep], self.h[keep], self.h1[keep], self.h2[keep])

    def to_records(self, names: tuple[str, str, str, str] = GRID_COLUMNS) -> list[dict[str, float]]:
        cols = (self.u, self.h, self.h1, self.h2)
        return [dict(zip(names, map(float, row))) for row in zip(*cols)]

    @classmethod
    def from_records(cls, records, names: tuple[str, str, str, str] = GRID_COLUMNS) -> "GridFunction":
        cols = [[float(rec[k]) for rec in records] for k in names]
        return cls(*cols)



class Status(str, Enum):
    BLEW_UP = "blew_up"
    REACHED_CAP = "reached_cap"
    STEP_LIMIT = "step_limit"


@dataclass
class IntegrationOutcome:
    grid: GridFunction
    status: Status
    u_star: float | None = None  # tail-corrected blow-up radius
    u_cross: float | None = None  # where h crossed h_max_blowup (None if stopped on the tail floor)
    excess: np.ndarray = field(default=None, repr=False)  # h - a, integrated directly
    steps: int = 0
    rejected: int = 0


# Dormand–Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
_E1, _E3, _E4, _E5, _E6, _E7 = 71 / 57600, -71 / 16695, 71 / 1920, -17253 / 339200, 22 / 525, -1 / 40


def _dp_step(rhs, u, H, v, k1, dt):
    """One Dormand–Prince step for the (H, v) system; returns (H, v, err_H, err_v, k7)."""
    p1, q1 = k1
    vi = v + dt * _A21 * q1
    p2, q2 = rhs(u + _C2 * dt, H + dt * _A21 * p1, vi if vi > 0.0 else 0.0)
    vi = v + dt * (_A31 * q1 + _A32 * q2)
    p3, q3 = rhs(u + _C3 * dt, H + dt * (_A31 * p1 + _A32 * p2), vi if vi > 0.0 else 0.0)
    vi = v + dt * (_A41 * q1 + _A42 * q2 + _A43 * q3)
    p4, q4 = rhs(u + _C4 * dt, H + dt * (_A41 * p1 + _A42 * p2 + _A43 * p3), vi if vi > 0.0 else 0.0)
    vi = v + dt * (_A51 * q1 + _A52 * q2 + _A53 * q3 + _A54 * q4)
    Hi = H + dt * (_A51 * p1 + _A52 * p2 + _A53 * p3 + _A54 * p4)
    p5, q5 = rhs(u + _C5 * dt, Hi, vi if vi > 0.0 else 0.0)
    vi = v + dt * (_A61 * q1 + _A62 * q2 + _A63 * q3 + _A64 * q4 + _A65 * q5)
    Hi = H + dt * (_A61 * p1 + _A62 * p2 + _A63 * p3 + _A64 * p4 + _A65 * p5)
    p6, q6 = rhs(u + dt, Hi, vi if vi > 0.0 else 0.0)
    Hn = H + dt * (_B1 * p1 + _B3 * p3 + _B4 * p4 + _B5 * p5 + _B6 * p6)
    vn = v + dt * (_B1 * q1 + _B3 * q3 + _B4 * q4 + _B5 * q5 + _B6 * q6)
    k7 = rhs(u + dt, Hn, vn if vn > 0.0 else 0.0)
    p7, q7 = k7
    eH = dt * (_E1 * p1 + _E3 * p3 + _E4 * p4 + _E5 * p5 + _E6 * p6 + _E7 * p7)
    ev = dt * (_E1 * q1 + _E3 * q3 + _E4 * q4 + _E5 * q5 + _E6 * q6 + _E7 * q7)
    return Hn, vn, eH, ev, k7


def integrate(problem: OdeProblem, cfg: IntegratorConfig | None = None, probes: Sequence[float] | None = None) -> IntegrationOutcome:
    """Integrate from the center until blow-up, the range cap, or the step limit.

    The returned grid holds every accepted step plus each requested probe
    point reached before the stop (steps are shortened to land on probes).
    """
    cfg = cfg or IntegratorConfig()
    space, lam, a = problem.space, float(problem.lam), float(problem.a)
    n = space.n
    cap = cfg.resolved_cap(space)
    logD = log_density_function(space)
    inv_n = 1.0 / n
    detect = lam > 0.0
    tail_c = (n + 1) / lam if detect else math.inf
    H_cross = cfg.h_max_blowup - a
    rtol, atol = cfg.rel_tol, cfg.abs_tol
    exp, log = math.exp, math.log

    pending = sorted({float(p) for p in (probes if probes is not None else ()) if 0.0 < p <= cap})
    pi = 0

    def slope(v):
        return exp(log(v) * inv_n) if v > 0.0 else 0.0

    def rhs(u, H, v):
        return slope(v), n * exp(lam * (a + H) + logD(u))

    def curvature(u, H, hp):
        if u == 0.0 or hp <= 0.0:
            return exp(lam * a * inv_n)
        return exp(lam * (a + H) + logD(u) - (n - 1) * log(hp))

    us, Hs, h1s, h2s = [0.0], [0.0], [0.0], [exp(lam * a * inv_n)]
    u, H, v = 0.0, 0.0, 0.0
    k1 = rhs(u, H, v)
    dt = min(1e-3, 0.01 * cap)
    steps = rejected = 0
    u_cross = None

    def outcome(status, u_star=None, u_cross=None):
        grid = GridFunction(np.array(us), a + np.array(Hs), np.array(h1s), np.array(h2s))
        return IntegrationOutcome(grid, status, u_star, u_cross, np.array(Hs), steps, rejected)

    while True:
        if steps >= cfg.max_steps:
            return outcome(Status.STEP_LIMIT)
        target = pending[pi] if pi < len(pending) else cap
        if dt >= target - u:
            dt, u_next = target - u, target
        else:
            u_next = u + dt

        try:
            Hn, vn, eH, ev, k7 = _dp_step(rhs, u, H, v, k1, dt)
            sH = atol + rtol * max(abs(H), abs(Hn))
            sv = atol + rtol * max(abs(v), abs(vn))
            err = math.sqrt(0.5 * ((eH / sH) ** 2 + (ev / sv) ** 2))
        except OverflowError:
            err = math.inf

        if not (err <= 1.0):
            rejected += 1
            dt *= max(0.2, 0.9 * err ** -0.2) if math.isfinite(err) else 0.2
            if dt < cfg.min_step * max(1.0, u):
                raise IntegrationDivergedError("step size collapsed", u)
            continue

        if not (math.isfinite(Hn) and math.isfinite(vn)):
            raise IntegrationDivergedError("non-finite state", u)
        steps += 1
        u_prev, H_prev, hp_prev, hpp_prev = u, H, h1s[-1], h2s[-1]
        u, H, v = u_next, Hn, (vn if vn > 0.0 else 0.0)
        k1 = k7
        hp = slope(v)
        try:
            hpp = curvature(u, H, hp)
        except OverflowError:
            raise IntegrationDivergedError("curvature overflow", u_prev) from None
        us.append(u)
        Hs.append(H)
        h1s.append(hp)
        h2s.append(hpp)
        if pi < len(pending) and u == pending[pi]:
            pi += 1

        if detect and u_cross is None and H >= H_cross:
            def gap(x):
                return quintic_hermite(u_prev, u, H_prev, hp_prev, hpp_prev, H, hp, hpp, x)[0] - H_cross

            u_cross = u if gap(u_prev) >= 0.0 else brentq(gap, u_prev, u, xtol=1e-15, rtol=1e-15)
        if detect and hp > 0.0:
            tail = tail_c / hp
            scale = max(1.0, u)
            if tail < cfg.tail_floor * scale or (u_cross is not None and tail < cfg.tail_accept * scale):
                return outcome(Status.BLEW_UP, u + tail, u_cross)
        if u >= cap:
            return outcome(Status.REACHED_CAP)

        fac = 0.9 * err ** -0.2 if err > 0.0 else 5.0
        dt *= min(5.0, max(0.2, fac))


def ode_residual(space: SpaceSpec, lam: float, grid: GridFunction) -> float:
    """Largest relative defect ``|h'' h'^(n-1) - exp(lam h) D| / (1 + exp(lam h) D)`` over interior nodes."""
    if len(grid) < 3:
        return 0.0
    logD = log_density_function(space)
    n = space.n
    worst = 0.0
    for u, h, h1, h2 in zip(grid.u[1:-1], grid.h[1:-1], grid.h1[1:-1], grid.h2[1:-1]):
        with np.errstate(over="ignore"):
            rhs = float(np.exp(lam * h + logD(float(u))))
        lhs = h2 * h1 ** (n - 1) if n > 1 else h2
        if math.isinf(rhs):
            defect = 0.0 if math.isinf(lhs) else 1.0
        else:
            defect = abs(lhs - rhs) / (1.0 + rhs)
        worst = max(worst, defect)
    return worst
