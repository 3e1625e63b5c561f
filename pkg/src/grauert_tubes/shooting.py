"""Boundary blow-up problem: find the center value whose solution blows up at ``r``.

The blow-up radius is strictly decreasing in the center value ``a``, so the
problem reduces to bracketing plus bisection on ``a -> u_star(a)``.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from typing import Sequence

import numpy as np

from .errors import ConvergenceError, DomainError, GrauertError, NoBracketError
from .ode import GridFunction, IntegratorConfig, OdeProblem, Status, integrate
from .spaces import SpaceSpec

__all__ = [
    "ShootingConfig",
    "PotentialSolution",
    "SweepEntry",
    "radius_of",
    "solve_potential",
    "family_sweep",
]

AT_CAP = math.inf


@dataclass(frozen=True)
class ShootingConfig:
    integrator: IntegratorConfig = field(default_factory=IntegratorConfig)
    a_lo: float = -20.0
    a_hi: float = 5.0
    radius_tol: float = 1e-6
    max_iters: int = 200
    expand_limit: float = 2000.0

    def __post_init__(self):
        if not self.a_lo < self.a_hi:
            raise DomainError(f"bracket must satisfy a_lo < a_hi, got ({self.a_lo}, {self.a_hi})")
        if not self.radius_tol > 0.0:
            raise DomainError("radius_tol must be positive")
        if self.max_iters < 1:
            raise DomainError("max_iters must be a positive integer")


@dataclass
class PotentialSolution:
    space: SpaceSpec
    lam: float
    r: float
    a: float
    grid: GridFunction
    achieved_radius: float
    excess: np.ndarray = field(repr=False)  # h - a at the grid nodes, without cancellation
    iterations: int = 0

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "lambda": self.lam,
            "r": self.r,
            "a": self.a,
            "achieved_radius": self.achieved_radius,
            "iterations": self.iterations,
            "h2_at_center": float(self.grid.h2[0]),
            "grid": self.grid.to_records(),
        }


@dataclass
class SweepEntry:
    r: float
    solution: PotentialSolution | None = None
    error: str | None = None

    @property
    def ok(self) -> bool:
        return self.solution is not None


def _check_lambda(lam: float) -> float:
    if not (lam > 0.0) or math.isinf(lam):
        raise DomainError(
            f"shooting needs a finite lambda > 0, got {lam!r}; Ricci-flat potentials come from rescaling.ricci_flat_potential"
        )
    return float(lam)


def _shooting_integrator(space: SpaceSpec, r: float, cfg: ShootingConfig) -> IntegratorConfig:
    """Integrator config whose range just exceeds ``r``.

    Bisection only needs to know on which side of ``r`` the blow-up happens,
    so a run that reaches ``r + 4 * radius_tol`` intact is stopped there.
    """
    icfg = cfg.integrator
    if icfg.u_cap is None:
        icfg = replace(icfg, u_cap=min(space.r_max, r + 4.0 * cfg.radius_tol))
    if not icfg.u_cap > r:
        raise DomainError(f"integration cap {icfg.u_cap!r} does not exceed the target radius {r!r}")
    return icfg


def _run(space, lam, a, icfg, probes):
    out = integrate(OdeProblem(space, lam, a), icfg, probes)
    if out.status is Status.BLEW_UP:
        return out.u_star, out
    if out.status is Status.REACHED_CAP:
        return AT_CAP, out
    raise ConvergenceError(f"integration hit the step limit without blowing up or reaching u_cap", a)


def radius_of(space: SpaceSpec, lam: float, a: float, cfg: ShootingConfig | None = None) -> float:
    """Blow-up radius for center value ``a``; ``math.inf`` if the range cap is reached first."""
    cfg = cfg or ShootingConfig()
    return _run(space, _check_lambda(lam), float(a), cfg.integrator, None)[0]


def solve_potential(
    space: SpaceSpec,
    lam: float,
    r: float,
    cfg: ShootingConfig | None = None,
    probes: Sequence[float] | None = None,
) -> PotentialSolution:
    """Center value and sampled potential whose blow-up radius is ``r``.

    ``probes`` are forwarded to the integrator, so they appear as exact grid
    nodes (those beyond the blow-up point are dropped).
    """
    cfg = cfg or ShootingConfig()
    lam = _check_lambda(lam)
    r = float(r)
    if not (0.0 < r < space.r_max):
        raise DomainError(f"tube radius must lie in (0, {space.r_max}), got {r!r}")
    icfg = _shooting_integrator(space, r, cfg)
    probes = None if probes is None else [p for p in probes if p < r]

    def shoot(a):
        return _run(space, lam, a, icfg, probes)

    a_lo, a_hi = cfg.a_lo, cfg.a_hi
    u_lo, out_lo = shoot(a_lo)
    step = a_hi - a_lo
    while u_lo <= r:
        a_hi, a_lo = a_lo, a_lo - step
        step *= 2.0
        if a_lo < -cfg.expand_limit:
            raise NoBracketError(f"no center value below {-cfg.expand_limit} blows up beyond r={r}")
        u_lo, out_lo = shoot(a_lo)
    u_hi, out_hi = shoot(a_hi)
    step = a_hi - a_lo
    while u_hi >= r:
        a_lo, u_lo, out_lo = a_hi, u_hi, out_hi
        a_hi += step
        step *= 2.0
        if a_hi > cfg.expand_limit:
            raise NoBracketError(f"no center value below {cfg.expand_limit} blows up before r={r}")
        u_hi, out_hi = shoot(a_hi)

    best_a, best_gap, best_out = (a_lo, u_lo - r, out_lo) if u_lo - r < r - u_hi else (a_hi, r - u_hi, out_hi)
    for it in range(1, cfg.max_iters + 1):
        if abs(best_gap) < cfg.radius_tol:
            break
        a_mid = 0.5 * (a_lo + a_hi)
        if not a_lo < a_mid < a_hi:
            raise ConvergenceError(f"bracket collapsed before reaching radius_tol (gap {best_gap:.3e})", best_a)
        u_mid, out_mid = shoot(a_mid)
        if abs(u_mid - r) < abs(best_gap):
            best_a, best_gap, best_out = a_mid, u_mid - r, out_mid
        if u_mid > r:
            a_lo = a_mid
        else:
            a_hi = a_mid
    else:
        it = cfg.max_iters
        if abs(best_gap) >= cfg.radius_tol:
            raise ConvergenceError(f"max_iters exhausted (gap {best_gap:.3e})", best_a)

    return PotentialSolution(
        space=space,
        lam=lam,
        r=r,
        a=best_a,
        grid=best_out.grid,
        achieved_radius=best_out.u_star,
        excess=best_out.excess,
        iterations=it,
    )


def _solve_entry(args) -> SweepEntry:
    space, lam, r, cfg, probes = args
    try:
        return SweepEntry(r, solve_potential(space, lam, r, cfg, probes))
    except GrauertError as exc:
        return SweepEntry(r, error=f"{type(exc).__name__}: {exc}")


def family_sweep(
    space: SpaceSpec,
    lam: float,
    radii: Sequence[float],
    cfg: ShootingConfig | None = None,
    probes: Sequence[float] | None = None,
    warm_start: bool = True,
    jobs: int = 1,
) -> list[SweepEntry]:
    """Solve every radius in ``radii`` (ascending); failures are recorded per entry.

    With ``warm_start`` the bracket for each radius is ``[a_prev - w, a_prev]``,
    since the center value decreases in ``r``; ``w`` is twice the drop predicted
    from the last two solutions (1 before two are known) and the lower end is
    expanded as needed.
    Without it, entries are independent and ``jobs > 1`` solves them in
    worker processes.
    """
    cfg = cfg or ShootingConfig()
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])):
        raise DomainError("radii must be strictly increasing")
    if not radii:
        return []
    if not warm_start:
        tasks = [(space, lam, r, cfg, probes) for r in radii]
        if jobs > 1:
            with ProcessPoolExecutor(max_workers=jobs) as pool:
                return list(pool.map(_solve_entry, tasks))
        return [_solve_entry(t) for t in tasks]

    entries = []
    solved: list[tuple[float, float]] = []
    for r in radii:
        current = cfg
        if solved:
            r1, a1 = solved[-1]
            width = 1.0
            if len(solved) > 1:
                r0, a0 = solved[-2]
                drop = (a0 - a1) / (r1 - r0) * (r - r1)
                width = max(2.0 * drop, 10.0 * cfg.radius_tol)
            current = replace(cfg, a_lo=a1 - width, a_hi=a1)
        entry = _solve_entry((space, lam, r, current, probes))
        entries.append(entry)
        if entry.ok:
            solved.append((r, entry.solution.a))
    return entries
