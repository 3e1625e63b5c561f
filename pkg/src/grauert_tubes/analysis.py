"""Diagnostics on solved potentials: completeness, the T^pi H lower bound, center curvature."""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, InsufficientGridError
from .quadrature import cumulative_simpson
from .rescaling import RicciFlatPotential
from .shooting import PotentialSolution, ShootingConfig, family_sweep
from .spaces import Family, SpaceSpec, log_density_function

__all__ = [
    "CompletenessReport",
    "BoundaryGrowthReport",
    "Lemma41Report",
    "CurvatureReport",
    "CurvatureSweep",
    "completeness_length",
    "boundary_growth_check",
    "ricci_flat_completeness",
    "lower_bound_hyperbolic",
    "lemma41_check",
    "curvature_threshold",
    "curvature_center_sweep",
]

_SQRT_HALF = math.sqrt(0.5)


def _curvature_at(sol: PotentialSolution, u: np.ndarray) -> np.ndarray:
    """``h''`` at arbitrary points: Hermite values of ``h`` and ``h'`` fed back into the ODE."""
    h, h1, h2 = sol.grid.sample(u)
    logD = log_density_function(sol.space)
    n, lam = sol.space.n, sol.lam
    out = np.empty_like(h2)
    for i, (x, hv, dv, sv) in enumerate(zip(u, h, h1, h2)):
        if x == 0.0 or dv <= 0.0:
            out[i] = sv
        else:
            out[i] = math.exp(lam * hv + logD(float(x)) - (n - 1) * math.log(dv))
    return out


@dataclass
class CompletenessReport:
    r: float
    cutoffs: list[float]
    lengths: list[float]
    log_slope: float | None  # None when fewer than two cutoffs

    def to_dict(self) -> dict:
        return asdict(self)


def _refined_trapezoid(sol: PotentialSolution, end: float, max_depth: int = 30) -> float:
    u = sol.grid.u
    nodes = list(u[u < end]) + [end]
    vals = list(np.sqrt(sol.grid.h2[: len(nodes) - 1])) + [float(np.sqrt(_curvature_at(sol, np.array([end]))[0]))]
    total = 0.0
    for i in range(len(nodes) - 1):
        stack = [(nodes[i], vals[i], nodes[i + 1], vals[i + 1], 0)]
        while stack:
            x0, f0, x1, f1, depth = stack.pop()
            if f1 > 2.0 * f0 and depth < max_depth:
                xm = 0.5 * (x0 + x1)
                fm = float(np.sqrt(_curvature_at(sol, np.array([xm]))[0]))
                stack.append((xm, fm, x1, f1, depth + 1))
                stack.append((x0, f0, xm, fm, depth + 1))
            else:
                total += 0.5 * (x1 - x0) * (f0 + f1)
    return _SQRT_HALF * total


def completeness_length(sol: PotentialSolution, cutoffs: Sequence[float]) -> CompletenessReport:
    """Radial distances ``(1/sqrt 2) integral_0^(r - delta) sqrt(h'')`` for each cutoff ``delta``.

    Growth like ``log(1/delta)`` (positive ``log_slope``) is the numerical
    witness that the distance to the boundary diverges.
    """
    r = sol.r
    deltas = [float(d) for d in cutoffs]
    if not deltas:
        raise DomainError("at least one cutoff is required")
    if any(not (0.0 < d < r) for d in deltas):
        raise DomainError(f"cutoffs must lie in (0, r={r})")
    if any(b >= a for a, b in zip(deltas, deltas[1:])):
        raise DomainError("cutoffs must be strictly decreasing")
    if sol.grid.u[-1] < r - deltas[-1]:
        raise InsufficientGridError(f"grid ends at {sol.grid.u[-1]!r}, before r - delta = {r - deltas[-1]!r}")
    lengths = [_refined_trapezoid(sol, r - d) for d in deltas]
    slope = None
    if len(deltas) > 1:
        slope = float(np.polyfit(np.log(1.0 / np.array(deltas)), lengths, 1)[0])
    return CompletenessReport(r, deltas, lengths, slope)


@dataclass
class BoundaryGrowthReport:
    r: float
    u: list[float]
    sqrt_h2: list[float]
    bound: list[float]  # 1 / (r - u)
    ok: bool

    def to_dict(self) -> dict:
        return asdict(self)


def boundary_growth_check(
    sol: PotentialSolution, window: float = 0.05, offsets: Sequence[float] | None = None
) -> BoundaryGrowthReport:
    """Check ``sqrt(h''(u)) > 1/(r - u)`` at points within ``window`` of the boundary.

    The inequality is asymptotic, so it is only tested near the boundary;
    default offsets run geometrically from just inside the window down to
    ``1e-3`` (closer in, the margin of the exact hyperbolic solution shrinks
    below the integration error).
    """
    r = sol.r
    if offsets is None:
        offsets = np.geomspace(0.98 * window, 1e-3, 12)
    off = np.asarray(offsets, dtype=float)
    if np.any(off <= 0.0) or np.any(off >= window):
        raise DomainError(f"offsets must lie in (0, {window})")
    u = r - off
    if u.max() > sol.grid.u[-1]:
        raise InsufficientGridError("grid does not reach the requested offsets")
    root = np.sqrt(_curvature_at(sol, u))
    bound = 1.0 / off
    return BoundaryGrowthReport(r, u.tolist(), root.tolist(), bound.tolist(), bool(np.all(root > bound)))


def ricci_flat_completeness(K: RicciFlatPotential, t_points: Sequence[float]) -> list[float]:
    """Partial radial lengths ``(1/sqrt 2) integral_0^t sqrt(K'')`` for increasing ``t``."""
    t = np.asarray(t_points, dtype=float)
    if t.size == 0:
        return []
    if np.any(np.diff(t) <= 0.0):
        raise DomainError("t_points must be strictly increasing")
    if t[0] < 0.0 or t[-1] > K.grid.u[-1]:
        raise DomainError("t_points must lie within the potential's grid")
    logD = log_density_function(K.space)
    n = K.space.n

    def root_curvature(x: float) -> float:
        if x == 0.0:
            return 1.0
        _, k1, _ = K.grid.sample([x])
        return math.exp(0.5 * (logD(x) - (n - 1) * math.log(k1[0])))

    nodes = np.concatenate(([0.0], t)) if t[0] > 0.0 else t
    lengths = _SQRT_HALF * cumulative_simpson(root_curvature, nodes, abs_tol=1e-10, rel_tol=1e-10)
    return lengths[1:].tolist() if t[0] > 0.0 else lengths.tolist()


def lower_bound_hyperbolic(n: int) -> float:
    """``-pi (n pi)^(1/n)``, a uniform lower bound on ``h_r(0)`` over ``T^r H^n``, ``r < pi``."""
    return -math.pi * (n * math.pi) ** (1.0 / n)


@dataclass
class Lemma41Report:
    n: int
    bound: float
    radii: list[float]
    a: list[float]
    margins: list[float]
    worst_margin: float | None
    ok: bool
    monotone_ok: bool
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def lemma41_check(n: int, radii: Sequence[float], cfg: ShootingConfig | None = None) -> Lemma41Report:
    space = SpaceSpec(Family.REAL_HYPERBOLIC, n)
    bound = lower_bound_hyperbolic(n)
    kept, centers, failures = [], [], []
    for entry in family_sweep(space, 1.0, radii, cfg):
        if entry.ok:
            kept.append(entry.r)
            centers.append(entry.solution.a)
        else:
            failures.append({"r": entry.r, "error": entry.error})
    margins = [a - bound for a in centers]
    return Lemma41Report(
        n=n,
        bound=bound,
        radii=kept,
        a=centers,
        margins=margins,
        worst_margin=min(margins) if margins else None,
        ok=not failures and all(m >= 0.0 for m in margins),
        monotone_ok=all(b < a for a, b in zip(centers, centers[1:])),
        failures=failures,
    )


def curvature_threshold(n: int) -> float:
    return (n - 1) / (6.0 * (n + 1))


@dataclass
class CurvatureReport:
    r: float
    a: float
    b: float  # 0.5 exp((n+1) a / n)
    b_from_grid: float  # h''(0) / 2 as reported by the solver
    threshold: float
    negative_at_center: bool

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class CurvatureSweep:
    n: int
    reports: list[CurvatureReport]
    epsilon_estimate: float | None  # largest flagged radius minus pi/2
    resolution: float | None  # sampling step of the radii
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "reports": [rep.to_dict() for rep in self.reports],
            "epsilon_estimate": self.epsilon_estimate,
            "resolution": self.resolution,
            "failures": list(self.failures),
        }


def curvature_center_sweep(n: int, radii: Sequence[float], cfg: ShootingConfig | None = None) -> CurvatureSweep:
    """Center-curvature criterion for the Ricci ``-(n+1)`` metrics on ``T^r H^n``.

    Holomorphic sectional curvature along the Monge–Ampère leaves is negative
    near the center when ``b = h''(0)/2`` exceeds ``(n-1)/(6(n+1))``.  The
    epsilon estimate is a sampled lower bound, not a root.
    """
    space = SpaceSpec(Family.REAL_HYPERBOLIC, n)
    lam = n + 1.0
    threshold = curvature_threshold(n)
    reports, failures = [], []
    for entry in family_sweep(space, lam, radii, cfg):
        if not entry.ok:
            failures.append({"r": entry.r, "error": entry.error})
            continue
        sol = entry.solution
        b = 0.5 * math.exp((n + 1) * sol.a / n)
        reports.append(CurvatureReport(entry.r, sol.a, b, 0.5 * float(sol.grid.h2[0]), threshold, b > threshold))
    flagged = [rep.r for rep in reports if rep.negative_at_center]
    radii = [float(r) for r in radii]
    resolution = float(np.median(np.diff(radii))) if len(radii) > 1 else None
    eps = max(flagged) - math.pi / 2 if flagged else None
    return CurvatureSweep(n, reports, eps, resolution, failures)
