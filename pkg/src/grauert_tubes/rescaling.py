"""Rescaled exhaustion: Kähler–Einstein potentials on growing tubes tend to the Ricci-flat one.

For the ``lam = 1`` solution ``h_r`` with center value ``a_r`` the function

    K_r = exp(-a_r / n) (h_r - a_r)

is a potential of Ricci curvature ``-exp(a_r / n)``; it satisfies
``K_r(0) = 0``, ``K_r''(0) = 1`` and decreases in ``r`` towards the Ricci-flat
potential ``K`` given by ``(K')^n = integral_0^t n D``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import ball
from .errors import DomainError, InconsistentInputError, UnsupportedFamilyError
from .ode import RICCI_FLAT_COLUMNS, GridFunction, ode_residual
from .quadrature import adaptive_simpson, cumulative_simpson
from .shooting import PotentialSolution, ShootingConfig, family_sweep
from .spaces import Family, SpaceSpec, log_density_function

__all__ = [
    "RescaledPotential",
    "RicciFlatPotential",
    "ConvergenceReport",
    "rescale",
    "ricci_flat_potential",
    "exhaustion_experiment",
    "ball_exhaustion_check",
]

RESIDUAL_TOL = 1e-8
ORDER_SLACK = 1e-9  # absolute slack for pointwise orderings between computed potentials


@dataclass
class RescaledPotential:
    base: PotentialSolution
    grid: GridFunction
    effective_lambda: float
    residual: float = 0.0

    def reconstruct(self) -> np.ndarray:
        """``h_r = a_r + exp(a_r / n) K_r`` on the base grid."""
        a, n = self.base.a, self.base.space.n
        return a + math.exp(a / n) * self.grid.h


@dataclass
class RicciFlatPotential:
    space: SpaceSpec
    grid: GridFunction
    cumulative_density: np.ndarray = field(repr=False)  # integral_0^t n D at the grid nodes

    def to_dict(self) -> dict:
        return {
            "space": self.space.to_dict(),
            "grid": self.grid.to_records(RICCI_FLAT_COLUMNS),
        }


@dataclass
class ConvergenceReport:
    """Per-radius distances between an exhaustion family and its limit.

    ``monotone_ok`` means the gaps never increase along ``radii`` and the
    family itself is pointwise decreasing in ``r``.  ``ordering_ok`` records
    the second part alone, ``lower_bound_ok`` the bound ``family >= limit >= 0``.
    """

    radii: list[float]
    sup_gap: list[float]
    monotone_ok: bool
    derivative_gaps: dict[str, list[float]]
    ordering_ok: bool = True
    lower_bound_ok: bool = True
    failures: list[dict] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "radii": list(self.radii),
            "sup_gap": list(self.sup_gap),
            "monotone_ok": self.monotone_ok,
            "derivative_gaps": {k: list(v) for k, v in self.derivative_gaps.items()},
            "ordering_ok": self.ordering_ok,
            "lower_bound_ok": self.lower_bound_ok,
            "failures": list(self.failures),
        }

    @property
    def strictly_decreasing(self) -> bool:
        return all(b < a for a, b in zip(self.sup_gap, self.sup_gap[1:]))


def rescale(base: PotentialSolution) -> RescaledPotential:
    if base.lam != 1.0:
        raise InconsistentInputError(f"rescaling expects a lambda = 1 solution, got lambda = {base.lam}")
    n, a = base.space.n, base.a
    scale = math.exp(-a / n)
    grid = GridFunction(base.grid.u, scale * base.excess, scale * base.grid.h1, scale * base.grid.h2)
    lam_eff = math.exp(a / n)
    residual = ode_residual(base.space, lam_eff, grid)
    if not residual < RESIDUAL_TOL:
        raise InconsistentInputError(f"rescaled ODE residual {residual:.3e} exceeds {RESIDUAL_TOL:g}")
    return RescaledPotential(base, grid, lam_eff, residual)


def ricci_flat_potential(
    space: SpaceSpec,
    t_max: float,
    probes: Sequence[float] | None = None,
    num: int = 201,
    panel: float = 0.25,
) -> RicciFlatPotential:
    """Ricci-flat potential ``K`` with ``K(0) = 0`` on ``[0, t_max]``.

    ``K'(t) = (integral_0^t n D)^(1/n)`` and ``K = integral K'`` are evaluated by
    adaptive Simpson quadrature with checkpoints at every output node; ``K''``
    follows from ``K'' (K')^(n-1) = D`` and equals 1 at the center.
    """
    if space.family is Family.REAL_HYPERBOLIC:
        raise UnsupportedFamilyError("the Ricci-flat limit is only built over compact centers and Euclidean space")
    if not (t_max > 0.0) or math.isinf(t_max):
        raise DomainError(f"t_max must be a finite positive number, got {t_max!r}")
    n = space.n
    logD = log_density_function(space)
    nodes = np.linspace(0.0, t_max, max(num, int(math.ceil(t_max / panel)) + 1))
    if probes is not None:
        p = np.asarray(probes, dtype=float)
        if np.any(p < 0.0) or np.any(p > t_max):
            raise DomainError("probes must lie in [0, t_max]")
        nodes = np.union1d(nodes, p)

    def weight(t: float) -> float:
        return n * math.exp(logD(t))

    inner = cumulative_simpson(weight, nodes)
    inv_n = 1.0 / n

    def slope(t: float) -> float:
        j = int(np.searchsorted(nodes, t, side="right")) - 1
        base = nodes[j]
        total = inner[j] + (adaptive_simpson(weight, base, t) if t > base else 0.0)
        return total**inv_n if total > 0.0 else 0.0

    K = cumulative_simpson(slope, nodes)
    K1 = np.array([v**inv_n if v > 0.0 else 0.0 for v in inner])
    K2 = np.ones_like(K1)
    for i in range(1, nodes.size):
        K2[i] = math.exp(logD(float(nodes[i])) - (n - 1) * math.log(K1[i]))
    return RicciFlatPotential(space, GridFunction(nodes, K, K1, K2), inner)


def _nonincreasing(seq: Sequence[float]) -> bool:
    return all(b <= a for a, b in zip(seq, seq[1:]))


def exhaustion_experiment(
    space: SpaceSpec,
    radii: Sequence[float],
    window: float,
    cfg: ShootingConfig | None = None,
    n_probes: int = 50,
) -> tuple[ConvergenceReport, list[RescaledPotential], RicciFlatPotential]:
    """Compare ``K_r`` for each radius with the Ricci-flat ``K`` on ``[0, window]``.

    Returns the report together with the rescaled family and the limit so
    callers can inspect pointwise values.
    """
    radii = [float(r) for r in radii]
    if not radii:
        raise DomainError("at least one radius is required")
    if not (0.0 < window < min(radii)):
        raise DomainError(f"window {window!r} must be positive and below the smallest radius")
    probes = np.linspace(0.0, window, n_probes)
    limit = ricci_flat_potential(space, window, probes)
    lim_idx = limit.grid.index_of(probes)
    K, K1, K2 = limit.grid.h[lim_idx], limit.grid.h1[lim_idx], limit.grid.h2[lim_idx]

    failures: list[dict] = []
    family: list[RescaledPotential] = []
    kept: list[float] = []
    for entry in family_sweep(space, 1.0, radii, cfg, probes):
        if not entry.ok:
            failures.append({"r": entry.r, "error": entry.error})
            continue
        try:
            family.append(rescale(entry.solution))
        except InconsistentInputError as exc:
            failures.append({"r": entry.r, "error": f"{type(exc).__name__}: {exc}"})
            continue
        kept.append(entry.r)

    gaps, first, second = [], [], []
    values = []
    lower_ok = bool(np.all(K >= 0.0))
    for resc in family:
        idx = resc.grid.index_of(probes)
        Kr = resc.grid.h[idx]
        values.append(Kr)
        gaps.append(float(np.max(np.abs(Kr - K))))
        first.append(float(np.max(np.abs(resc.grid.h1[idx] - K1))))
        second.append(float(np.max(np.abs(resc.grid.h2[idx] - K2))))
        lower_ok = lower_ok and bool(np.all(Kr >= K - ORDER_SLACK))
    ordering_ok = all(np.all(big <= small + ORDER_SLACK) for small, big in zip(values, values[1:]))
    report = ConvergenceReport(
        radii=kept,
        sup_gap=gaps,
        monotone_ok=bool(ordering_ok and _nonincreasing(gaps)),
        derivative_gaps={"first": first, "second": second},
        ordering_ok=bool(ordering_ok),
        lower_bound_ok=lower_ok,
        failures=failures,
    )
    return report, family, limit


def ball_exhaustion_check(n: int, radii: Sequence[float], probes: Sequence[float]) -> ConvergenceReport:
    """Distance of the closed-form ball family ``w~^r`` from ``|z|^2`` at the ``|z|`` probes.

    Gradient gaps are ``| grad w~^r - conj(z) |`` and Hessian gaps the largest
    ``|eigenvalue - 1|``.
    """
    radii = [float(r) for r in radii]
    zs = np.asarray(probes, dtype=float)
    if np.any(zs < 0.0):
        raise DomainError("|z| probes must be nonnegative")
    if radii and np.any(zs >= min(radii)):
        raise DomainError("|z| probes must lie inside the smallest ball")
    gaps, first, second, values = [], [], [], []
    for r in radii:
        row = []
        g0 = g1 = g2 = 0.0
        for z in zs:
            x = float(z * z)
            wt = ball.w_tilde(r, n, x)
            row.append(wt)
            g0 = max(g0, abs(wt - x))
            # grad w~ = alpha conj(z), so the gap vector has norm (alpha - 1)|z| = |z|^3 / (r^2 - |z|^2)
            g1 = max(g1, float(z) * x / (r * r - x))
            radial, tangential = ball.hessian_eigs(r, n, x)
            g2 = max(g2, abs(radial - 1.0), abs(tangential - 1.0) if n > 1 else 0.0)
        gaps.append(g0)
        first.append(g1)
        second.append(g2)
        values.append(np.array(row))
    ordering_ok = all(np.all(big <= small) for small, big in zip(values, values[1:]))
    return ConvergenceReport(
        radii=radii,
        sup_gap=gaps,
        monotone_ok=bool(ordering_ok and _nonincreasing(gaps)),
        derivative_gaps={"first": first, "second": second},
        ordering_ok=bool(ordering_ok),
        lower_bound_ok=all(bool(np.all(v >= zs * zs)) for v in values),
    )
