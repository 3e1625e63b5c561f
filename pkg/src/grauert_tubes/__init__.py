"""Kähler–Einstein and Ricci-flat radial potentials on Grauert tubes over rank-one symmetric spaces."""

from __future__ import annotations

__version__ = "0.1.0"

from .errors import (
    ConvergenceError,
    DomainError,
    GrauertError,
    InconsistentInputError,
    InsufficientGridError,
    IntegrationDivergedError,
    NoBracketError,
    UnsupportedFamilyError,
)
from .ode import GridFunction, IntegratorConfig, OdeProblem, integrate, ode_residual
from .rescaling import ball_exhaustion_check, exhaustion_experiment, rescale, ricci_flat_potential
from .shooting import PotentialSolution, ShootingConfig, family_sweep, radius_of, solve_potential
from .spaces import Family, SpaceSpec, density, density_nth_root, space_from_name

__all__ = [
    "__version__",
    "ConvergenceError",
    "DomainError",
    "GrauertError",
    "InconsistentInputError",
    "InsufficientGridError",
    "IntegrationDivergedError",
    "NoBracketError",
    "UnsupportedFamilyError",
    "GridFunction",
    "IntegratorConfig",
    "OdeProblem",
    "integrate",
    "ode_residual",
    "ball_exhaustion_check",
    "exhaustion_experiment",
    "rescale",
    "ricci_flat_potential",
    "PotentialSolution",
    "ShootingConfig",
    "family_sweep",
    "radius_of",
    "solve_potential",
    "Family",
    "SpaceSpec",
    "density",
    "density_nth_root",
    "space_from_name",
]
