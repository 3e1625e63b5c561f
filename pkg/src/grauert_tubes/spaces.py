"""Rank-one symmetric spaces and the densities entering the radial ODE.

Every center manifold ``M`` contributes a density ``D_M(u)`` to

    h''(u) h'(u)^(n-1) = exp(lam * h(u)) * D_M(u),

where ``u`` is the square root of the adapted length-squared function
(``rho = 4|v|^2``, so ``u = 2|v|``).  Only the ``u`` coordinate is used here.
"""

from __future__ import annotations

import contextlib
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Iterator

import numpy as np

from .errors import DomainError, UnsupportedFamilyError

__all__ = [
    "Family",
    "SpaceSpec",
    "space_from_name",
    "density",
    "log_density",
    "log_density_function",
    "density_nth_root",
    "density_fault",
]


class Family(str, Enum):
    EUCLIDEAN = "euclidean"
    REAL_HYPERBOLIC = "hyperbolic"
    ROUND_SPHERE = "sphere"
    REAL_PROJECTIVE = "rp"
    COMPLEX_PROJECTIVE = "cp"
    QUATERNIONIC_PROJECTIVE = "hp"
    CAYLEY_PLANE = "cayley"

    @property
    def compact(self) -> bool:
        return self not in (Family.EUCLIDEAN, Family.REAL_HYPERBOLIC)

    @property
    def projective(self) -> bool:
        return self in _FIXED_K


_FIXED_K = {
    Family.COMPLEX_PROJECTIVE: 1,
    Family.QUATERNIONIC_PROJECTIVE: 3,
    Family.CAYLEY_PLANE: 7,
}


@dataclass(frozen=True)
class SpaceSpec:
    """Center manifold family with real dimension ``n`` and density exponent ``k``.

    ``k`` may be omitted; it is then filled in from the family.  Passing a ``k``
    that disagrees with the family raises :class:`DomainError`.  The Cayley
    plane is geometrically 16-dimensional but any ``n`` is accepted.
    """

    family: Family
    n: int
    k: int | None = None

    def __post_init__(self):
        family = Family(self.family)
        object.__setattr__(self, "family", family)
        if isinstance(self.n, bool) or int(self.n) != self.n or self.n < 1:
            raise DomainError(f"dimension n must be a positive integer, got {self.n!r}")
        object.__setattr__(self, "n", int(self.n))
        forced = _forced_k(family, self.n)
        if self.k is not None and self.k != forced:
            raise DomainError(f"k={self.k} is inconsistent with {family.value} (expected k={forced})")
        object.__setattr__(self, "k", forced)

    @property
    def r_max(self) -> float:
        return math.pi if self.family is Family.REAL_HYPERBOLIC else math.inf

    @property
    def name(self) -> str:
        return self.family.value

    def to_dict(self) -> dict:
        return {
            "family": self.family.value,
            "n": self.n,
            "k": self.k,
            "r_max": None if math.isinf(self.r_max) else self.r_max,
            "name": self.name,
        }


def _forced_k(family: Family, n: int) -> int:
    if family in (Family.ROUND_SPHERE, Family.REAL_PROJECTIVE):
        return n - 1
    return _FIXED_K.get(family, 0)


def space_from_name(name: str, n: int) -> SpaceSpec:
    """Build a space from its CLI name (``euclidean``, ``hyperbolic``, ``sphere``, ...)."""
    try:
        family = Family(name.lower())
    except ValueError:
        choices = ", ".join(f.value for f in Family)
        raise DomainError(f"unknown space {name!r}; choose one of: {choices}") from None
    return SpaceSpec(family, n)


# --- fault injection (test hook) -------------------------------------------

_FAULT = {"sinh_to_cosh": False}


@contextlib.contextmanager
def density_fault() -> Iterator[None]:
    """Swap sinh for cosh in the sphere densities while the context is active.

    Exists only so that the validation suite can prove it notices a corrupted
    density.
    """
    _FAULT["sinh_to_cosh"] = True
    try:
        yield
    finally:
        _FAULT["sinh_to_cosh"] = False


# --- scalar kernels ---------------------------------------------------------

_LOG2 = math.log(2.0)


def _log_sinh(x: float) -> float:
    if x < 20.0:
        return math.log(math.sinh(x))
    return x - _LOG2 + math.log1p(-math.exp(-2.0 * x))


def _log_cosh(x: float) -> float:
    x = abs(x)
    return x - _LOG2 + math.log1p(math.exp(-2.0 * x))


def _log_sin(x: float) -> float:
    s = math.sin(x)
    return math.log(s) if s > 0.0 else -math.inf


def _check_u(space: SpaceSpec, u: float) -> None:
    if not (u >= 0.0) or math.isinf(u):
        raise DomainError(f"u must be a finite nonnegative number, got {u!r}")
    if u >= space.r_max:
        raise DomainError(f"u={u!r} lies outside the {space.name} domain [0, {space.r_max})")


def log_density_function(space: SpaceSpec) -> Callable[[float], float]:
    """Unchecked scalar ``u -> log D_M(u)`` (``-inf`` at ``u = 0`` when ``n >= 2``).

    Used in the integrator's inner loop, so it works on plain floats and skips
    domain validation.
    """
    n, k, fam = space.n, space.k, space.family
    p = n - 1
    sphere_log = _log_cosh if _FAULT["sinh_to_cosh"] else _log_sinh

    if p == 0:
        if fam.projective:
            return lambda u: k * _log_cosh(0.5 * u)
        return lambda u: 0.0

    if fam is Family.EUCLIDEAN:
        return lambda u: p * math.log(u) if u > 0.0 else -math.inf
    if fam is Family.REAL_HYPERBOLIC:
        return lambda u: p * _log_sin(u) if u > 0.0 else -math.inf
    if fam in (Family.ROUND_SPHERE, Family.REAL_PROJECTIVE):
        return lambda u: p * sphere_log(u) if u > 0.0 else -math.inf

    const = p * _LOG2

    def projective(u: float) -> float:
        if u <= 0.0:
            return -math.inf
        half = 0.5 * u
        return const + k * _log_cosh(half) + p * _log_sinh(half)

    return projective


def log_density(space: SpaceSpec, u: float) -> float:
    _check_u(space, u)
    return log_density_function(space)(float(u))


def density(space: SpaceSpec, u):
    """``D_M(u)``; accepts a scalar or an array of nonnegative ``u``."""
    f = log_density_function(space)
    if np.ndim(u) == 0:
        _check_u(space, float(u))
        return math.exp(f(float(u)))
    arr = np.asarray(u, dtype=float)
    for x in arr.flat:
        _check_u(space, float(x))
    return np.exp(np.array([f(float(x)) for x in arr.flat])).reshape(arr.shape)


def density_nth_root(space: SpaceSpec, u: float) -> float:
    """``D_M(u)^(1/(n-1))`` in closed form: value 0 and slope 1 at the origin."""
    if space.n < 2:
        raise UnsupportedFamilyError("density_nth_root needs n >= 2; the n = 1 ODE has no such root")
    _check_u(space, u)
    u = float(u)
    fam = space.family
    if fam is Family.EUCLIDEAN:
        return u
    if fam is Family.REAL_HYPERBOLIC:
        return math.sin(u)
    if fam in (Family.ROUND_SPHERE, Family.REAL_PROJECTIVE):
        return math.cosh(u) if _FAULT["sinh_to_cosh"] else math.sinh(u)
    half = 0.5 * u
    return 2.0 * math.cosh(half) ** (space.k / (space.n - 1)) * math.sinh(half)
