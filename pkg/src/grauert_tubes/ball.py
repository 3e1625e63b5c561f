"""Closed-form Kähler–Einstein potentials on balls ``B_r`` in complex ``n``-space.

``w^r = -log(r^2 - |z|^2) + 2/(n+1) log r`` solves ``det(w_ij) = exp((n+1) w)``
with infinite boundary values; ``w~^r = r^2 (w^r - a_r)`` is the potential of
the rescaled metric of Ricci curvature ``-(n+1)/r^2`` and tends to ``|z|^2``.
Everything depends on ``z`` only through ``x = |z|^2``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .errors import DomainError

__all__ = [
    "BallPotentialEval",
    "center_value",
    "w_potential",
    "dw_dr",
    "w_tilde",
    "dw_tilde_dr",
    "gradient_norm",
    "hessian_eigs",
    "ma_residual_ball",
    "dense_hessian",
    "evaluate",
]


def _check(r: float, n: int, x: float) -> None:
    if not r > 0.0:
        raise DomainError(f"ball radius must be positive, got {r!r}")
    if int(n) != n or n < 1:
        raise DomainError(f"complex dimension must be a positive integer, got {n!r}")
    if not (0.0 <= x < r * r):
        raise DomainError(f"|z|^2={x!r} must lie in [0, r^2={r * r!r})")


def center_value(r: float, n: int) -> float:
    """``a_r = inf w^r = w^r(0) = -2n/(n+1) log r``."""
    return -2.0 * n / (n + 1) * math.log(r)


def w_potential(r: float, n: int, z_norm_sq: float) -> float:
    _check(r, n, z_norm_sq)
    return -math.log(r * r - z_norm_sq) + 2.0 / (n + 1) * math.log(r)


def dw_dr(r: float, n: int, z_norm_sq: float) -> float:
    _check(r, n, z_norm_sq)
    x = z_norm_sq
    return -2.0 * (n * r * r + x) / ((n + 1) * r * (r * r - x))


def _log_alpha(r: float, x: float) -> float:
    """``log(r^2 / (r^2 - x))``.

    log1p for small ``x / r^2``; above ``r^2 / 2`` the difference ``r^2 - x`` is
    exact in floating point and the quotient is the better-conditioned form.
    """
    rr = r * r
    if x < 0.5 * rr:
        return -math.log1p(-x / rr)
    return math.log(rr / (rr - x))


def w_tilde(r: float, n: int, z_norm_sq: float) -> float:
    """``r^2 log(r^2 / (r^2 - |z|^2))``."""
    _check(r, n, z_norm_sq)
    return r * r * _log_alpha(r, z_norm_sq)


def dw_tilde_dr(r: float, n: int, z_norm_sq: float) -> float:
    """``2r log(r^2/(r^2-x)) - 2r x/(r^2-x)``.

    With ``y = x/r^2`` the bracket is ``-sum_{k>=2} (1 - 1/k) y^k``; the
    series is summed for small ``y``, where the closed form cancels.
    """
    _check(r, n, z_norm_sq)
    x = z_norm_sq
    y = x / (r * r)
    if y < 0.05:
        total, power = 0.0, y
        for k in range(2, 18):
            power *= y
            total += (1.0 - 1.0 / k) * power
        return -2.0 * r * total
    return 2.0 * r * _log_alpha(r, x) - 2.0 * r * x / (r * r - x)


def gradient_norm(r: float, n: int, z_norm_sq: float) -> float:
    """Euclidean norm of ``(d w~ / d z_i)_i = r^2 conj(z_i) / (r^2 - |z|^2)``."""
    _check(r, n, z_norm_sq)
    return r * r * math.sqrt(z_norm_sq) / (r * r - z_norm_sq)


def hessian_eigs(r: float, n: int, z_norm_sq: float) -> tuple[float, float]:
    """``(radial, tangential)`` eigenvalues of the complex Hessian of ``w~^r``.

    The Hessian is ``alpha I + beta conj(z) z^T`` with ``alpha = r^2/(r^2-|z|^2)``
    and ``beta = r^2/(r^2-|z|^2)^2``; the tangential eigenvalue has
    multiplicity ``n - 1``.
    """
    _check(r, n, z_norm_sq)
    d = r * r - z_norm_sq
    alpha = r * r / d
    return alpha + r * r * z_norm_sq / (d * d), alpha


def ma_residual_ball(r: float, n: int, z_norm_sq: float) -> float:
    """Relative defect of ``det(w~_ij) = exp((n+1) w~ / r^2)``.

    Both sides are compared in log form; the eigenvalues are taken from their
    closed forms.
    """
    _check(r, n, z_norm_sq)
    radial, tangential = hessian_eigs(r, n, z_norm_sq)
    log_det = math.log(radial) + (n - 1) * math.log(tangential)
    log_rhs = (n + 1) * w_tilde(r, n, z_norm_sq) / (r * r)
    return abs(math.expm1(log_det - log_rhs))


def dense_hessian(r: float, n: int, z_norm_sq: float) -> np.ndarray:
    """The full ``n x n`` Hessian at ``z = (|z|, 0, ..., 0)``; for cross-checks."""
    _check(r, n, z_norm_sq)
    z = np.zeros(n, dtype=complex)
    z[0] = math.sqrt(z_norm_sq)
    d = r * r - z_norm_sq
    return (np.eye(n) * r * r * d + r * r * np.outer(z.conj(), z)) / (d * d)


@dataclass(frozen=True)
class BallPotentialEval:
    r: float
    n: int
    z_norm_sq: float
    w: float
    w_tilde: float
    gradient_norm: float
    hessian_eigs: tuple[float, float]

    def to_dict(self) -> dict:
        d = asdict(self)
        d["hessian_eigs"] = list(self.hessian_eigs)
        return d


def evaluate(r: float, n: int, z_norm_sq: float) -> BallPotentialEval:
    return BallPotentialEval(
        r=float(r),
        n=int(n),
        z_norm_sq=float(z_norm_sq),
        w=w_potential(r, n, z_norm_sq),
        w_tilde=w_tilde(r, n, z_norm_sq),
        gradient_norm=gradient_norm(r, n, z_norm_sq),
        hessian_eigs=hessian_eigs(r, n, z_norm_sq),
    )
