"""Adaptive Simpson quadrature with cumulative checkpoints."""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = ["adaptive_simpson", "cumulative_simpson"]


def adaptive_simpson(
    f: Callable[[float], float],
    a: float,
    b: float,
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-13,
    max_depth: int = 48,
) -> float:
    """Integrate ``f`` over ``[a, b]``.

    Panels are split until the two-panel Simpson estimate agrees with the
    one-panel estimate to ``15 * max(abs_tol_local, rel_tol * |S|)``; each
    accepted panel gets the Richardson correction, so the local rule is sixth
    order.  ``abs_tol`` is distributed over panels in proportion to width.
    """
    if b == a:
        return 0.0
    sign = 1.0
    if b < a:
        a, b, sign = b, a, -1.0
    fa, fm, fb = f(a), f(0.5 * (a + b)), f(b)
    width = b - a
    whole = width / 6.0 * (fa + 4.0 * fm + fb)
    total = 0.0
    stack = [(a, b, fa, fm, fb, whole, 0)]
    while stack:
        lo, hi, flo, fmid, fhi, s, depth = stack.pop()
        mid = 0.5 * (lo + hi)
        lm, rm = 0.5 * (lo + mid), 0.5 * (mid + hi)
        flm, frm = f(lm), f(rm)
        h6 = (hi - lo) / 12.0
        left = h6 * (flo + 4.0 * flm + fmid)
        right = h6 * (fmid + 4.0 * frm + fhi)
        both = left + right
        diff = both - s
        tol = max(abs_tol * (hi - lo) / width, rel_tol * abs(both))
        if abs(diff) <= 15.0 * tol or depth >= max_depth or not math.isfinite(diff):
            total += both + diff / 15.0
        else:
            stack.append((mid, hi, fmid, frm, fhi, right, depth + 1))
            stack.append((lo, mid, flo, flm, fmid, left, depth + 1))
    return sign * total


def cumulative_simpson(
    f: Callable[[float], float],
    nodes: Sequence[float],
    abs_tol: float = 1e-12,
    rel_tol: float = 1e-13,
) -> np.ndarray:
    """Return ``I[i] = integral of f from nodes[0] to nodes[i]`` (``I[0] = 0``)."""
    x = np.asarray(nodes, dtype=float)
    out = np.zeros_like(x)
    acc = 0.0
    for i in range(1, len(x)):
        acc += adaptive_simpson(f, float(x[i - 1]), float(x[i]), abs_tol, rel_tol)
        out[i] = acc
    return out
