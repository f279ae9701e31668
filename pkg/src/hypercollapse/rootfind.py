"""Scalar root/minimum refinement used by the critical-structure search.

Bisection and golden-section are deliberately simple: the functions we
refine are smooth and cheap, so robustness beats speed here.
"""

from __future__ import annotations

import math
from typing import Callable

GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_root(f: Callable[[float], float], a: float, b: float,
                rel_tol: float = 1e-12) -> float:
    """Refine a sign change with f(a) >= 0 > f(b) down to relative width."""
    fa, fb = f(a), f(b)
    if not (fa >= 0.0 > fb):
        raise ValueError(f"not a (>=0, <0) bracket: f({a})={fa}, f({b})={fb}")
    while (b - a) > rel_tol * max(abs(b), rel_tol):
        mid = 0.5 * (a + b)
        if f(mid) < 0.0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def golden_min(f: Callable[[float], float], a: float, b: float,
               xtol: float = 1e-11) -> tuple[float, float]:
    """Golden-section minimization on [a, b]; returns (argmin, min value)."""
    c = b - GOLDEN * (b - a)
    d = a + GOLDEN * (b - a)
    fc, fd = f(c), f(d)
    while (b - a) > xtol:
        if fc < fd:
            b, d, fd = d, c, fc
            c = b - GOLDEN * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + GOLDEN * (b - a)
            fd = f(d)
    x = 0.5 * (a + b)
    return x, f(x)
