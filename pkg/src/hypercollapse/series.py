"""Edge-density polynomial of the hypergraph model and its critical structure.

A model is a vector of non-negative coefficients (b0, b1, ..., bD): bj is
the expected number of size-j hyperedges per vertex.  All threshold
analysis runs through the deficiency function

    f(t) = b'(t) + log(1 - t),

the fluid-limit surplus of patches per remaining vertex once a fraction t
of the vertices has been collapsed.  Collapse is self-sustaining while
f > 0.  The threshold ``z_star`` is the first point where f turns strictly
negative (1 if it never does), and the tangential zeros of f before
``z_star`` (the ``zeta`` set) are the places where the collapse can die by
chance even though the mean flow survives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateModelError
from .rootfind import bisect_root, golden_min

# log(1 - t) blows up at 1; grids and evaluations are capped just below.
T_CAP = 1.0 - 1e-9


@dataclass(frozen=True)
class BetaSeries:
    """Non-negative polynomial coefficients (b0, ..., bD) of the edge-density series."""

    coeffs: tuple[float, ...]

    def __post_init__(self) -> None:
        coeffs = tuple(float(c) for c in self.coeffs)
        if not coeffs:
            raise ValueError("need at least one coefficient")
        for c in coeffs:
            if not math.isfinite(c) or c < 0.0:
                raise ValueError(f"coefficients must be finite and non-negative, got {c}")
        object.__setattr__(self, "coeffs", coeffs)

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    def coeff(self, j: int) -> float:
        """Coefficient bj, zero beyond the stored degree."""
        return self.coeffs[j] if 0 <= j <= self.degree else 0.0


@dataclass(frozen=True)
class CriticalStructure:
    """Collapse threshold and the tangency candidates below it.

    ``zeta`` holds refined locations of interior minima of the deficiency
    whose value is within ``tangency_tolerance`` of zero.  Tangency is
    numerically ill-posed (f touches zero without crossing), so these are
    reported candidates, not certified zeros.
    """

    z_star: float
    zeta: tuple[float, ...]
    tangency_tolerance: float


def _check_t(t: float) -> float:
    t = float(t)
    if not 0.0 <= t < 1.0:
        raise ValueError(f"t must be in [0, 1), got {t}")
    return t


def _falling(j: int, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= j - i
    return out


def evaluate(series: BetaSeries, t: float, order: int = 0) -> float:
    """Evaluate the series or one of its first three derivatives at t in [0, 1).

    Horner evaluation of the differentiated coefficient vector.
    """
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    t = _check_t(t)
    acc = 0.0
    for j in range(series.degree, order - 1, -1):
        acc = acc * t + series.coeffs[j] * _falling(j, order)
    return acc


def evaluate_grid(series: BetaSeries, ts: np.ndarray, order: int = 0) -> np.ndarray:
    """Vectorized `evaluate` on an array of points."""
    if order not in (0, 1, 2, 3):
        raise ValueError(f"order must be 0..3, got {order}")
    ts = np.asarray(ts, dtype=float)
    if ts.size and (ts.min() < 0.0 or ts.max() >= 1.0):
        raise ValueError("grid points must be in [0, 1)")
    acc = np.zeros_like(ts)
    for j in range(series.degree, order - 1, -1):
        acc = acc * ts + series.coeffs[j] * _falling(j, order)
    return acc


def deficiency(series: BetaSeries, t: float) -> float:
    """f(t) = b'(t) + log(1 - t); f(0) equals b1 exactly."""
    t = _check_t(t)
    return evaluate(series, t, 1) + math.log1p(-t)


def deficiency_grid(series: BetaSeries, ts: np.ndarray) -> np.ndarray:
    """Vectorized deficiency on an array of points."""
    ts = np.asarray(ts, dtype=float)
    return evaluate_grid(series, ts, 1) + np.log1p(-ts)


def critical_structure(series: BetaSeries, grid_points: int = 100_000,
                       tangency_tolerance: float = 1e-9) -> CriticalStructure:
    """Scan the deficiency for its threshold and tangency candidates.

    A uniform grid on [0, 1 - 1e-9] locates the first sign change of f,
    refined by bisection to 1e-12 relative width; interior grid minima
    before the threshold are refined by golden-section search and kept
    when |f| at the minimum is within the tangency tolerance.  A refined
    minimum below -tolerance means the grid stepped over a crossing, in
    which case the threshold is moved there.
    """
    if grid_points < 1000:
        raise ValueError("grid_points must be at least 1000")
    if tangency_tolerance <= 0.0:
        raise ValueError("tangency_tolerance must be positive")
    if series.coeff(1) <= 0.0:
        raise DegenerateModelError("b1 = 0: no patches at the start, nothing collapses")

    ts = np.linspace(0.0, T_CAP, grid_points)
    fs = deficiency_grid(series, ts)

    def f(t: float) -> float:
        return deficiency(series, t)

    z_star = 1.0
    negative = np.flatnonzero(fs < 0.0)
    if negative.size:
        k = int(negative[0])  # k >= 1 because f(0) = b1 > 0
        z_star = bisect_root(f, float(ts[k - 1]), float(ts[k]))

    zeta: list[float] = []
    interior = np.flatnonzero((fs[1:-1] <= fs[:-2]) & (fs[1:-1] <= fs[2:])) + 1
    for i in interior:
        if ts[i] >= z_star:
            break
        t_min, f_min = golden_min(f, float(ts[i - 1]), float(ts[i + 1]))
        if t_min >= z_star:
            continue
        if f_min < -tangency_tolerance:
            # crossing hidden between grid points: the threshold is earlier
            z_star = bisect_root(f, float(ts[i - 1]), t_min)
            continue
        if abs(f_min) <= tangency_tolerance:
            if zeta and abs(t_min - zeta[-1]) < 1e-8:
                continue
            zeta.append(t_min)
    zeta = [z for z in zeta if z < z_star]
    return CriticalStructure(z_star=float(z_star), zeta=tuple(zeta),
                             tangency_tolerance=float(tangency_tolerance))


def from_graph_params(p: float, alpha: float) -> BetaSeries:
    """Series of the open-vertex / open-edge random graph: (0, -log(1-p), alpha/2).

    Each vertex is open with probability p, each of the N*alpha/2 expected
    edges joins a uniform pair; open vertices are the initial patches.
    """
    p = float(p)
    alpha = float(alpha)
    if not 0.0 <= p < 1.0:
        raise ValueError(f"p must be in [0, 1), got {p}")
    if alpha < 0.0:
        raise ValueError(f"alpha must be non-negative, got {alpha}")
    return BetaSeries((0.0, -math.log1p(-p), alpha / 2.0))


def from_binomial_family(alpha: float, base: float = 0.1, slope: float = 0.9,
                         power: int = 7) -> BetaSeries:
    """Series with b(t) = alpha * (base + slope*t)**power, expanded to coefficients."""
    if alpha < 0.0 or base < 0.0 or slope < 0.0:
        raise ValueError("family parameters must be non-negative")
    if power < 1:
        raise ValueError("power must be a positive integer")
    return BetaSeries(tuple(
        alpha * math.comb(power, j) * base ** (power - j) * slope ** j
        for j in range(power + 1)
    ))
