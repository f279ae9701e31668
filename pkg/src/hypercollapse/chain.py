"""Reduced collapse chain: patch and debris counts after each removal.

One step of the randomized collapse removes the vertex under a uniformly
chosen patch.  Conditional on the current counts, each of the other
patches sits on that same vertex with chance 1/(remaining vertices), so
the number of shared patches is Binomial, and the 2-edges at the removed
vertex (which turn into new patches) are Poisson with the exact
per-subset rate of the thinned model.  Those two draws reproduce the
patch/debris law of the full engine exactly, which is what makes this
chain a valid fast surrogate; the equivalence is pinned by a
total-variation test against `hypergraph.collapse_all`.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .errors import ChainAbsorbedError, ChainExhaustedError
from .series import BetaSeries


@dataclass(frozen=True)
class ChainState:
    """Counts after `removed` collapses of an n_vertices model."""

    removed: int
    patches: int
    debris: int
    n_vertices: int

    def __post_init__(self) -> None:
        if not 0 <= self.removed <= self.n_vertices:
            raise ValueError("removed out of range")
        if self.patches < 0 or self.debris < 0:
            raise ValueError("negative count")

    @property
    def absorbed(self) -> bool:
        return self.patches == 0


def _binomial(n: int, k: int) -> float:
    out = 1.0
    for i in range(k):
        out *= (n - i) / (i + 1)
    return out


def edge_rate(n_vertices: int, removed: int, size: int, series: BetaSeries) -> float:
    """Per-subset Poisson rate of size-`size` edges after `removed` collapses.

    A surviving size-`size` edge is any original size-(size+i) edge whose
    other i vertices were all removed; summing those contributions gives

        N * sum_i b_{size+i} * C(removed, i) / C(N, i + size)

    computed with running products of ratios (no factorial overflow) and
    exact for polynomial series.
    """
    N, n, j = int(n_vertices), int(removed), int(size)
    if not 0 <= n < N:
        raise ValueError(f"removed must be in [0, n_vertices), got {n} of {N}")
    if j < 0 or j > N:
        raise ValueError(f"size must be in [0, n_vertices], got {j}")
    imax = min(n, series.degree - j, N - j)
    if imax < 0:
        return 0.0
    r = N / _binomial(N, j)  # r_i = N * C(n, i) / C(N, i + j)
    total = series.coeff(j) * r
    for i in range(1, imax + 1):
        r = r * ((n - i + 1) / i) * ((i + j) / (N - i - j + 1))
        total += series.coeff(j + i) * r
    return total


def edge_rate_curve(n_vertices: int, size: int, series: BetaSeries) -> np.ndarray:
    """`edge_rate` for every removed count 0..n_vertices-1, one vectorized pass.

    Same recurrence and operation order as the scalar version; for i beyond
    a given removed count the running product hits an exact zero factor, so
    the truncation is automatic.
    """
    N, j = int(n_vertices), int(size)
    if N < 1:
        raise ValueError("need at least one vertex")
    if j < 0 or j > N:
        raise ValueError(f"size must be in [0, n_vertices], got {j}")
    n_arr = np.arange(N, dtype=float)
    if series.degree < j:
        return np.zeros(N)
    r = np.full(N, N / _binomial(N, j))
    total = series.coeff(j) * r
    imax = min(series.degree - j, N - j)
    for i in range(1, imax + 1):
        r = r * ((n_arr - i + 1) / i) * ((i + j) / (N - i - j + 1))
        total = total + series.coeff(j + i) * r
    return total


def step(state: ChainState, series: BetaSeries, rng: np.random.Generator,
         rate: Optional[float] = None) -> ChainState:
    """Advance one removal.

    `rate` may supply a precomputed edge_rate(N, removed, 2, series); the
    draw itself is exact either way.
    """
    if state.patches == 0:
        raise ChainAbsorbedError("no patches left")
    if state.removed >= state.n_vertices:
        raise ChainExhaustedError("every vertex already removed")
    N, n = state.n_vertices, state.removed
    if rate is None:
        rate = edge_rate(N, n, 2, series)
    shared = int(rng.binomial(state.patches - 1, 1.0 / (N - n)))
    new_patches = int(rng.poisson((N - n - 1) * rate))
    return ChainState(n + 1,
                      state.patches - 1 - shared + new_patches,
                      state.debris + 1 + shared,
                      N)


@dataclass
class ChainRun:
    """Absorption summary: removed vertices (the identifiable count in law)
    and final debris (initial debris included)."""

    removed: int
    debris: int
    trajectory: Optional[np.ndarray] = None  # rows (removed, patches, debris)


def run(n_vertices: int, series: BetaSeries, rng: np.random.Generator,
        record_trajectory: bool = False,
        rate_table: Optional[np.ndarray] = None) -> ChainRun:
    """Run to absorption from Poisson initial counts.

    Starts with patches ~ Poisson(N*b1) and debris ~ Poisson(N*b0), steps
    until no patches remain.  Absorption happens by removed = N at the
    latest: with one vertex left every remaining patch sits on it.
    """
    N = int(n_vertices)
    if N < 1:
        raise ValueError("need at least one vertex")
    if rate_table is None:
        rate_table = edge_rate_curve(N, 2, series)
    rates = rate_table.tolist() if isinstance(rate_table, np.ndarray) else list(rate_table)
    if len(rates) < N:
        raise ValueError("rate_table shorter than n_vertices")

    patches = int(rng.poisson(N * series.coeff(1)))
    debris = int(rng.poisson(N * series.coeff(0)))
    trajectory = [(0, patches, debris)] if record_trajectory else None

    # hot loop: mirrors step(); pinned to it by an equivalence test
    removed = 0
    binomial = rng.binomial
    poisson = rng.poisson
    while patches > 0 and removed < N:
        shared = int(binomial(patches - 1, 1.0 / (N - removed)))
        new_patches = int(poisson((N - removed - 1) * rates[removed]))
        patches = patches - 1 - shared + new_patches
        debris = debris + 1 + shared
        removed += 1
        if record_trajectory:
            trajectory.append((removed, patches, debris))

    traj_arr = np.asarray(trajectory, dtype=np.int64) if record_trajectory else None
    return ChainRun(removed, debris, traj_arr)
