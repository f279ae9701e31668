"""Independent oracles shared by the test modules.

Everything here is deliberately written from the raw definitions (direct
combinatorics, pmf enumeration, grid scans, quadrature) and not from the
package's own routines, so that agreement is evidence and not tautology.
"""

from __future__ import annotations

import math
from collections import Counter

import numpy as np
from scipy.integrate import quad

from hypercollapse import Hypergraph


def first_negative_root(fn_vec, lo=0.0, hi=0.999999, grid=400001, iters=200):
    """First sign change of fn on [lo, hi]: fine-grid scan plus plain bisection.

    `fn_vec` must accept numpy arrays.  Returns None when fn stays
    non-negative on the grid.
    """
    ts = np.linspace(lo, hi, grid)
    vs = fn_vec(ts)
    idx = np.flatnonzero(vs < 0.0)
    if idx.size == 0:
        return None
    a, b = float(ts[idx[0] - 1]), float(ts[idx[0]])
    for _ in range(iters):
        mid = 0.5 * (a + b)
        if fn_vec(np.array([mid]))[0] < 0.0:
            b = mid
        else:
            a = mid
    return 0.5 * (a + b)


def poisson_pmf_table(mu: float) -> list[float]:
    """pmf values 0..K covering at least 1 - 1e-13 of the mass, padded so the
    truncated second moments are accurate as well."""
    p = math.exp(-mu)
    probs = [p]
    cum = p
    k = 0
    while cum < 1.0 - 1e-13 and k < 100_000:
        k += 1
        p *= mu / k
        probs.append(p)
        cum += p
    for _ in range(10):
        k += 1
        p *= mu / k
        probs.append(p)
    return probs


def jump_moment_matrix(mu_shared: float, mu_new: float) -> np.ndarray:
    """E(J x J) for the jump J = (1, -1 - W + U, 1 + W), by direct enumeration
    over independent W ~ Poisson(mu_shared) and U ~ Poisson(mu_new)."""
    pw = poisson_pmf_table(mu_shared)
    pu = poisson_pmf_table(mu_new)
    moment = np.zeros((3, 3))
    for w, prob_w in enumerate(pw):
        for u, prob_u in enumerate(pu):
            jump = np.array([1.0, -1.0 - w + u, 1.0 + w])
            moment += (prob_w * prob_u) * np.outer(jump, jump)
    return moment


def exact_edge_rate(n_vertices: int, removed: int, size: int, coeffs) -> float:
    """Per-subset edge rate by exact integer combinatorics (math.comb)."""
    total = 0.0
    for i in range(len(coeffs) - size):
        if i + size > n_vertices:
            break
        total += coeffs[size + i] * math.comb(removed, i) / math.comb(n_vertices, i + size)
    return n_vertices * total


def random_hypergraph(rng: np.random.Generator, max_vertices=10, max_edges=12) -> Hypergraph:
    """Small random instance with mixed edge sizes and multiplicities."""
    n = int(rng.integers(2, max_vertices + 1))
    h = Hypergraph(n)
    for _ in range(int(rng.integers(0, max_edges + 1))):
        size = int(rng.integers(0, min(4, n) + 1))
        edge = tuple(int(v) for v in rng.choice(n, size=size, replace=False))
        h.add_edge(edge, multiplicity=int(rng.integers(1, 3)))
    return h


def tv_distance(counts_a: Counter, total_a: int, counts_b: Counter, total_b: int) -> float:
    keys = set(counts_a) | set(counts_b)
    return 0.5 * sum(abs(counts_a[k] / total_a - counts_b[k] / total_b) for k in keys)


def central_difference(fn, t: float, h: float = 1e-5):
    """Componentwise central difference of a vector-valued function of t."""
    return (np.asarray(fn(t + h)) - np.asarray(fn(t - h))) / (2.0 * h)


def piecewise_quad(fn, a: float, b: float, pieces: int = 10) -> float:
    """Adaptive quadrature on `pieces` subintervals summed, for near
    machine-precision totals on smooth but steep integrands."""
    edges = np.linspace(a, b, pieces + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, _ = quad(fn, lo, hi, epsabs=1e-13, epsrel=1e-13, limit=200)
        total += val
    return total


def edges_inside(h: Hypergraph, vertex_set: set[int]) -> int:
    """Number of non-empty edge instances entirely inside vertex_set."""
    return sum(m for e, m in h.edge_counts().items()
               if e and set(e).issubset(vertex_set))
