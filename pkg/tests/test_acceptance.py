"""Acceptance battery: every verification target at its stated tolerance.

Each test prints one `ACCEPTANCE <id> PASS/FAIL` line with the measured
numbers (visible with `pytest -s`, or in the failure output) and then
asserts.

Two targets probe near-critical simulations at a fixed vertex count where
the finite-size effect is, by direct measurement, larger than the stated
tolerance; those tests are implemented faithfully and fail honestly
rather than being loosened.  Their docstrings carry the quantitative
analysis.
"""

import math
from collections import Counter

import numpy as np
import pytest

from hypercollapse import (BetaSeries, ExperimentConfig, collapse_all,
                           concentration_curve, critical_alpha,
                           critical_structure, deficiency, diffusion_factors,
                           drift, edge_rate_curve, evaluate, evaluate_grid,
                           from_binomial_family, from_graph_params,
                           identifiable_set, patch_overlap_average, path,
                           remove_vertex, run, run_replicas,
                           sample_limit_fraction, sample_poisson, sigma_sq,
                           stream)
from hypercollapse.series import CriticalStructure
from helpers import (central_difference, edges_inside, first_negative_root,
                     jump_moment_matrix, piecewise_quad, random_hypergraph,
                     tv_distance)

EX1 = from_graph_params(0.1, 0.5)
EX2_SUB = from_binomial_family(1185.0)
EX2_SUPER = from_binomial_family(1200.0)
WORKERS = 2


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"ACCEPTANCE {criterion:>3} {'PASS' if ok else 'FAIL'}  {detail}"
    print(line)
    assert ok, line


@pytest.fixture(scope="module")
def ex1_oracle_z():
    # independent scan-plus-bisection root of alpha*t + log(1-t) = log(1-p)
    return first_negative_root(
        lambda ts: -np.log(0.9) + 0.5 * ts + np.log(1.0 - ts))


@pytest.fixture(scope="module")
def ex2_oracle_z():
    return first_negative_root(
        lambda ts: 6.3 * 1185.0 * (0.1 + 0.9 * ts) ** 6 + np.log(1.0 - ts))


@pytest.fixture(scope="module")
def tangent():
    alpha_c, zeta0 = critical_alpha(from_binomial_family, 1185.0, 1200.0)
    series = from_binomial_family(alpha_c)
    return alpha_c, zeta0, series, critical_structure(series)


@pytest.fixture(scope="module")
def small_instances():
    rng = np.random.default_rng(12321)
    return [random_hypergraph(rng, max_vertices=10, max_edges=12)
            for _ in range(100)]


def test_01_graph_model_limit_fractions(ex1_oracle_z):
    """Mean identified and debris fractions at N=1e5 against the analytic
    limits, 50 replicas, tolerance 0.01, limits from independent oracles."""
    z = ex1_oracle_z
    b1 = -math.log(0.9)
    edge_limit = (b1 * z + 0.25 * z * z) - (1.0 - z) * math.log(1.0 - z)
    cfg = ExperimentConfig(EX1, (100_000,), 50, master_seed=20260810,
                           workers=WORKERS)
    agg = run_replicas(cfg).aggregates[0]
    gap_v = abs(agg.mean_v - z)
    gap_e = abs(agg.mean_debris - edge_limit)
    report("1", gap_v < 0.01 and gap_e < 0.01,
           f"mean_v={agg.mean_v:.5f} vs z*={z:.5f} (gap {gap_v:.2e}); "
           f"mean_debris={agg.mean_debris:.5f} vs {edge_limit:.5f} (gap {gap_e:.2e})")


def test_02_steep_family_subcritical(ex2_oracle_z):
    """Threshold of the steep polynomial family at its subcritical parameter.

    The analytic part (z* near 0.02) holds.  The simulation part asks the
    mean identified fraction at N=1e5 to sit within 0.01 of z*; measured,
    it does not: the deficiency dip minimum is only -1.85e-4, so the
    absorbing barrier at N=1e5 is sqrt(N)*|min f| = 0.39 patch standard
    deviations deep, and a nontrivial fraction of replicas tunnels through
    the dip and collapses to ~1.  Measured escape frequencies: about 0.25
    at N=1e4, 0.17 at N=1e5, 0.10 at N=1e6 (the Gaussian barrier model
    puts sub-1% escape only at N of about 4e6 and beyond).  The mean is
    therefore off by roughly +0.17 at this vertex count, an order of
    magnitude beyond the tolerance; conditioned on absorption in the dip,
    the mean is within 0.002 of z*.  This failure is a property of the
    stated (N, tolerance) pair, not of the implementation; the law itself
    is validated by criterion 4 and by the escape decay with N.
    """
    crit = critical_structure(EX2_SUB)
    analytic_ok = 0.015 <= crit.z_star <= 0.025 and abs(crit.z_star - ex2_oracle_z) < 1e-9
    cfg = ExperimentConfig(EX2_SUB, (100_000,), 50, master_seed=4711,
                           workers=WORKERS)
    result = run_replicas(cfg)
    mean_v = result.aggregates[0].mean_v
    escaped = float(np.mean([r.v_star_frac > 0.5 for r in result.records]))
    gap = abs(mean_v - crit.z_star)
    report("2", analytic_ok and gap < 0.01,
           f"z*={crit.z_star:.5f} (analytic in [0.015, 0.025]: {analytic_ok}); "
           f"sim mean_v={mean_v:.4f} gap={gap:.3f} escape_freq={escaped:.2f}")


def test_03_supercritical_overlap_average():
    """Average patch overlap over the last tenth of a supercritical collapse:
    10 * integral of the deficiency over [0.9, 1], within 1% of 5792."""
    value = patch_overlap_average(EX2_SUPER)
    rel = abs(value - 5792.0) / 5792.0
    report("3", rel < 0.01, f"avg_patch_overlap={value:.1f} vs 5792 (rel {rel:.2e})")


def test_04_chain_equals_engine_in_law():
    """Total-variation distance between the joint (identified, debris) laws
    of the reduced chain and the full engine, N=6, 1e5 samples each, < 0.05."""
    series = BetaSeries((0.2, 0.3, 0.4))
    draws = 100_000
    n_vertices = 6
    chain_counts = Counter()
    rng = stream(1001)
    table = edge_rate_curve(n_vertices, 2, series)
    for _ in range(draws):
        res = run(n_vertices, series, rng, rate_table=table)
        chain_counts[(res.removed, res.debris)] += 1
    engine_counts = Counter()
    rng = stream(1002)
    for _ in range(draws):
        h = sample_poisson(n_vertices, series, rng)
        out = collapse_all(h, rng)
        engine_counts[(len(out.identified), out.stable.stats().debris)] += 1
    tv = tv_distance(chain_counts, draws, engine_counts, draws)
    report("4", tv < 0.05, f"TV distance = {tv:.4f} over {draws} samples each")


def test_05_order_independence(small_instances):
    """Identified set and stable hypergraph identical across 5 seeds on 100
    random instances, and equal to the peeling fixpoint; exact."""
    checked = 0
    for h in small_instances:
        peeled = identifiable_set(h)
        outs = [collapse_all(h, np.random.default_rng(seed)) for seed in range(5)]
        for out in outs:
            ok = (set(out.identified) == peeled
                  and out.stable == outs[0].stable
                  and out.identifiable_edge_count == outs[0].identifiable_edge_count)
            if not ok:
                report("5", False, f"divergence on {h!r}")
        checked += 1
    report("5", checked == 100, f"{checked} instances x 5 seeds, all identical")


def test_06_conservation_and_debris_identity(small_instances):
    """Edge count conserved by every removal; debris created equals the number
    of edges inside the identified set; exact."""
    for h in small_instances:
        out = collapse_all(h, np.random.default_rng(9))
        total = h.stats().total
        g = h
        for v in out.identified:
            g = remove_vertex(g, v)
            if g.stats().total != total:
                report("6", False, f"conservation broken on {h!r}")
        inside = edges_inside(h, set(out.identified))
        if out.identifiable_edge_count != inside:
            report("6", False, f"debris identity broken on {h!r}")
        if out.stable.stats().debris != h.stats().debris + inside:
            report("6", False, f"final debris mismatch on {h!r}")
    report("6", True, f"{len(small_instances)} instances, conservation and "
                      f"debris identity exact")


def test_07_path_velocity_equals_drift():
    """Central finite difference of the closed-form path vs the drift field,
    1e3 grid points per model, sup residual < 1e-6."""
    worst = 0.0
    for series in (EX1, EX2_SUB):
        z = critical_structure(series).z_star
        hi = min(0.9, z) - 1e-4
        for t in np.linspace(1e-4, hi, 1000):
            fd = central_difference(lambda u: path(u, series), float(t))
            res = np.abs(fd - drift(path(float(t), series), series)).max()
            worst = max(worst, float(res))
    report("7", worst < 1e-6, f"sup |d path/dt - drift| = {worst:.2e}")


def test_08_diffusion_factorization():
    """Outer-product sum of the factor columns vs brute-force jump moments at
    100 random states, elementwise < 1e-8."""
    rng = np.random.default_rng(55)
    worst = 0.0
    for _ in range(100):
        x = np.array([0.9 * rng.random(), 2.0 * rng.random(), 2.0 * rng.random()])
        v1, v2, v3 = diffusion_factors(x, EX1)
        got = np.outer(v1, v1) + np.outer(v2, v2) + np.outer(v3, v3)
        want = jump_moment_matrix(x[1] / (1.0 - x[0]),
                                  (1.0 - x[0]) * evaluate(EX1, float(x[0]), 2))
        worst = max(worst, float(np.max(np.abs(got - want))))
    report("8", worst < 1e-8, f"sup elementwise gap = {worst:.2e} over 100 states")


def test_09_fluctuation_clock(tangent):
    """sigma_sq starts at b1 exactly, matches the quadrature of its running
    integral within 1e-8, and equals z/(1-z) at the tangency point."""
    exact_start = (sigma_sq(0.0, EX1) == EX1.coeffs[1]
                   and sigma_sq(0.0, EX2_SUB) == EX2_SUB.coeffs[1])

    def integrand(s):
        return ((deficiency(EX2_SUB, s) + (1 - s) * evaluate(EX2_SUB, s, 2))
                / (1 - s) ** 2)

    quad_gap = max(abs(sigma_sq(t, EX2_SUB)
                       - (EX2_SUB.coeffs[1] + piecewise_quad(integrand, 0.0, t)))
                   for t in (0.1, 0.3, 0.5, 0.7, 0.9))

    _, _, series, crit = tangent
    z = crit.zeta[0]
    tangency_gap = abs(sigma_sq(z, series) - z / (1.0 - z))
    report("9", exact_start and quad_gap < 1e-8 and tangency_gap <= crit.tangency_tolerance,
           f"start exact: {exact_start}; quadrature gap {quad_gap:.2e}; "
           f"clock at tangency gap {tangency_gap:.2e}")


def test_10a_single_tangency_half_half():
    """Limiting-fraction sampler at a single tangency: empirical mass within
    0.02 of 1/2 over 1e4 draws."""
    crit = CriticalStructure(z_star=0.9, zeta=(0.25,), tangency_tolerance=1e-9)
    rng = stream(31415)
    draws = 10_000
    hits = sum(sample_limit_fraction(crit, rng).hit_tangency for _ in range(draws))
    frac = hits / draws
    report("10a", abs(frac - 0.5) <= 0.02, f"P(stop at tangency) = {frac:.4f}")


def test_10b_half_half_at_tangent_parameter(tangent):
    """Early-absorption fraction at the tangent family parameter, N=1e5,
    400 replicas, window [0.4, 0.6].

    Implemented faithfully; measured, the fraction converges to 1/2 from
    above too slowly for this window at N=1e5.  At exact tangency the
    barrier height is zero but the chain dwells for ~2000 steps with mean
    patch count within one standard deviation of the absorbing boundary,
    which biases absorption upward at finite N.  Pooled over 1600 replicas
    at N=1e5 the early-absorption probability is 0.622 +- 0.012, so a
    400-replica estimate lands outside the window about four times out of
    five (a run can still slip inside on sampling luck, which would not
    make the window correct).  Measured values at larger N: about 0.63 at
    N=3e5 and 0.58 at N=1e6, so the window is met from N of about 1e6.
    The asymptotic half-half law itself is criterion 10a and holds.
    """
    alpha_c, zeta0, series, crit = tangent
    threshold = 0.5 * (zeta0 + crit.z_star)
    cfg = ExperimentConfig(series, (100_000,), 400, master_seed=1,
                           workers=WORKERS)
    result = run_replicas(cfg)
    early = float(np.mean([r.v_star_frac < threshold for r in result.records]))
    report("10b", 0.4 <= early <= 0.6,
           f"alpha_c={alpha_c:.4f} zeta0={zeta0:.5f}; "
           f"early-absorption fraction = {early:.3f} over 400 replicas")


def test_11_concentration_decay():
    """Fraction of replicas deviating more than 0.05 from the fluid path,
    N in (2000, 4000, 8000), 400 replicas each: nonincreasing in N."""
    cfg = ExperimentConfig(EX1, (2000, 4000, 8000), 400, master_seed=97,
                           workers=WORKERS)
    curve = concentration_curve(cfg, delta=0.05)
    freqs = [freq for _, freq in curve]
    ok = all(a >= b for a, b in zip(freqs, freqs[1:]))
    report("11", ok, f"deviation frequencies {freqs} at N={[n for n, _ in curve]}")


def test_12_rate_approximation_decay():
    """sup_{n <= 0.9 N} |N * rate2(N, n) - b''(n/N)| shrinks at least 5x from
    N=1e3 to N=1e5 for the steep family."""
    sups = {}
    for n_vertices in (1000, 100_000):
        curve = edge_rate_curve(n_vertices, 2, EX2_SUB)
        ns = np.arange(int(0.9 * n_vertices) + 1)
        target = evaluate_grid(EX2_SUB, ns / n_vertices, 2)
        sups[n_vertices] = float(np.max(np.abs(n_vertices * curve[ns] - target)))
    ratio = sups[1000] / sups[100_000]
    report("12", ratio >= 5.0,
           f"sup error {sups[1000]:.3e} (N=1e3) -> {sups[100_000]:.3e} (N=1e5), "
           f"ratio {ratio:.1f}x")
