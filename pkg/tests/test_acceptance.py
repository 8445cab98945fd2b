"""Acceptance criteria, each at its stated tolerance and runtime budget."""

import math
import time

import numpy as np

from levymoments.montecarlo import empirical_moment, power_functional, sample_subordinate_brownian
from levymoments.verify import (
    exp_neg_bound_slope,
    gamma_bv_ratio,
    stable_neg_scaling,
    suite_divergence,
    suite_domination,
    suite_harnack,
    suite_indices,
    suite_mc,
    symmetric_stable_ratio,
)


def _worst(rep):
    bad = rep.failures
    if bad:
        return f"{len(bad)}/{len(rep.rows)} failed, first: {bad[0].name} {bad[0].params}"
    rel = min(r.margin / max(abs(r.reference), 1.0) for r in rep.rows)
    return f"{len(rep.rows)} checks, min relative margin {rel:.3g}"


def test_criterion_1_gamma_sharpness(acceptance):
    t0 = time.perf_counter()
    ratios = {t: gamma_bv_ratio(t) for t in (1e-3, 1e3)}
    secs = time.perf_counter() - t0
    ok = all(1.0 <= r <= 1.05 for r in ratios.values()) and secs < 1.0
    detail = ", ".join(f"ratio(t={t:g})={r:.5f}" for t, r in ratios.items())
    assert acceptance(1, "Gamma thm3.1b sharpness", ok, detail, secs)


def test_criterion_2_stable_negative_moment(acceptance):
    t0 = time.perf_counter()
    vals = stable_neg_scaling((1e-2, 1.0, 1e2))
    secs = time.perf_counter() - t0
    ref = math.gamma(0.5) / (0.5 * math.gamma(0.25))
    spread = float(np.max(np.abs(vals / vals[1] - 1)))
    dev = abs(vals[1] / ref - 1)
    ok = spread <= 1e-6 and dev <= 1e-6 and secs < 1.0
    detail = f"value {vals[1]:.8f} vs {ref:.8f}, spread {spread:.2e}"
    assert acceptance(2, "stable E S_t^-0.25 t^0.5 constant", ok, detail, secs)


def test_criterion_3_symmetric_stable_scaling(acceptance):
    t0 = time.perf_counter()
    v1, v4 = symmetric_stable_ratio()
    dev = abs(v4 / (2 * v1) - 1)
    zs = []
    for t, v, seed in ((1.0, v1, 31), (4.0, v4, 32)):
        m = empirical_moment(sample_subordinate_brownian(1.5, 1, t, 1_000_000, seed=seed),
                             power_functional(0.75))
        zs.append(abs(m.mean - v) / m.std_error)
    secs = time.perf_counter() - t0
    ok = dev <= 1e-4 and max(zs) <= 3.0 and secs < 60.0
    detail = f"v4/(2 v1)-1 = {dev:.2e}, MC z-scores {zs[0]:.2f}, {zs[1]:.2f}"
    assert acceptance(3, "symmetric-stable scaling", ok, detail, secs)


def test_criterion_4_domination(acceptance):
    t0 = time.perf_counter()
    rep = suite_domination(n=100_000, seed=0)
    secs = time.perf_counter() - t0
    ok = rep.passed and secs < 300.0
    assert acceptance(4, "bound domination suite", ok, _worst(rep), secs)


def test_criterion_5_divergence(acceptance):
    t0 = time.perf_counter()
    rep = suite_divergence()
    secs = time.perf_counter() - t0
    ok = rep.passed and secs < 30.0
    assert acceptance(5, "divergence classifiers", ok, _worst(rep), secs)


def test_criterion_6_indices(acceptance):
    t0 = time.perf_counter()
    rep = suite_indices(seed=0, draws=100)
    secs = time.perf_counter() - t0
    ok = rep.passed and secs < 30.0
    assert acceptance(6, "index recovery and ordering", ok, _worst(rep), secs)


def test_criterion_7_exp_neg_exponent(acceptance):
    t0 = time.perf_counter()
    slope = exp_neg_bound_slope(0.25, 0.5, 0.1)
    secs = time.perf_counter() - t0
    limit = 0.25 / (0.5 - 0.5 * 0.25) + 0.05
    ok = slope <= limit and secs < 5.0
    assert acceptance(7, "thm3.6b small-t exponent", ok,
                      f"slope {slope:.4f} <= {limit:.4f}", secs)


def test_criterion_8_harnack_mc(acceptance):
    t0 = time.perf_counter()
    rep = suite_harnack(n=100_000, seed=0, seeds=20, n_steps=2048)
    secs = time.perf_counter() - t0
    ok = rep.passed and len(rep.rows) == 40 and secs < 300.0
    assert acceptance(8, "OU shift Harnack Monte Carlo", ok, _worst(rep), secs)


def test_criterion_9_exact_vs_mc(acceptance):
    t0 = time.perf_counter()
    rep = suite_mc(n=1_000_000, seed=0)
    secs = time.perf_counter() - t0
    ok = rep.passed and secs < 600.0
    worst_z = max(r.params["z"] for r in rep.rows)
    assert acceptance(9, "exact vs Monte Carlo", ok,
                      f"{_worst(rep)}, max z {worst_z:.2f}", secs)
