import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special

from levymoments.moments import (
    MomentEstimate,
    classify_finiteness,
    k_series,
    levy_abs_moment_exact,
    levy_neg_moment_upper,
    sub_exp_neg_moment_exact,
    sub_neg_moment_exact,
    sub_pos_moment_exact,
)
from levymoments.montecarlo import (
    empirical_moment,
    exp_functional,
    power_functional,
    sample_gamma_process,
    sample_stable_subordinator,
)
from levymoments.processes import BernsteinFunction, CharacteristicExponent, LevyTriplet

GAMMA = BernsteinFunction.gamma(1.0, 1.0)
HALF = BernsteinFunction.stable(0.5)


def test_estimate_invariants():
    with pytest.raises(ValueError):
        MomentEstimate(-1.0)
    with pytest.raises(ValueError):
        MomentEstimate(math.inf)
    with pytest.raises(ValueError):
        MomentEstimate(1.0, method="guess")
    inf = MomentEstimate.infinite("tail diverges")
    assert not inf.finite and inf.value == math.inf
    assert MomentEstimate.undecided("budget").status == "undecided"


def test_neg_moment_examples():
    r = sub_neg_moment_exact(BernsteinFunction.drift(2.0), 0.5, 1.0)
    np.testing.assert_allclose(r.value, 2 ** -0.5)
    r = sub_neg_moment_exact(HALF, 0.25, 1.0)
    np.testing.assert_allclose(r.value, special.gamma(0.5) / (0.5 * special.gamma(0.25)),
                               rtol=1e-8)
    r = sub_neg_moment_exact(GAMMA, 0.5, 2.0)
    np.testing.assert_allclose(r.value, special.gamma(1.5), rtol=1e-8)


def test_neg_moment_gamma_divergent_small_t():
    # Gamma(t) law: E S_t^{-k} is infinite for t <= k
    r = sub_neg_moment_exact(GAMMA, 0.5, 0.25)
    assert r.value == math.inf and r.certificate


def test_neg_moment_compound_poisson_infinite():
    r = sub_neg_moment_exact(BernsteinFunction.compound_poisson(1.0, [1.0]), 0.5, 1.0)
    assert r.value == math.inf


@pytest.mark.parametrize("alpha,kappa", [(0.5, 0.25), (0.3, 0.6), (0.8, 1.5)])
def test_stable_neg_moment_scaling(alpha, kappa):
    phi = BernsteinFunction.stable(alpha)
    vals = [sub_neg_moment_exact(phi, kappa, t).value * t ** (kappa / alpha)
            for t in (1e-2, 1.0, 1e2)]
    exact = special.gamma(kappa / alpha) / (alpha * special.gamma(kappa))
    np.testing.assert_allclose(vals, exact, rtol=1e-6)


def test_neg_moment_decreasing_in_t():
    ts = np.logspace(-1, 2, 9)
    for phi in (HALF, GAMMA, BernsteinFunction.truncated_stable(0.6)):
        vals = [sub_neg_moment_exact(phi, 0.05, t).value for t in ts]
        assert np.all(np.diff(vals) < 0)


@pytest.mark.parametrize("t,kappa", [(0.5, 0.5), (2.0, 0.25), (10.0, 0.75)])
def test_gamma_positive_moment_closed_form(t, kappa):
    r = sub_pos_moment_exact(GAMMA, kappa, t)
    np.testing.assert_allclose(r.value, special.gamma(t + kappa) / special.gamma(t), rtol=1e-7)


def test_positive_moment_first_moment_and_stable():
    np.testing.assert_allclose(sub_pos_moment_exact(GAMMA, 1.0, 3.0).value, 3.0)
    assert sub_pos_moment_exact(HALF, 0.6, 1.0).value == math.inf
    with pytest.raises(ValueError):
        sub_pos_moment_exact(HALF, 1.5, 1.0)


def test_gamma_moment_against_monte_carlo():
    for t, kappa in ((0.5, 0.5), (2.0, 0.25)):
        exact = sub_pos_moment_exact(GAMMA, kappa, t).value
        mc = empirical_moment(sample_gamma_process(1.0, 1.0, t, 200_000, seed=4),
                              power_functional(kappa))
        assert abs(mc.mean - exact) <= 3 * mc.std_error


def test_k_series_first_term():
    u = np.array([0.5, 2.0])
    # lam^1 u^{k-1} / Gamma(k) dominates for tiny lam
    np.testing.assert_allclose(k_series(u, 0.5, 1e-8), 1e-8 * u ** -0.5 / special.gamma(0.5),
                               rtol=1e-6)


def test_exp_neg_examples():
    r = sub_exp_neg_moment_exact(BernsteinFunction.drift(1.0), 1.0, 1.0, 2.0)
    np.testing.assert_allclose(r.value, math.exp(0.5))
    r = sub_exp_neg_moment_exact(GAMMA, 0.5, 1.0, 1.0)
    assert r.value == math.inf and "sigma_inf" in r.certificate


def test_exp_neg_stable_against_monte_carlo():
    r = sub_exp_neg_moment_exact(HALF, 0.25, 0.1, 1.0)
    assert r.finite
    mc = empirical_moment(sample_stable_subordinator(0.5, 1.0, 200_000, seed=9),
                          exp_functional(-0.25, 0.1))
    assert abs(mc.mean - r.value) <= 3 * math.hypot(mc.std_error, r.abs_error)


def test_exp_neg_numerical_route_certifies_gamma():
    r = sub_exp_neg_moment_exact(GAMMA, 0.5, 1.0, 1.0, use_criterion=False)
    assert r.value == math.inf
    assert r.certificate.startswith("numerical")


def test_exp_neg_series_matches_drift_closed_form():
    # drift route bypasses the series; a tiny stable part must give almost the same value
    phi = BernsteinFunction.drift(1.0) + BernsteinFunction.stable(0.5, 1e-6)
    r = sub_exp_neg_moment_exact(phi, 0.5, 0.5, 1.0, use_criterion=False)
    np.testing.assert_allclose(r.value, math.exp(0.5), rtol=1e-4)


def test_abs_moment_brownian():
    r = levy_abs_moment_exact(LevyTriplet.brownian(1).symbol(), 1, 1.0, 1.0)
    np.testing.assert_allclose(r.value, math.sqrt(2 / math.pi), rtol=1e-7)


@pytest.mark.parametrize("kappa", [0.3, 0.75, 1.4])
def test_abs_moment_brownian_general_kappa(kappa):
    r = levy_abs_moment_exact(LevyTriplet.brownian(1).symbol(), 1, kappa, 2.0)
    exact = 2 ** (kappa / 2) * special.gamma((kappa + 1) / 2) / math.sqrt(math.pi) * 2 ** (kappa / 2)
    np.testing.assert_allclose(r.value, exact, rtol=1e-6)


def test_abs_moment_stable_scaling():
    psi = LevyTriplet.symmetric_stable(1.5).symbol()
    v1 = levy_abs_moment_exact(psi, 1, 0.75, 1.0).value
    v4 = levy_abs_moment_exact(psi, 1, 0.75, 4.0).value
    np.testing.assert_allclose(v4, 2 * v1, rtol=1e-4)


def test_abs_moment_stable_closed_form():
    # E|X_1|^k = 2^k Gamma((1+k)/2) Gamma(1-k/a) / (sqrt(pi) Gamma(1-k/2)) for psi = |xi|^a
    a, k = 1.5, 0.75
    exact = (2 ** k * special.gamma((1 + k) / 2) * special.gamma(1 - k / a)
             / (math.sqrt(math.pi) * special.gamma(1 - k / 2)))
    r = levy_abs_moment_exact(LevyTriplet.symmetric_stable(a).symbol(), 1, k, 1.0)
    np.testing.assert_allclose(r.value, exact, rtol=1e-6)


def test_abs_moment_zero_symbol():
    psi = CharacteristicExponent(lambda r: np.zeros_like(np.asarray(r, dtype=complex)), d=1,
                                 radial=True, name="zero")
    assert levy_abs_moment_exact(psi, 1, 0.5, 3.0).value == 0.0


def test_abs_moment_3d_brownian():
    # E|B_1| in R^3 = 2 sqrt(2/pi)
    r = levy_abs_moment_exact(LevyTriplet.brownian(3).symbol(), 3, 1.0, 1.0)
    np.testing.assert_allclose(r.value, 2 * math.sqrt(2 / math.pi), rtol=1e-6)


def test_neg_moment_upper_brownian_2d():
    r = levy_neg_moment_upper(LevyTriplet.brownian(2).symbol(), 2, 1.0, 1.0)
    assert r.method == "bound"
    assert r.value >= math.sqrt(math.pi / 2) * (1 - 1e-8)


def test_neg_moment_upper_stable_slope():
    psi = LevyTriplet.symmetric_stable(1.5).symbol()
    ts = np.logspace(-2, 2, 5)
    vals = [levy_neg_moment_upper(psi, 1, 0.5, t).value for t in ts]
    slope = np.polyfit(np.log(ts), np.log(vals), 1)[0]
    np.testing.assert_allclose(slope, -1 / 3, atol=1e-6)


def test_neg_moment_upper_real_symbol_is_exact_for_brownian_1d():
    # symmetric 1-d Gaussian: E|B_1|^{-1/2} = 2^{-1/4} Gamma(1/4) / sqrt(pi)
    r = levy_neg_moment_upper(LevyTriplet.brownian(1).symbol(), 1, 0.5, 1.0)
    exact = 2 ** -0.25 * special.gamma(0.25) / math.sqrt(math.pi)
    np.testing.assert_allclose(r.value, exact, rtol=1e-6)


def test_classify_examples():
    st15 = LevyTriplet.symmetric_stable(1.5)
    dec = classify_finiteness(st15, "exp_abs", 1.0, lam=1.0)
    assert dec.status == "infinite" and dec.criterion == "tail-exp-moment"
    dec = classify_finiteness(GAMMA, "exp_abs", 1.5, lam=1.0)
    assert dec.status == "infinite" and dec.criterion == "superlinear-exp-moment"
    dec = classify_finiteness(LevyTriplet.brownian(1), "neg", 1.0)
    assert dec.status == "infinite" and dec.criterion == "real-symbol-negative-moment"
    dec = classify_finiteness(GAMMA, "exp_neg", 0.5, lam=1.0)
    assert dec.status == "infinite" and dec.criterion == "slow-laplace-exponent"
    dec = classify_finiteness(LevyTriplet.brownian(1), "exp_neg", 0.5, lam=1.0)
    assert dec.status == "infinite"


def test_classify_finite_cases():
    assert classify_finiteness(GAMMA, "abs", 1.0).status == "finite"
    assert classify_finiteness(HALF, "abs", 0.75).status == "infinite"
    assert classify_finiteness(HALF, "exp_neg", 0.25, lam=0.1).status == "finite"
    assert classify_finiteness(HALF, "neg", 2.0).status == "finite"
    assert classify_finiteness(GAMMA, "exp_abs", 1.0, lam=0.5).status == "finite"
    assert classify_finiteness(GAMMA, "exp_abs", 1.0, lam=2.0).status == "infinite"


def test_classify_validation():
    with pytest.raises(ValueError):
        classify_finiteness(GAMMA, "sideways", 1.0)
    with pytest.raises(ValueError):
        classify_finiteness(GAMMA, "exp_neg", 1.0)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.2, 0.9), st.floats(0.1, 1.0), st.floats(0.05, 20.0))
def test_stable_neg_moment_closed_form_property(alpha, kappa, t):
    r = sub_neg_moment_exact(BernsteinFunction.stable(alpha), kappa, t)
    exact = special.gamma(kappa / alpha) / (alpha * special.gamma(kappa)) * t ** (-kappa / alpha)
    np.testing.assert_allclose(r.value, exact, rtol=1e-7)
