import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import integrate, special

from levymoments.bounds import (
    GrowthWitness,
    WitnessError,
    bound_abs_moment_bv,
    bound_abs_moment_small_time,
    bound_abs_moment_symbol,
    bound_exp_abs_moment,
    bound_exp_abs_moment_bv,
    bound_neg_moment_symbol,
    bound_sub_exp_neg_moment,
    bound_sub_exp_pos_no_big_jumps,
    bound_sub_neg_moment,
    bound_sub_pos_moment_symbol,
    exact_witness,
    lower_witness,
    sub_exp_neg_terms,
    tuned_lower_witness,
)
from levymoments.moments import (
    levy_abs_moment_exact,
    sub_exp_neg_moment_exact,
    sub_neg_moment_exact,
    sub_pos_moment_exact,
)
from levymoments.montecarlo import (
    empirical_moment,
    power_functional,
    sample_stable_subordinator,
    sample_subordinate_brownian,
)
from levymoments.numerics import riesz_c
from levymoments.processes import (
    BernsteinFunction,
    LevyTriplet,
    atom_measure,
    zero_measure,
)
from levymoments.verify import gamma_bv_ratio

GAMMA = BernsteinFunction.gamma(1.0, 1.0)
HALF = BernsteinFunction.stable(0.5)


def drift_triplet(ell):
    ell = np.atleast_1d(np.asarray(ell, dtype=float))
    d = len(ell)
    return LevyTriplet(ell=ell, Q=np.zeros((d, d)), nu=zero_measure(d), d=d)


def atom_triplet(y, mass, ell=0.0):
    return LevyTriplet(ell=np.array([ell]), Q=np.zeros((1, 1)), nu=atom_measure([y], [mass]), d=1)


def test_witness_validation():
    with pytest.raises(WitnessError):
        GrowthWitness(0.0, 1.0, 0.5)
    with pytest.raises(WitnessError):
        GrowthWitness(1.0, -1.0, 0.5)
    with pytest.raises(WitnessError):
        lower_witness(GAMMA, 0.4)
    w = lower_witness(HALF, 0.4)
    u = np.logspace(3, 6, 50)
    assert np.all(HALF.phi(u) >= w.C1 * u ** 0.4 * (1 - 1e-12))


def test_small_time_examples():
    np.testing.assert_allclose(bound_abs_moment_small_time(drift_triplet([1.0, 0.0]), 0.5, 4.0),
                               2.0)
    np.testing.assert_allclose(bound_abs_moment_small_time(atom_triplet(2.0, 1.0), 1.0, 1.0), 2.0)


def test_small_time_dominates_gamma():
    for t in (0.01, 1.0, 10.0):
        b = bound_abs_moment_small_time(GAMMA, 0.5, t)
        assert b >= sub_pos_moment_exact(GAMMA, 0.5, t).value


def test_small_time_large_t_linear():
    ts = np.logspace(0, 3, 13)
    ratio = np.array([bound_abs_moment_small_time(GAMMA, 0.5, t) / t for t in ts])
    assert np.all(np.isfinite(ratio))
    assert np.all(np.diff(ratio) <= 1e-12)


def test_small_time_divergent_tail():
    assert bound_abs_moment_small_time(HALF, 0.75, 1.0) == math.inf


def test_bv_examples():
    np.testing.assert_allclose(bound_abs_moment_bv(drift_triplet([3.0]), 0.5, 2.0),
                               math.sqrt(6.0), rtol=1e-10)
    # kappa = 1 collapses the theta interval
    np.testing.assert_allclose(bound_abs_moment_bv(GAMMA, 1.0, 2.5), 2.5, rtol=1e-8)


@pytest.mark.parametrize("t", [1e-3, 1e3])
def test_gamma_sharpness(t):
    r = gamma_bv_ratio(t)
    assert 1.0 <= r <= 1.05


def test_bv_dominates_gamma():
    for t in np.logspace(-2, 2, 5):
        assert bound_abs_moment_bv(GAMMA, 0.5, t) >= sub_pos_moment_exact(GAMMA, 0.5, t).value


def test_symbol_bound_stable():
    psi = LevyTriplet.symmetric_stable(1.5).symbol()
    tb = bound_abs_moment_symbol(psi, 1, 0.75, 1.5, GrowthWitness(1.0, math.inf, 1.5, "to-zero",
                                                                  "upper", "analytic"))
    np.testing.assert_allclose(tb(1.0), 8 * riesz_c(0.75, 1), rtol=1e-12)
    np.testing.assert_allclose(tb(4.0) / tb(1.0), 4 ** 0.5, rtol=1e-12)
    assert tb(1.0) >= levy_abs_moment_exact(psi, 1, 0.75, 1.0).value
    with pytest.raises(ValueError):
        bound_abs_moment_symbol(psi, 1, 1.5, 1.5)


def test_symbol_bound_grid_witness_dominates():
    psi = LevyTriplet.symmetric_stable(1.5).symbol()
    tb = bound_abs_moment_symbol(psi, 1, 0.75, 1.5)
    for t in (0.1, 1.0, 10.0):
        assert tb(t) >= levy_abs_moment_exact(psi, 1, 0.75, t).value


def test_sub_pos_symbol_dominates_mc():
    tb = bound_sub_pos_moment_symbol(HALF, 0.25, 0.5)
    for t in (0.1, 1.0, 10.0):
        mc = empirical_moment(sample_stable_subordinator(0.5, t, 100_000, seed=2),
                              power_functional(0.25))
        assert tb(t) >= mc.mean - 3 * mc.std_error
    # S is increasing: the bound is flat below t = 1
    np.testing.assert_allclose(tb(0.1), tb(1.0))


def test_neg_symbol_pure_power():
    w = exact_witness(0.5, 2.0)
    b = bound_neg_moment_symbol(LevyTriplet.brownian(2).symbol(), 2, 1.0, w)
    ts = np.logspace(-2, 2, 9)
    vals = b(ts)
    np.testing.assert_allclose(np.polyfit(np.log(ts), np.log(vals), 1)[0], -0.5, atol=1e-10)
    assert np.all(vals >= np.sqrt(math.pi / (2 * ts)) * (1 - 1e-12))


def test_neg_symbol_stable_dominates_mc():
    psi = LevyTriplet.symmetric_stable(1.5).symbol()
    b = bound_neg_moment_symbol(psi, 1, 0.5, exact_witness(1.0, 1.5))
    mc = empirical_moment(sample_subordinate_brownian(1.5, 1, 1.0, 200_000, seed=3),
                          power_functional(-0.5))
    assert b(1.0) >= mc.mean - 3 * mc.std_error


def test_exp_abs_zero_process():
    np.testing.assert_allclose(bound_exp_abs_moment(drift_triplet([0.0]), 0.5, 1.0, 2.0), 1.0)


@pytest.mark.parametrize("t", [0.1, 1.0, 10.0])
def test_exp_abs_poisson(t):
    eta, lam = 1.5, 0.5
    tr = atom_triplet(1.0, eta)
    exact = math.exp(eta * t * (math.exp(lam) - 1))
    assert bound_exp_abs_moment(tr, 1.0, lam, t) >= exact * (1 - 1e-12)
    np.testing.assert_allclose(bound_exp_abs_moment_bv(tr, 1.0, lam, t), exact, rtol=1e-10)


def test_exp_abs_bv_examples():
    np.testing.assert_allclose(bound_exp_abs_moment_bv(drift_triplet([2.0]), 0.5, 1.0, 4.0),
                               math.exp(2 * math.sqrt(2)), rtol=1e-10)
    for t in (0.5, 1.0, 3.0):
        np.testing.assert_allclose(bound_exp_abs_moment_bv(GAMMA, 1.0, 0.5, t), 2 ** t, rtol=1e-8)


def test_exp_abs_gamma_dominates_mgf():
    for t in (0.1, 1.0, 10.0):
        exact = (1 - 0.25) ** (-t)
        assert bound_exp_abs_moment(GAMMA, 1.0, 0.25, t) >= exact


def test_exp_abs_divergent():
    assert bound_exp_abs_moment_bv(GAMMA, 1.0, 2.0, 1.0) == math.inf


def test_no_big_jumps_examples():
    np.testing.assert_allclose(
        bound_sub_exp_pos_no_big_jumps(BernsteinFunction.drift(1.0), 0.5, 2.0, 3.0), math.exp(8))
    inner = integrate.quad(lambda x: math.expm1(x) * x ** -1.5, 0, 1)[0]
    series = sum(1 / (math.factorial(n) * (n - 0.5)) for n in range(1, 40))
    np.testing.assert_allclose(inner, series, rtol=1e-8)
    ts = BernsteinFunction.truncated_stable(0.5, 1.0)
    c = ts.params.get("c", 1.0)
    np.testing.assert_allclose(bound_sub_exp_pos_no_big_jumps(ts, 0.5, 1.0, 1.0),
                               math.exp(1 + c * series), rtol=1e-8)
    assert bound_sub_exp_pos_no_big_jumps(ts, 0.5, 1e-9, 1.0) == pytest.approx(1.0, abs=1e-8)


def test_no_big_jumps_rejects_big_jumps():
    with pytest.raises(ValueError):
        bound_sub_exp_pos_no_big_jumps(GAMMA, 0.5, 1.0, 1.0)


def test_sub_neg_stable_tight():
    b = bound_sub_neg_moment(HALF, 0.25, exact_witness(1.0, 0.5), 1.0)
    np.testing.assert_allclose(b, sub_neg_moment_exact(HALF, 0.25, 1.0).value, rtol=1e-8)
    np.testing.assert_allclose(b, special.gamma(0.5) / (0.5 * special.gamma(0.25)), rtol=1e-12)
    ts = np.array([0.01, 1.0, 100.0])
    np.testing.assert_allclose(bound_sub_neg_moment(HALF, 0.25, exact_witness(1.0, 0.5), ts),
                               b * ts ** -0.5, rtol=1e-12)


def test_sub_neg_gamma_witness_refused():
    with pytest.raises(WitnessError):
        lower_witness(GAMMA, 0.4)
    assert sub_neg_moment_exact(GAMMA, 0.5, 0.1).value == math.inf


def test_sub_neg_grid_witness_dominates():
    phi = BernsteinFunction.stable(0.5) + BernsteinFunction.gamma(1.0, 1.0)
    for t in (0.01, 0.1, 1.0):
        w = tuned_lower_witness(phi, 0.45, lambda w, t=t: bound_sub_neg_moment(phi, 0.3, w, t))
        assert bound_sub_neg_moment(phi, 0.3, w, t) >= sub_neg_moment_exact(phi, 0.3, t).value


def test_exp_neg_no_threshold_term():
    led = sub_exp_neg_terms(0.25, 0.1, exact_witness(1.0, 0.5), 1.0)
    assert led.G == 0.0
    np.testing.assert_allclose(led.log_value, led.eps * (2 * led.H) ** (1 / led.eps)
                               + led.coef_H * led.H)


def test_exp_neg_dominates_exact():
    w = exact_witness(1.0, 0.5)
    for t in (0.1, 1.0, 10.0):
        exact = sub_exp_neg_moment_exact(HALF, 0.25, 0.1, t).value
        assert bound_sub_exp_neg_moment(HALF, 0.25, 0.1, w, t) >= exact


def test_exp_neg_small_time_exponent():
    ts = np.logspace(-4, -2, 9)
    logs = bound_sub_exp_neg_moment(HALF, 0.25, 0.1, exact_witness(1.0, 0.5), ts, log=True)
    slope = np.polyfit(np.log(1 / ts), np.log(logs), 1)[0]
    assert slope <= 0.25 / (0.5 - 0.5 * 0.25) + 0.05


def test_exp_neg_precondition():
    with pytest.raises(ValueError):
        sub_exp_neg_terms(1.0, 0.1, exact_witness(1.0, 0.4), 1.0)


@settings(max_examples=20, deadline=None)
@given(st.floats(0.05, 0.5), st.floats(0.05, 0.5), st.floats(0.01, 10.0))
def test_exp_neg_monotone_in_lambda(kappa, lam, t):
    w = exact_witness(1.0, 0.9)
    lo = bound_sub_exp_neg_moment(None, kappa, lam, w, t, log=True)
    hi = bound_sub_exp_neg_moment(None, kappa, 1.5 * lam, w, t, log=True)
    assert hi >= lo


@settings(max_examples=20, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.05, 1.0), st.floats(0.01, 10.0))
def test_exp_abs_monotone_in_lambda(kappa, lam, t):
    assert (bound_exp_abs_moment(GAMMA, kappa, 0.5 * lam, t)
            <= bound_exp_abs_moment(GAMMA, kappa, 0.9 * lam, t) * (1 + 1e-12))
