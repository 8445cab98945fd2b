import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from levymoments.harnack import (
    HarnackProfile,
    HypothesisError,
    coupling_integral,
    sde_harnack_profile,
    subordinate_log_harnack,
    subordinate_power_harnack,
)
from levymoments.processes import BernsteinFunction

GAMMA = BernsteinFunction.gamma(1.0, 1.0)
HALF = BernsteinFunction.stable(0.5)


def test_profile_validation():
    with pytest.raises(ValueError):
        HarnackProfile.log(0.0, 0.5, 1, 1, 1)
    with pytest.raises(ValueError):
        HarnackProfile.log(1.0, 1.5, 1, 1, 1)
    with pytest.raises(ValueError):
        HarnackProfile.log(1.0, 0.5, -1, 1, 1)
    with pytest.raises(ValueError):
        HarnackProfile.power(1.0, 0.5, 1, 1, 1, 1.0)
    prof = HarnackProfile.log(1.0, 0.5, 2.0, 3.0, 1.0)
    np.testing.assert_allclose(prof(4.0), 2 / 4 + 3 * 2 + 1)


def test_degenerate_log_profile():
    prof = HarnackProfile.log(1.0, 0.5, 0.0, 0.0, 5.0)
    for phi in (HALF, GAMMA):
        res = subordinate_log_harnack(prof, phi, np.array([0.01, 1.0, 100.0]))
        np.testing.assert_allclose(res.value, 5.0)


def test_log_case_a_stable():
    prof = HarnackProfile.log(1.0, 0.25, 1.0, 1.0, 1.0)
    res = subordinate_log_harnack(prof, HALF, 1.0, case="a", exact=True)
    assert res.case_used == "a"
    np.testing.assert_allclose(res.constants["rho"]["value"], 0.45, atol=0.01)
    expected = (res.constants["C_kappa1_rho"]["value"] + res.constants["C_kappa2"]["value"] + 1)
    np.testing.assert_allclose(res.bound_value, expected)
    assert res.exact_value <= res.bound_value
    assert res.route == "exact"


def test_log_case_a_needs_h2():
    prof = HarnackProfile.log(1.0, 0.5, 1.0, 1.0, 1.0)
    with pytest.raises(HypothesisError) as exc:
        subordinate_log_harnack(prof, HALF, 1.0, case="a")
    assert "H2" in str(exc.value)


def test_log_gamma_fails_h1():
    prof = HarnackProfile.log(1.0, 0.5, 1.0, 1.0, 1.0)
    with pytest.raises(HypothesisError) as exc:
        subordinate_log_harnack(prof, GAMMA, 1.0)
    assert exc.value.failed == ["H1"]


def test_log_case_c_growth_gamma():
    prof = HarnackProfile.log(1.0, 0.5, 0.0, 1.0, 1.0)
    ts = np.logspace(1, 3, 9)
    res = subordinate_log_harnack(prof, GAMMA, ts, case="c", sigma=0.9)
    assert res.case_used == "c"
    slope = np.polyfit(np.log(ts), np.log(np.asarray(res.value) - 1.0), 1)[0]
    np.testing.assert_allclose(slope, 0.5 / 0.9, atol=1e-6)


def test_log_auto_prefers_c():
    prof = HarnackProfile.log(1.0, 0.25, 1.0, 1.0, 0.0)
    res = subordinate_log_harnack(prof, HALF, 2.0)
    assert res.case_used == "c"


def test_log_case_a_structure():
    prof = HarnackProfile.log(1.0, 0.25, 1.0, 1.0, 2.0)
    small = np.logspace(-3, 0, 7)
    big = np.logspace(0, 3, 7)
    vs = np.asarray(subordinate_log_harnack(prof, HALF, small, case="a").value) - 2.0
    vb = np.asarray(subordinate_log_harnack(prof, HALF, big, case="a").value) - 2.0
    assert np.all(np.diff(vs) <= 1e-12)
    assert np.all(np.diff(vb) >= -1e-12)


@pytest.mark.parametrize("t", [0.05, 1.0, 20.0])
def test_exact_route_below_bound(t):
    prof = HarnackProfile.log(0.5, 0.25, 1.0, 2.0, 0.5)
    res = subordinate_log_harnack(prof, BernsteinFunction.stable(0.6), t, exact=True)
    assert res.exact_value <= res.bound_value


def test_power_degenerate():
    prof = HarnackProfile.power(1.0, 0.5, 0.0, 0.0, 2.0, 2.0)
    res = subordinate_power_harnack(prof, HALF, 2.0, np.array([0.01, 1.0, 10.0]))
    np.testing.assert_allclose(res.value, 2.0)


def test_power_stable_small_time_exponent():
    phi = BernsteinFunction.stable(0.75)
    prof = HarnackProfile.power(1.0, 0.5, 1.0, 0.0, 1.0, 2.0)
    res = subordinate_power_harnack(prof, phi, 2.0, 1.0)
    assert math.isfinite(res.value)
    np.testing.assert_allclose(res.constants["rho"]["value"], 0.675, atol=0.01)
    rho = res.constants["rho"]["value"]
    ts = np.logspace(-4, -2, 9)
    vals = np.asarray(subordinate_power_harnack(prof, phi, 2.0, ts).value) - 1.0
    slope = np.polyfit(np.log(1 / ts), np.log(vals), 1)[0]
    assert slope <= 1.0 / (rho - (1 - rho) * 1.0) + 0.05
    # power Harnack costs more than log Harnack at small t
    assert res.constants["small_t_exponent"]["value"] > \
        res.constants["log_harnack_small_t_exponent"]["value"]


def test_power_stable_exp_tail_condition():
    prof = HarnackProfile.power(1.0, 0.5, 1.0, 1.0, 1.0, 2.0)
    with pytest.raises(HypothesisError) as exc:
        subordinate_power_harnack(prof, BernsteinFunction.stable(0.75), 2.0, 1.0)
    assert "exp-tail" in exc.value.failed


def test_power_truncated_stable_full_profile():
    prof = HarnackProfile.power(1.0, 0.5, 1.0, 1.0, 1.0, 2.0)
    res = subordinate_power_harnack(prof, BernsteinFunction.truncated_stable(0.8), 2.0, 1.0)
    assert math.isfinite(res.value) and res.value > 1.0
    assert res.hypotheses["exp_tail_integrable"]
    assert res.hypotheses["exp_pos_route"] in ("exp-moment-eps", "exp-moment-bv", "no-big-jumps")


def test_power_gamma_no_rho():
    prof = HarnackProfile.power(1.0, 0.5, 1.0, 1.0, 1.0, 2.0)
    with pytest.raises(HypothesisError) as exc:
        subordinate_power_harnack(prof, GAMMA, 2.0, 1.0)
    assert exc.value.failed == ["H1"]


def test_coupling_integral_brownian():
    ts = np.array([0.1, 1.0, 10.0])
    np.testing.assert_allclose(coupling_integral(lambda r: 1.0, lambda r: 0.0, ts), 1 / ts,
                               rtol=1e-10)
    res = sde_harnack_profile(lambda r: 1.0, lambda r: 0.0, 0.5, t=2.0)
    np.testing.assert_allclose(res.log_exponent, 0.25 / (2 * 2.0), rtol=1e-10)


def test_coupling_integral_ou():
    # K = 1: int_0^t (r + 1)^2 dr = ((t+1)^3 - 1)/3
    t = 1.0
    np.testing.assert_allclose(coupling_integral(lambda r: 1.0, lambda r: 1.0, t), 7 / 3,
                               rtol=1e-10)
    res = sde_harnack_profile(lambda r: 1.0, lambda r: 1.0, 0.5, t=1.0, p=2.0)
    np.testing.assert_allclose(res.log_exponent, 0.25 * 7 / 6, rtol=1e-10)
    np.testing.assert_allclose(res.power_exponent, 2 * 0.25 * 7 / 6, rtol=1e-10)


def test_sde_profile_examples():
    res = sde_harnack_profile(lambda r: 1.0, lambda r: min(r ** -0.5, 1.0), 1.0,
                              kappa1=1.0, kappa2=0.5)
    assert math.isfinite(res.C) and res.C > 0
    res = sde_harnack_profile(lambda r: r ** -0.25, lambda r: max(1.0, math.log(r)), 1.0,
                              kappa1=1.5, kappa2=1.0)
    assert math.isfinite(res.con4_proxy)


def test_sde_profile_con4_violation():
    with pytest.raises(ValueError, match="con4"):
        sde_harnack_profile(lambda r: r ** -0.25, lambda r: 1.0, 1.0, kappa1=1.0, kappa2=1.0)


def test_sde_profile_con5_violation():
    with pytest.raises(ValueError, match="con5"):
        sde_harnack_profile(lambda r: 1.0, lambda r: 1.0, 1.0, kappa1=1.0, kappa2=0.5)


def test_sde_profile_dominates_exponent():
    res = sde_harnack_profile(lambda r: 1.0, lambda r: 1.0, 0.5, t=np.logspace(-3, 3, 7))
    assert np.all(res.profile(np.logspace(-3, 3, 7)) >= np.asarray(res.log_exponent) * (1 - 1e-12))


@settings(max_examples=15, deadline=None)
@given(st.floats(0.1, 2.0), st.floats(0.2, 0.95))
def test_power_exponent_identity(kappa1, rho):
    if rho <= kappa1 / (1 + kappa1):
        return
    assert kappa1 / (rho - (1 - rho) * kappa1) > kappa1 / rho
