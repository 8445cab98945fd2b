import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import special, stats

from levymoments.montecarlo import (
    SampleBatch,
    atom_sampler,
    empirical_moment,
    exp_functional,
    kanter_factor,
    power_functional,
    sample_brownian,
    sample_compound_poisson,
    sample_gamma_process,
    sample_process,
    sample_stable_subordinator,
    sample_subordinate_brownian,
    simulate_sde_coupling,
    verify_shift_harnack,
)
from levymoments.processes import BernsteinFunction, LevyTriplet
from levymoments.verify import ou_exponents


def within(m, exact, k=3.0):
    return abs(m.mean - exact) <= k * m.std_error


@pytest.mark.parametrize("alpha", [0.3, 0.5, 0.999])
def test_stable_laplace_transform(alpha):
    b = sample_stable_subordinator(alpha, 1.0, 400_000, seed=1)
    assert np.all(b.values >= 0)
    assert within(empirical_moment(b, lambda x: np.exp(-x)), math.exp(-1))


def test_stable_self_similarity():
    alpha = 0.5
    t = 2.0
    a = sample_stable_subordinator(alpha, t, 20_000, seed=5).values
    b = sample_stable_subordinator(alpha, 1.0, 20_000, seed=6).values * t ** (1 / alpha)
    assert stats.ks_2samp(a, b).pvalue > 0.01


def test_kanter_factor_positive():
    u = np.linspace(1e-6, math.pi - 1e-6, 101)
    for alpha in (0.2, 0.5, 0.9):
        assert np.all(np.isfinite(kanter_factor(u, alpha)))


def test_gamma_mean_and_half_moment():
    b = sample_gamma_process(2.0, 3.0, 1.5, 200_000, seed=2)
    assert within(empirical_moment(b), 2.0 * 1.5 / 3.0)
    b = sample_gamma_process(1.0, 1.0, 1.0, 200_000, seed=3)
    assert within(empirical_moment(b, power_functional(0.5)), special.gamma(1.5))


def test_compound_poisson_mean():
    b = sample_compound_poisson(2.5, atom_sampler([1.0]), 2.0, 200_000, seed=4)
    assert within(empirical_moment(b), 5.0)
    assert np.all(b.values == np.round(b.values))


def test_subordinate_brownian_cauchy():
    b = sample_subordinate_brownian(1.0, 1, 1.0, 200_000, seed=7)
    x = b.values.ravel()
    ind = empirical_moment(x, lambda v: (np.abs(v) <= 1).astype(float))
    assert within(ind, 0.5)
    assert abs(np.median(x)) < 0.02


def test_subordinate_brownian_characteristic_function():
    b = sample_subordinate_brownian(1.5, 2, 1.0, 200_000, seed=8)
    xi = np.array([0.7, -0.3])
    m = empirical_moment(b.values, lambda v: np.cos(v @ xi))
    assert within(m, math.exp(-np.linalg.norm(xi) ** 1.5))


def test_stable_negative_moment():
    b = sample_stable_subordinator(0.5, 1.0, 400_000, seed=10)
    exact = special.gamma(0.5) / (0.5 * special.gamma(0.25))
    assert within(empirical_moment(b, power_functional(-0.25)), exact)


def test_constant_batch():
    m = empirical_moment(np.full(10, 3.0))
    assert m.mean == 3.0 and m.std_error == 0.0 and m.n == 10


def test_empirical_moment_needs_two():
    with pytest.raises(ValueError):
        empirical_moment(np.array([1.0]))


def test_infinite_functional_reports_evidence():
    vals = np.concatenate([np.zeros(3), np.ones(997)])
    m = empirical_moment(vals, power_functional(-1.0))
    assert m.mean == math.inf
    assert len(m.evidence) == 4


def test_reproducible():
    a = sample_stable_subordinator(0.4, 1.0, 70_000, seed=123).values
    b = sample_stable_subordinator(0.4, 1.0, 70_000, seed=123).values
    np.testing.assert_array_equal(a, b)
    c = sample_stable_subordinator(0.4, 1.0, 70_000, seed=124).values
    assert not np.array_equal(a, c)


def test_sample_process_dispatch():
    assert sample_process(BernsteinFunction.gamma(1.0, 2.0), 1.0, 10, seed=0).family == "gamma"
    assert sample_process(LevyTriplet.brownian(2), 1.0, 10, seed=0).values.shape == (10, 2)
    d = sample_process(BernsteinFunction.drift(2.0), 3.0, 5, seed=0)
    np.testing.assert_allclose(d.values, 6.0)


def test_batch_csv(tmp_path):
    b = sample_gamma_process(1.0, 1.0, 1.0, 5, seed=9)
    path = tmp_path / "batch.csv"
    b.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0].startswith("# family=gamma") and "seed=9" in lines[0]
    np.testing.assert_allclose([float(v) for v in lines[2:]], b.values)
    assert isinstance(b, SampleBatch) and b.n == 5


def test_brownian_moments():
    b = sample_brownian(1, 2.0, 200_000, seed=11)
    assert within(empirical_moment(b, lambda x: x[:, 0] ** 2 if x.ndim == 2 else x ** 2), 2.0)


def test_sde_brownian_mgf():
    sim = simulate_sde_coupling(lambda s, x: 0.0 * x, 1.0, [0.3], [0.0], 1.0, 100_000, 64,
                                seed=12)
    m = sim.expect(np.exp)
    assert within(m, math.exp(0.3 + 0.5))


def test_sde_ou_second_moment():
    x0, t = 1.0, 1.0
    sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [x0], [0.5], t, 100_000, 2048, seed=13)
    exact = x0 ** 2 * math.exp(-2 * t) + (1 - math.exp(-2 * t)) / 2
    m = sim.expect(lambda y: y ** 2)
    assert abs(m.mean - exact) <= 3 * m.std_error + 1e-3


def test_sde_zero_shift_identity():
    sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [0.0], [0.0], 1.0, 1000, 32, seed=14)
    a = sim.expect(np.cos)
    b = sim.expect(np.cos, shifted=True)
    assert a.mean == b.mean


def test_harnack_trivial_f():
    sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [0.0], [0.5], 1.0, 1000, 32, seed=15)
    chk = verify_shift_harnack(sim, 0.3, lambda y: np.ones_like(y))
    assert chk.holds
    np.testing.assert_allclose(chk.margin, 0.3)


def test_harnack_ou_single_seed():
    log_exp, pow_exp = ou_exponents()
    sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [0.0], [0.5], 1.0, 100_000, 2048, seed=16)
    assert verify_shift_harnack(sim, log_exp, lambda y: 1 + np.exp(-y ** 2)).holds
    pc = verify_shift_harnack(sim, pow_exp, lambda y: np.exp(-y ** 2), "power", 2.0)
    assert pc.holds and pc.margin > 0


def test_harnack_power_needs_p():
    sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [0.0], [0.5], 1.0, 100, 8, seed=17)
    with pytest.raises(ValueError):
        verify_shift_harnack(sim, 1.0, np.exp, "power")


def test_sde_diagonal_sigma_3d():
    sim = simulate_sde_coupling(lambda s, x: 0.0 * x, [1.0, 2.0, 0.5], [0.0, 0.0, 0.0],
                                [0.0, 0.0, 0.0], 1.0, 50_000, 16, seed=18)
    var = np.var(sim.X, axis=0)
    np.testing.assert_allclose(var, [1.0, 4.0, 0.25], rtol=0.05)


@settings(max_examples=10, deadline=None)
@given(st.floats(0.1, 1.0), st.floats(0.2, 5.0))
def test_exp_functional_positive(kappa, lam):
    b = sample_gamma_process(1.0, 1.0, 1.0, 100, seed=0)
    assert np.all(exp_functional(kappa, lam)(b.values) >= 1.0)
