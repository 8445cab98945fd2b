"""Invariant suites: bound domination, sharpness, exact-vs-Monte-Carlo agreement,
the SDE Harnack check, divergence classifiers and index recovery.

Every suite returns a SuiteReport of CheckRow entries with a signed margin
(positive means the check passed with room to spare).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy import stats

from . import bounds as B
from .harnack import sde_harnack_profile
from .indices import estimate_indices
from .moments import (
    classify_finiteness,
    levy_abs_moment_exact,
    sub_exp_neg_moment_exact,
    sub_neg_moment_exact,
    sub_pos_moment_exact,
)
from .montecarlo import (
    empirical_moment,
    exp_functional,
    power_functional,
    sample_process,
    simulate_sde_coupling,
    verify_shift_harnack,
)
from .processes import BernsteinFunction, LevyTriplet, symbol_from_bernstein

T_GRID = (0.01, 0.1, 1.0, 10.0, 100.0)
SUITES = ("domination", "sharpness", "mc", "harnack", "divergence", "indices")
QUAD_SLACK = 1e-8


@dataclass
class CheckRow:
    name: str
    passed: bool
    value: float
    reference: float
    margin: float
    params: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SuiteReport:
    suite: str
    rows: list = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(r.passed for r in self.rows)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.passed]

    def to_dict(self) -> dict:
        return {"suite": self.suite, "passed": self.passed, "n_checks": len(self.rows),
                "n_failures": len(self.failures), "rows": [r.to_dict() for r in self.rows]}


# ---------------------------------------------------------------------------
# oracles

def poisson_expectation(g, mean: float, jump: float) -> float:
    """``E g(jump N)`` for ``N ~ Poisson(mean)`` by direct summation."""
    kmax = int(mean + 40.0 * math.sqrt(mean) + 60)
    k = np.arange(kmax + 1)
    return float(np.sum(stats.poisson.pmf(k, mean) * g(jump * k)))


@dataclass
class Oracle:
    """An exact value (``se = 0``) or a Monte Carlo mean with its standard error."""

    value: float
    se: float
    method: str


def _mc(phi, functional, t, n, seed) -> Oracle:
    m = empirical_moment(sample_process(phi, t, n, seed), functional)
    return Oracle(m.mean, m.std_error, "monte-carlo")


# ---------------------------------------------------------------------------
# domination

def _stable_cells(alpha: float):
    phi = BernsteinFunction.stable(alpha)
    tr = LevyTriplet.from_bernstein(phi)
    psi = symbol_from_bernstein(phi)
    k_abs, k_neg, lam = 0.2, 0.25, 0.1
    re_w = B.GrowthWitness(math.cos(alpha * math.pi / 2), 0.0, alpha, source="analytic")
    up_w = B.GrowthWitness(1.0, 1.0, alpha, "to-zero", "upper", "analytic")
    w = B.exact_witness(1.0, alpha)
    tb_c = B.bound_abs_moment_symbol(psi, 1, k_abs, alpha, up_w)
    tb_35 = B.bound_sub_pos_moment_symbol(phi, k_abs, alpha)
    neg_d = B.bound_neg_moment_symbol(psi, 1, k_neg, re_w)
    pos = lambda t: Oracle(sub_pos_moment_exact(phi, k_abs, t).value, 0.0, "exact")  # noqa: E731
    neg = lambda t: Oracle(sub_neg_moment_exact(phi, k_neg, t).value, 0.0, "exact")  # noqa: E731
    return phi, [
        ("thm3.1a", {"kappa": k_abs}, lambda t: B.bound_abs_moment_small_time(tr, k_abs, t), pos),
        ("thm3.1c", {"kappa": k_abs, "beta": alpha}, tb_c, pos),
        ("cor3.5", {"kappa": k_abs, "sigma": alpha}, tb_35, pos),
        ("thm3.1d", {"kappa": k_neg, "delta": alpha}, neg_d, neg),
        ("thm3.6a", {"kappa": k_neg, "rho": alpha},
         lambda t: B.bound_sub_neg_moment(phi, k_neg, w, t), neg),
        ("thm3.6b", {"kappa": k_neg, "lambda": lam, "rho": alpha},
         lambda t: B.bound_sub_exp_neg_moment(phi, k_neg, lam, w, t),
         lambda t: Oracle(sub_exp_neg_moment_exact(phi, k_neg, lam, t).value, 0.0, "exact")),
    ]


def _gamma_cells(n: int, seed):
    phi = BernsteinFunction.gamma(1.0, 1.0)
    tr = LevyTriplet.from_bernstein(phi)
    psi = symbol_from_bernstein(phi)
    k = 0.5
    up_w = B.symbol_upper_witness(psi, 1.0)
    pos = lambda t: Oracle(sub_pos_moment_exact(phi, k, t).value, 0.0, "exact")  # noqa: E731
    mgf = lambda t: Oracle((1 - 0.5) ** (-t), 0.0, "closed-form")  # noqa: E731
    mc = lambda t: _mc(phi, exp_functional(0.5, 0.5), t, n, seed)  # noqa: E731
    return phi, [
        ("thm3.1a", {"kappa": k}, lambda t: B.bound_abs_moment_small_time(tr, k, t), pos),
        ("thm3.1b", {"kappa": k}, lambda t: B.bound_abs_moment_bv(tr, k, t), pos),
        ("thm3.1c", {"kappa": k, "beta": 1.0}, B.bound_abs_moment_symbol(psi, 1, k, 1.0, up_w), pos),
        ("cor3.5", {"kappa": k, "sigma": 1.0}, B.bound_sub_pos_moment_symbol(phi, k, 1.0), pos),
        ("thm3.2a", {"kappa": 1.0, "lambda": 0.5},
         lambda t: B.bound_exp_abs_moment(tr, 1.0, 0.5, t), mgf),
        ("thm3.2b", {"kappa": 1.0, "lambda": 0.5},
         lambda t: B.bound_exp_abs_moment_bv(tr, 1.0, 0.5, t), mgf),
        ("thm3.2a", {"kappa": 0.5, "lambda": 0.5},
         lambda t: B.bound_exp_abs_moment(tr, 0.5, 0.5, t), mc),
        ("thm3.2b", {"kappa": 0.5, "lambda": 0.5},
         lambda t: B.bound_exp_abs_moment_bv(tr, 0.5, 0.5, t), mc),
    ]


def _poisson_cells(jump: float, eta: float = 1.0):
    phi = BernsteinFunction.compound_poisson(eta, [jump], [1.0])
    tr = LevyTriplet.from_bernstein(phi)
    psi = symbol_from_bernstein(phi)
    k = 0.5

    def pois(g):
        return lambda t: Oracle(poisson_expectation(g, eta * t, jump), 0.0, "closed-form")

    pos = pois(lambda x: x ** k)
    cells = [
        ("thm3.1a", {"kappa": k}, lambda t: B.bound_abs_moment_small_time(tr, k, t), pos),
        ("thm3.1b", {"kappa": k}, lambda t: B.bound_abs_moment_bv(tr, k, t), pos),
        ("thm3.1c", {"kappa": k, "beta": 1.0},
         B.bound_abs_moment_symbol(psi, 1, k, 1.0, B.symbol_upper_witness(psi, 1.0)), pos),
        ("cor3.5", {"kappa": k, "sigma": 1.0}, B.bound_sub_pos_moment_symbol(phi, k, 1.0), pos),
    ]
    for kk, lam in ((1.0, 0.5), (0.5, 0.5)):
        ref = pois(lambda x, kk=kk, lam=lam: np.exp(lam * x ** kk))
        cells.append(("thm3.2a", {"kappa": kk, "lambda": lam},
                      lambda t, kk=kk, lam=lam: B.bound_exp_abs_moment(tr, kk, lam, t), ref))
        cells.append(("thm3.2b", {"kappa": kk, "lambda": lam},
                      lambda t, kk=kk, lam=lam: B.bound_exp_abs_moment_bv(tr, kk, lam, t), ref))
        if jump < 1:
            cells.append(("no-big-jumps", {"kappa": kk, "lambda": lam},
                          lambda t, kk=kk, lam=lam: B.bound_sub_exp_pos_no_big_jumps(
                              phi, kk, lam, t), ref))
    return phi, cells


def domination_matrix(n: int = 100_000, seed=0, families=None):
    """(family label, phi, cells) for the domination matrix."""
    rows = []
    for a in (0.3, 0.5, 0.8):
        rows.append((f"stable-subordinator(alpha={a:g})", *_stable_cells(a)))
    rows.append(("gamma(alpha=1,beta=1)", *_gamma_cells(n, seed)))
    rows.append(("compound-poisson(atom=1)", *_poisson_cells(1.0)))
    rows.append(("compound-poisson(atom=0.5)", *_poisson_cells(0.5)))
    if families:
        rows = [r for r in rows if any(r[0].startswith(f) for f in families)]
    return rows


def suite_domination(n: int = 100_000, seed=0, families=None, t_grid=T_GRID,
                     sigmas: float = 3.0) -> SuiteReport:
    """Every applicable bound dominates the exact or Monte Carlo moment."""
    rep = SuiteReport("domination")
    for label, _phi, cells in domination_matrix(n, seed, families):
        for sel, params, bound, oracle in cells:
            for t in t_grid:
                b = float(bound(t))
                o = oracle(t)
                slack = sigmas * o.se + QUAD_SLACK * abs(o.value)
                margin = b - o.value
                rep.rows.append(CheckRow(
                    f"{label} {sel}", bool(b >= o.value - slack), b, o.value,
                    margin if math.isfinite(margin) else math.inf,
                    dict(params, t=t, oracle=o.method, se=o.se)))
    return rep


# ---------------------------------------------------------------------------
# sharpness

def gamma_bv_ratio(t: float, kappa: float = 0.5) -> float:
    """Ratio of the bounded-variation bound to ``E S_t^k = Gamma(t+k)/Gamma(t)``."""
    phi = BernsteinFunction.gamma(1.0, 1.0)
    exact = math.exp(math.lgamma(t + kappa) - math.lgamma(t))
    return float(B.bound_abs_moment_bv(LevyTriplet.from_bernstein(phi), kappa, t)) / exact


def stable_neg_scaling(ts=(1e-2, 1.0, 1e2)) -> np.ndarray:
    phi = BernsteinFunction.stable(0.5)
    return np.array([sub_neg_moment_exact(phi, 0.25, t).value * t ** 0.5 for t in ts])


def symmetric_stable_ratio() -> tuple[float, float]:
    psi = LevyTriplet.symmetric_stable(1.5, 1).symbol()
    v1 = levy_abs_moment_exact(psi, 1, 0.75, 1.0).value
    v4 = levy_abs_moment_exact(psi, 1, 0.75, 4.0).value
    return v1, v4


def exp_neg_bound_slope(kappa: float = 0.25, rho: float = 0.5, lam: float = 0.1,
                        ts=None) -> float:
    """Slope of ``log log(bound)`` against ``log(1/t)`` on ``[1e-4, 1e-2]``."""
    ts = np.logspace(-4, -2, 21) if ts is None else np.asarray(ts)
    w = B.exact_witness(1.0, rho)
    logb = np.asarray(B.bound_sub_exp_neg_moment(None, kappa, lam, w, ts, log=True))
    return float(np.polyfit(np.log(1 / ts), np.log(logb), 1)[0])


def suite_sharpness() -> SuiteReport:
    rep = SuiteReport("sharpness")
    for t in (1e-3, 1e3):
        r = gamma_bv_ratio(t)
        rep.rows.append(CheckRow("gamma thm3.1b ratio", 1.0 <= r <= 1.05, r, 1.0,
                                 min(r - 1.0, 1.05 - r), {"t": t, "kappa": 0.5}))
    vals = stable_neg_scaling()
    ref = math.gamma(0.5) / (0.5 * math.gamma(0.25))
    spread = float(np.max(np.abs(vals / vals[1] - 1)))
    rep.rows.append(CheckRow("stable neg-moment scaling", spread <= 1e-6, float(vals[1]), ref,
                             1e-6 - spread, {"kappa": 0.25, "alpha": 0.5}))
    rep.rows.append(CheckRow("stable neg-moment constant", abs(vals[1] / ref - 1) <= 1e-6,
                             float(vals[1]), ref, 1e-6 - abs(vals[1] / ref - 1), {}))
    v1, v4 = symmetric_stable_ratio()
    dev = abs(v4 / (2 * v1) - 1)
    rep.rows.append(CheckRow("symmetric-stable scaling", dev <= 1e-4, v4 / v1, 2.0, 1e-4 - dev,
                             {"alpha": 1.5, "kappa": 0.75}))
    phi = BernsteinFunction.stable(0.5)
    w = B.exact_witness(1.0, 0.5)
    for t in (0.01, 1.0, 100.0):
        b = float(B.bound_sub_neg_moment(phi, 0.25, w, t))
        e = sub_neg_moment_exact(phi, 0.25, t).value
        dev = abs(b / e - 1)
        rep.rows.append(CheckRow("stable thm3.6a equality", dev <= 1e-7, b, e, 1e-7 - dev,
                                 {"t": t}))
    s = exp_neg_bound_slope()
    lim = 0.25 / (0.5 - 0.5 * 0.25) + 0.05
    rep.rows.append(CheckRow("thm3.6b small-t exponent", s <= lim, s, lim, lim - s,
                             {"kappa": 0.25, "rho": 0.5}))
    return rep


# ---------------------------------------------------------------------------
# exact vs Monte Carlo

def mc_matrix():
    st = BernsteinFunction.stable(0.5)
    ga = BernsteinFunction.gamma(1.0, 1.0)
    ss = LevyTriplet.symmetric_stable(1.5, 1)
    return [
        ("stable-subordinator(0.5)", st, -0.25, lambda t: sub_neg_moment_exact(st, 0.25, t)),
        ("stable-subordinator(0.5)", st, 0.25, lambda t: sub_pos_moment_exact(st, 0.25, t)),
        ("gamma(1,1)", ga, -0.25, lambda t: sub_neg_moment_exact(ga, 0.25, t)),
        ("gamma(1,1)", ga, 0.5, lambda t: sub_pos_moment_exact(ga, 0.5, t)),
        ("symmetric-stable(1.5)", ss, 0.75,
         lambda t: levy_abs_moment_exact(ss.symbol(), 1, 0.75, t)),
    ]


def suite_mc(n: int = 1_000_000, seed=0, ts=(0.5, 1.0, 2.0), sigmas: float = 3.0
             ) -> SuiteReport:
    """Exact moments agree with Monte Carlo within ``sigmas`` combined SE."""
    rep = SuiteReport("mc")
    matrix = mc_matrix()
    cell_seeds = iter(np.random.SeedSequence(seed).generate_state(len(matrix) * len(ts)))
    for label, obj, kappa, exact in matrix:
        for t in ts:
            e = exact(t)
            m = empirical_moment(sample_process(obj, t, n, int(next(cell_seeds))),
                                 power_functional(kappa))
            se = math.hypot(m.std_error, e.abs_error)
            diff = abs(m.mean - e.value)
            rep.rows.append(CheckRow(f"{label} kappa={kappa:g}", diff <= sigmas * se, m.mean,
                                     e.value, sigmas * se - diff,
                                     {"t": t, "se": se, "z": diff / se if se else 0.0}))
    return rep


# ---------------------------------------------------------------------------
# Harnack Monte Carlo check

OU_CONFIG = {"x": 0.0, "e": 0.5, "t": 1.0, "p": 2.0}


def ou_exponents(e: float = 0.5, t: float = 1.0, p: float = 2.0) -> tuple[float, float]:
    """Log and power exponents for the OU drift ``l(x) = -x`` (K = 1, gamma = 1)."""
    res = sde_harnack_profile(lambda r: 1.0, lambda r: 1.0, e, t=t, p=p)
    return float(res.log_exponent), float(res.power_exponent)


def suite_harnack(n: int = 100_000, seed=0, seeds: int = 20, n_steps: int = 2048
                  ) -> SuiteReport:
    rep = SuiteReport("harnack")
    c = OU_CONFIG
    log_exp, pow_exp = ou_exponents(c["e"], c["t"], c["p"])
    base = 0 if seed is None else int(seed)
    for k in range(seeds):
        sim = simulate_sde_coupling(lambda s, x: -x, 1.0, [c["x"]], [c["e"]], c["t"], n,
                                    n_steps, seed=base + k)
        lc = verify_shift_harnack(sim, log_exp, lambda y: 1.0 + np.exp(-y ** 2))
        pc = verify_shift_harnack(sim, pow_exp, lambda y: np.exp(-y ** 2), "power", c["p"])
        for name, chk in (("log", lc), ("power", pc)):
            rep.rows.append(CheckRow(f"OU shift {name}-Harnack", chk.holds, chk.lhs, chk.rhs,
                                     chk.margin + 3 * chk.std_error,
                                     {"seed": base + k, "se": chk.std_error,
                                      "exponent": chk.exponent}))
    return rep


# ---------------------------------------------------------------------------
# divergence classifiers

def suite_divergence() -> SuiteReport:
    rep = SuiteReport("divergence")
    bm = LevyTriplet.brownian(1)
    cases = [
        ("brownian neg kappa=1", bm, "neg", 1.0, None, "real-symbol-negative-moment"),
        ("brownian exp-neg kappa=1", bm, "exp_neg", 1.0, 1.0,
         "real-symbol-exp-negative-moment"),
        ("gamma exp kappa=1.5", BernsteinFunction.gamma(1, 1), "exp_abs", 1.5, 1.0,
         "superlinear-exp-moment"),
        ("stable exp kappa=1.5", BernsteinFunction.stable(0.5), "exp_abs", 1.5, 1.0,
         "superlinear-exp-moment"),
        ("compound-poisson exp kappa=1.5", BernsteinFunction.compound_poisson(1.0, [1.0]),
         "exp_abs", 1.5, 1.0, "superlinear-exp-moment"),
        ("symmetric-stable exp kappa=1.5", LevyTriplet.symmetric_stable(1.5, 1), "exp_abs",
         1.5, 1.0, "superlinear-exp-moment"),
        ("gamma exp-neg kappa=0.5", BernsteinFunction.gamma(1, 1), "exp_neg", 0.5, 1.0,
         "slow-laplace-exponent"),
    ]
    for name, obj, kind, kappa, lam, crit in cases:
        dec = classify_finiteness(obj, kind, kappa, lam)
        ok = dec.status == "infinite" and dec.criterion == crit
        rep.rows.append(CheckRow(name, ok, float(dec.status == "infinite"), 1.0, 0.0 if ok else -1.0,
                                 {"criterion": dec.criterion, "expected": crit}))
    ga = BernsteinFunction.gamma(1, 1)
    for t in (0.5, 1.0, 2.0):
        est = sub_exp_neg_moment_exact(ga, 0.5, 1.0, t, use_criterion=False)
        ok = est.status == "infinite"
        rep.rows.append(CheckRow("gamma exp-neg kappa=0.5 numerical certificate", ok,
                                 est.value, math.inf, 0.0 if ok else -1.0,
                                 {"t": t, "certificate": est.certificate}))
    return rep


# ---------------------------------------------------------------------------
# indices

def random_subject(rng: np.random.Generator):
    """A random reference object for the index ordering checks."""
    kind = rng.integers(6)
    if kind == 0:
        return BernsteinFunction.stable(float(rng.uniform(0.05, 0.95)))
    if kind == 1:
        return BernsteinFunction.gamma(float(rng.uniform(0.2, 5)), float(rng.uniform(0.2, 5)))
    if kind == 2:
        return LevyTriplet.symmetric_stable(float(rng.uniform(0.2, 1.95)), int(rng.integers(1, 4)))
    if kind == 3:
        return BernsteinFunction.truncated_stable(float(rng.uniform(0.1, 0.9)),
                                                  float(rng.uniform(0.5, 2)))
    if kind == 4:
        return BernsteinFunction.stable(float(rng.uniform(0.1, 0.9))) + \
            BernsteinFunction.gamma(1.0, float(rng.uniform(0.5, 2)))
    return BernsteinFunction.compound_poisson(float(rng.uniform(0.5, 3)), [float(rng.uniform(0.1, 3))])


ORDER_TOL = 0.05


def ordering_violations(rep) -> list[str]:
    """Ordering invariants among the resolved indices (unresolved ones carry
    no trustworthy value and are skipped)."""
    v = {k: (None if k in rep.unresolved else x) for k, x in rep.values().items()}
    out = []
    pairs = (("rho_inf", "sigma_inf"), ("sigma0", "rho0"), ("delta_inf", "beta_inf"),
             ("beta0", "delta0"))
    for lo, hi in pairs:
        a, b = v[lo], v[hi]
        if a is not None and b is not None and a > b + ORDER_TOL:
            out.append(f"{lo}={a:.4g} > {hi}={b:.4g}")
    if v["beta0"] is not None and v["beta0"] > 2.05:
        out.append(f"beta0={v['beta0']:.4g} > 2.05")
    return out


def suite_indices(seed=0, draws: int = 100) -> SuiteReport:
    rep = SuiteReport("indices")
    subjects = [(f"stable-subordinator({a:g})", BernsteinFunction.stable(a), a)
                for a in (0.3, 0.5, 0.8)]
    subjects += [(f"symmetric-stable({a:g},d={d})", LevyTriplet.symmetric_stable(a, d), a)
                 for a, d in ((0.7, 1), (1.5, 1), (1.2, 2))]
    for label, obj, alpha in subjects:
        vals = estimate_indices(obj).values()
        for name, v in vals.items():
            if v is None:
                continue
            dev = abs(v - alpha)
            rep.rows.append(CheckRow(f"{label} {name}", dev <= 0.02, v, alpha, 0.02 - dev, {}))
    rng = np.random.default_rng(seed)
    for i in range(draws):
        obj = random_subject(rng)
        bad = ordering_violations(estimate_indices(obj))
        rep.rows.append(CheckRow(f"ordering draw {i}", not bad, float(len(bad)), 0.0,
                                 0.0 - len(bad), {"subject": obj.name, "violations": bad}))
    return rep


def run_suites(names=("all",), n: int | None = None, seed=0, families=None, seeds: int = 20
               ) -> list[SuiteReport]:
    """Run the named suites (``all`` expands to every suite)."""
    names = list(SUITES) if "all" in names else list(names)
    out = []
    for name in names:
        if name == "domination":
            out.append(suite_domination(n or 100_000, seed, families))
        elif name == "sharpness":
            out.append(suite_sharpness())
        elif name == "mc":
            out.append(suite_mc(n or 1_000_000, seed))
        elif name == "harnack":
            out.append(suite_harnack(n or 100_000, seed, seeds))
        elif name == "divergence":
            out.append(suite_divergence())
        elif name == "indices":
            out.append(suite_indices(seed))
        else:
            raise ValueError(f"unknown suite {name!r}; expected one of {', '.join(SUITES)}, all")
    return out


__all__ = [
    "CheckRow",
    "SuiteReport",
    "SUITES",
    "run_suites",
    "suite_domination",
    "suite_sharpness",
    "suite_mc",
    "suite_harnack",
    "suite_divergence",
    "suite_indices",
    "gamma_bv_ratio",
    "stable_neg_scaling",
    "symmetric_stable_ratio",
    "exp_neg_bound_slope",
    "ou_exponents",
    "poisson_expectation",
    "ordering_violations",
    "random_subject",
]
