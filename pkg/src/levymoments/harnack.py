"""Shift Harnack exponents of subordinate semigroups and of an SDE example.

If ``P_t`` satisfies the shift log-Harnack inequality

    P_t log f(x) <= log P_t[f(. + e)](x) + C1/t^k1 + C2 t^k2 + C3,

Jensen's inequality gives the same inequality for ``P_t^phi`` with exponent
``C1 E S_t^{-k1} + C2 E S_t^{k2} + C3``; the moment bounds turn this into an
explicit function of t. The power-Harnack version uses a Hölder split into
``E exp(lam1 S_t^{-k1})`` and ``E exp(lam2 S_t^{k2})``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np
from scipy import integrate

from .bounds import (
    GrowthWitness,
    WitnessError,
    bound_abs_moment_small_time,
    bound_exp_abs_moment,
    bound_exp_abs_moment_bv,
    bound_sub_exp_neg_moment,
    bound_sub_exp_pos_no_big_jumps,
    bound_sub_neg_moment,
    bound_sub_pos_moment_symbol,
    tuned_lower_witness,
)
from .indices import SNAP_ZERO, HypothesisReport, check_hypotheses, estimate_indices
from .moments import sub_neg_moment_exact, sub_pos_moment_exact
from .processes import (
    BernsteinFunction,
    LevyTriplet,
    nu_exp_moment,
    nu_frac_moment,
    nu_tail_mass,
)

CASES = ("a", "b", "c")
CASE_NEEDS = {"a": "h2", "b": "h3", "c": "h4"}
SDE_GRID = (-4.0, 4.0, 81)
TREND_TOL = 0.01


class HypothesisError(ValueError):
    """A hypothesis needed by the requested composition fails."""

    def __init__(self, failed: list[str], detail: str = ""):
        self.failed = list(failed)
        msg = "hypotheses fail: " + ", ".join(f"({h})" for h in failed)
        super().__init__(msg + (f"; {detail}" if detail else ""))


@dataclass(frozen=True)
class HarnackProfile:
    """Input Harnack exponent ``A/t^k1 + B t^k2 + C``.

    For ``kind='log'`` the constants are ``C = (C1, C2, C3)``; for
    ``kind='power'`` they are ``H = (H1, H2, H3)`` together with ``p > 1``.
    """

    kind: str
    kappa1: float
    kappa2: float
    C: tuple = (0.0, 0.0, 0.0)
    H: tuple = (0.0, 0.0, 0.0)
    p: float | None = None

    def __post_init__(self):
        if self.kind not in ("log", "power"):
            raise ValueError(f"kind must be 'log' or 'power', got {self.kind!r}")
        if not self.kappa1 > 0:
            raise ValueError(f"kappa1 must be positive, got {self.kappa1}")
        if not 0 < self.kappa2 <= 1:
            raise ValueError(f"kappa2 must lie in (0, 1], got {self.kappa2}")
        consts = self.C if self.kind == "log" else self.H
        object.__setattr__(self, "C", tuple(float(c) for c in self.C))
        object.__setattr__(self, "H", tuple(float(h) for h in self.H))
        if len(consts) != 3 or any(not (c >= 0 and math.isfinite(c)) for c in consts):
            raise ValueError(f"constants must be three finite nonnegative numbers, got {consts}")
        if self.kind == "power" and not (self.p is not None and self.p > 1):
            raise ValueError(f"power profiles need p > 1, got {self.p}")

    @classmethod
    def log(cls, kappa1, kappa2, C1, C2, C3) -> "HarnackProfile":
        return cls("log", kappa1, kappa2, C=(C1, C2, C3))

    @classmethod
    def power(cls, kappa1, kappa2, H1, H2, H3, p) -> "HarnackProfile":
        return cls("power", kappa1, kappa2, H=(H1, H2, H3), p=p)

    @property
    def constants(self) -> tuple:
        return self.C if self.kind == "log" else self.H

    def __call__(self, t):
        a, b, c = self.constants
        tt = np.asarray(t, dtype=float)
        v = a * tt ** (-self.kappa1) + b * tt ** self.kappa2 + c
        return float(v) if np.ndim(t) == 0 else v

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class SubordinateExponent:
    """Exponent of the subordinate Harnack inequality with its constant ledger.

    ``constants`` maps each constant to ``{"value", "source"}``; ``value``
    is the bound route unless the exact-moment route was requested, in
    which case both are kept.
    """

    t: object
    value: object
    case_used: str
    constants: dict = field(default_factory=dict)
    hypotheses: dict = field(default_factory=dict)
    route: str = "bound"
    bound_value: object = None
    exact_value: object = None

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("t", "value", "bound_value", "exact_value"):
            if isinstance(d[k], np.ndarray):
                d[k] = d[k].tolist()
        return d


def _tarr(t):
    ta = np.asarray(t, dtype=float)
    if np.any(ta <= 0):
        raise ValueError("t must be positive")
    return ta


def _out(v, t):
    return float(v) if np.ndim(t) == 0 else v


def _entry(value, source: str) -> dict:
    return {"value": float(value), "source": source}


def _neg_witness(phi: BernsteinFunction, rho: float, kappa1: float) -> GrowthWitness:
    return tuned_lower_witness(
        phi, rho, lambda w: bound_sub_neg_moment(phi, kappa1, w, 1.0))


def _largest_finite_theta(phi: BernsteinFunction, kappa2: float, points: int = 33):
    for theta in np.linspace(1.0, kappa2, points):
        J = 0.0 if phi.nu.is_zero else nu_frac_moment(phi.nu, float(theta), "full").value
        if math.isfinite(J):
            return float(theta), J
    return None, math.inf


def _pick_case(case: str, hyp: HypothesisReport, need_pos: bool) -> str:
    if case != "auto":
        if case not in CASES:
            raise ValueError(f"case must be one of a, b, c, auto; got {case!r}")
        return case
    if not need_pos:
        return "a"
    for c in ("c", "b", "a"):
        if getattr(hyp, CASE_NEEDS[c]):
            return c
    raise HypothesisError(["H2", "H3", "H4"], "no case applies")


def subordinate_log_harnack(profile: HarnackProfile, phi: BernsteinFunction, t,
                            case: str = "auto", rho: float | None = None,
                            sigma: float | None = None, exact: bool = False
                            ) -> SubordinateExponent:
    """Shift log-Harnack exponent of the subordinate semigroup.

    Case a: ``C1 C_{k1,rho} min(t,1)^{-k1/rho} + C2 C_{k2} max(t,1) + C3``
    under (H1), (H2).
    Case b: ``... + C2 C_{k2} max(t,1)^{k2/theta} + C3`` under (H1), (H3),
    where theta is the largest exponent in [k2, 1] with finite
    ``int y^theta nu`` (theta = 1 gives the ``max(t,1)^{k2}`` form).
    Case c: ``... + C2 C_{k2,sigma} max(t,1)^{k2/sigma} + C3`` under (H1), (H4).

    Hypotheses attached to a vanishing constant are waived: (H1) when
    C1 = 0 and (H2)-(H4) when C2 = 0. ``auto`` prefers c, then b, then a.
    With ``exact=True`` the value is ``C1 E S_t^{-k1} + C2 E S_t^{k2} + C3``
    by quadrature; the bound route is kept in ``bound_value``.
    """
    if profile.kind != "log":
        raise ValueError("subordinate_log_harnack needs a log profile")
    C1, C2, C3 = profile.C
    k1, k2 = profile.kappa1, profile.kappa2
    ta = _tarr(t)
    constants = {"C1": _entry(C1, "profile"), "C2": _entry(C2, "profile"),
                 "C3": _entry(C3, "profile")}

    hyp = check_hypotheses(phi, k1, k2, rho=rho, sigma=sigma) if (C1 > 0 or C2 > 0) else None
    hyp_dict = hyp.to_dict() if hyp is not None else {}
    if C1 > 0 and not hyp.h1:
        raise HypothesisError(["H1"], f"no liminf witness for rho={hyp.witness_rho:.4g}")
    chosen = _pick_case(case, hyp, C2 > 0) if hyp is not None else (
        "a" if case == "auto" else case)
    if C2 > 0 and not getattr(hyp, CASE_NEEDS[chosen]):
        raise HypothesisError([CASE_NEEDS[chosen].upper()], f"case {chosen}")

    value = np.full(ta.shape, C3)
    if C1 > 0:
        w = _neg_witness(phi, hyp.witness_rho, k1)
        c_neg = bound_sub_neg_moment(phi, k1, w, 1.0)
        constants["C_kappa1_rho"] = _entry(c_neg, "bound_sub_neg_moment at t=1")
        constants["witness_C1"] = _entry(w.C1, "grid lower witness")
        constants["witness_C2"] = _entry(w.C2, "grid lower witness")
        constants["rho"] = _entry(hyp.witness_rho, "witness exponent")
        value = value + C1 * c_neg * np.minimum(ta, 1.0) ** (-k1 / hyp.witness_rho)
    if C2 > 0:
        big = np.maximum(ta, 1.0)
        if chosen == "a":
            tr = LevyTriplet.from_bernstein(phi)
            c_pos = bound_abs_moment_small_time(tr, k2, 1.0)
            constants["C_kappa2"] = _entry(c_pos, "bound_abs_moment_small_time at t=1")
            growth = big
        elif chosen == "b":
            theta, J = _largest_finite_theta(phi, k2)
            c_pos = (phi.b ** theta + J) ** (k2 / theta)
            constants["C_kappa2"] = _entry(c_pos, "bound_abs_moment_bv at theta*")
            constants["theta"] = _entry(theta, "largest theta with finite J(theta)")
            growth = big ** (k2 / theta)
        else:
            sig = hyp.witness_sigma
            c_pos = bound_sub_pos_moment_symbol(phi, k2, sig).prefactor
            constants["C_kappa2_sigma"] = _entry(c_pos, "bound_sub_pos_moment_symbol")
            constants["sigma"] = _entry(sig, "witness exponent")
            growth = big ** (k2 / sig)
        value = value + C2 * c_pos * growth

    result = SubordinateExponent(t=_out(ta, t), value=_out(value, t), case_used=chosen,
                                 constants=constants, hypotheses=hyp_dict,
                                 bound_value=_out(value, t))
    if exact:
        ex = np.full(ta.shape, C3)
        for i, ti in enumerate(ta.flat):
            v = C3
            if C1 > 0:
                v += C1 * sub_neg_moment_exact(phi, k1, float(ti)).value
            if C2 > 0:
                v += C2 * sub_pos_moment_exact(phi, k2, float(ti)).value
            ex.flat[i] = v
        result.exact_value = _out(ex, t)
        result.value = result.exact_value
        result.route = "exact"
    return result


def _exp_pos_routes(phi: BernsteinFunction, kappa2: float, lam: float, t: float) -> dict:
    tr = LevyTriplet.from_bernstein(phi)
    routes = {"exp-moment-eps": bound_exp_abs_moment(tr, kappa2, lam, t)}
    routes["exp-moment-bv"] = bound_exp_abs_moment_bv(tr, kappa2, lam, t)
    if nu_tail_mass(phi.nu, 1.0).value == 0:
        routes["no-big-jumps"] = bound_sub_exp_pos_no_big_jumps(phi, kappa2, lam, t)
    return routes


def subordinate_power_harnack(profile: HarnackProfile, phi: BernsteinFunction, r: float, t,
                              rho: float | None = None) -> SubordinateExponent:
    """Shift power-Harnack exponent of the subordinate semigroup.

    Hölder's inequality with exponents ``r/(r-1)`` and ``r`` gives::

        Phi = H3 + (r-1)(p-1)/r * log E exp(lam1 S_t^{-k1})
                 + (p-1)/r * log E exp(lam2 S_t^{k2})

    with ``lam1 = r H1/((r-1)(p-1))`` and ``lam2 = r H2/(p-1)``. The first
    expectation uses the negative exponential-moment bound with a witness
    ``rho`` in ``(k1/(1+k1), rho_inf]`` (default ``0.9 rho_inf``); the second
    uses the smallest applicable positive exponential-moment bound and needs
    ``int_{y>=1} exp(lam2 y^k2) nu(dy) < inf``.
    """
    if profile.kind != "power":
        raise ValueError("subordinate_power_harnack needs a power profile")
    if not r > 1:
        raise ValueError(f"r must exceed 1, got {r}")
    H1, H2, H3 = profile.H
    p, k1, k2 = profile.p, profile.kappa1, profile.kappa2
    ta = _tarr(t)
    lam1 = r * H1 / ((r - 1) * (p - 1))
    lam2 = r * H2 / (p - 1)
    w1, w2 = (r - 1) * (p - 1) / r, (p - 1) / r
    constants = {"H1": _entry(H1, "profile"), "H2": _entry(H2, "profile"),
                 "H3": _entry(H3, "profile"), "p": _entry(p, "profile"),
                 "r": _entry(r, "argument"), "lambda1": _entry(lam1, "r H1/((r-1)(p-1))"),
                 "lambda2": _entry(lam2, "r H2/(p-1)")}
    hyps: dict = {}
    value = np.full(ta.shape, H3)

    if H1 > 0:
        lower = k1 / (1 + k1)
        if rho is None:
            est = estimate_indices(phi).rho_inf or 0.0
            rho = 0.0 if est <= SNAP_ZERO else 0.9 * est
        hyps["rho"] = rho
        if not rho > lower:
            raise HypothesisError(
                ["H1"], f"no valid rho: need rho in ({lower:.4g}, rho_inf], have {rho:.4g}")
        rho = min(rho, 1.0)
        try:
            w = tuned_lower_witness(
                phi, rho, lambda w: bound_sub_exp_neg_moment(phi, k1, lam1, w, 1.0, log=True))
        except WitnessError as exc:
            raise HypothesisError(["H1"], str(exc)) from exc
        hyps["h1"] = True
        constants["witness_C1"] = _entry(w.C1, "grid lower witness")
        constants["witness_C2"] = _entry(w.C2, "grid lower witness")
        constants["rho"] = _entry(rho, "witness exponent")
        constants["small_t_exponent"] = _entry(k1 / (rho - (1 - rho) * k1),
                                               "k1/(rho-(1-rho)k1)")
        constants["log_harnack_small_t_exponent"] = _entry(k1 / rho, "k1/rho")
        log_neg = bound_sub_exp_neg_moment(phi, k1, lam1, w, ta, log=True)
        value = value + w1 * np.asarray(log_neg)

    if H2 > 0:
        tail = 0.0 if phi.nu.is_zero else nu_exp_moment(phi.nu, lam2, k2, "outer").value
        hyps["exp_tail_integrable"] = math.isfinite(tail)
        constants["exp_tail_integral"] = _entry(tail, "int_{y>=1} exp(lam2 y^k2) nu(dy)")
        if not math.isfinite(tail):
            raise HypothesisError(
                ["exp-tail"], f"int_(y>=1) exp({lam2:.4g} y^{k2:g}) nu(dy) diverges")
        logs = np.empty(ta.shape)
        used = []
        for i, ti in enumerate(ta.flat):
            routes = _exp_pos_routes(phi, k2, lam2, float(ti))
            name, best = min(routes.items(), key=lambda kv: kv[1])
            logs.flat[i] = math.log(best)
            used.append(name)
        hyps["exp_pos_route"] = ",".join(sorted(set(used)))
        value = value + w2 * logs

    return SubordinateExponent(t=_out(ta, t), value=_out(value, t), case_used="power",
                               constants=constants, hypotheses=hyps,
                               bound_value=_out(value, t))


# ---------------------------------------------------------------------------
# SDE example

@dataclass
class SDEHarnackResult:
    """Exponents of the coupling argument for ``dX = l_t(X)dt + Sigma_t dW``.

    ``I(t) = t^-2 int_0^t gamma_r^2 (r K_r + 1)^2 dr``; the log exponent is
    ``|e|^2 I(t)/2`` and the power exponent ``p |e|^2 I(t)/(2(p-1))``.
    ``profile`` carries ``C|e|^2`` (or ``C p |e|^2/(p-1)``) with ``C`` the
    grid supremum of ``I(t)/(2(t^-k1 + t^k2 + 1))``.
    """

    t: object
    I: object
    log_exponent: object
    power_exponent: object
    C: float
    profile: HarnackProfile
    con4_proxy: float
    con5_proxy: float

    def to_dict(self) -> dict:
        d = asdict(self)
        for k in ("t", "I", "log_exponent", "power_exponent"):
            if isinstance(d[k], np.ndarray):
                d[k] = d[k].tolist()
        return d


def _cumulative_integral(h: Callable[[float], float], ts: np.ndarray) -> np.ndarray:
    """``int_0^{t_i} h`` for an increasing grid, piece by piece."""
    out = np.empty(ts.shape)
    acc, prev = 0.0, 0.0
    for i, ti in enumerate(ts):
        v, _ = integrate.quad(h, prev, ti, limit=200, epsrel=1e-10, epsabs=0.0)
        acc += v
        out[i] = acc
        prev = ti
    return out


def coupling_integral(gamma: Callable, K: Callable, t) -> np.ndarray | float:
    """``I(t) = t^-2 int_0^t gamma_r^2 (r K_r + 1)^2 dr``."""
    ta = _tarr(t)
    flat = ta.ravel()
    order = np.argsort(flat)

    def h(r):
        return float(gamma(r)) ** 2 * (r * float(K(r)) + 1.0) ** 2

    cum = np.empty(flat.shape)
    cum[order] = _cumulative_integral(h, flat[order])
    vals = (cum / flat ** 2).reshape(ta.shape)
    return _out(vals, t)


def sde_harnack_profile(gamma: Callable, K: Callable, e_norm: float, t=1.0,
                        p: float | None = None, kappa1: float = 1.0, kappa2: float = 1.0,
                        grid=SDE_GRID) -> SDEHarnackResult:
    """Harnack profile of the SDE from the coupling bound.

    (con4) and (con5) are checked as grid proxies: ``t^k1 I(t)`` must not
    grow toward ``t = 1e-4`` and ``t^-k2 I(t)`` must not grow toward
    ``t = 1e4`` (fitted log-log trend at most 0.01 over the edge decade).
    """
    if not kappa1 >= 1:
        raise ValueError(f"kappa1 must be at least 1, got {kappa1}")
    if not 0 < kappa2 <= 1:
        raise ValueError(f"kappa2 must lie in (0, 1], got {kappa2}")
    if p is not None and not p > 1:
        raise ValueError(f"p must exceed 1, got {p}")
    lo, hi, n = grid
    ts = np.logspace(lo, hi, int(n))
    I_grid = np.asarray(coupling_integral(gamma, K, ts))
    if not np.all(np.isfinite(I_grid)):
        raise ValueError("coupling integral is not finite on the grid; gamma^2 must be "
                         "locally integrable")
    per_decade = (len(ts) - 1) / (hi - lo)
    m = int(round(per_decade)) + 1
    p4 = ts[:m] ** kappa1 * I_grid[:m]
    p5 = ts[-m:] ** (-kappa2) * I_grid[-m:]
    s4 = np.polyfit(np.log(ts[:m]), np.log(p4), 1)[0]
    s5 = np.polyfit(np.log(ts[-m:]), np.log(p5), 1)[0]
    if s4 < -TREND_TOL:
        raise ValueError(f"(con4) fails: t^{kappa1:g} I(t) grows as t -> 0 (trend {s4:.3g})")
    if s5 > TREND_TOL:
        raise ValueError(f"(con5) fails: t^-{kappa2:g} I(t) grows as t -> inf (trend {s5:.3g})")
    C = float(np.max(I_grid / (2.0 * (ts ** (-kappa1) + ts ** kappa2 + 1.0))))
    e2 = float(e_norm) ** 2
    if p is None:
        profile = HarnackProfile.log(kappa1, kappa2, C * e2, C * e2, C * e2)
    else:
        h = C * p * e2 / (p - 1)
        profile = HarnackProfile.power(kappa1, kappa2, h, h, h, p)
    I_t = coupling_integral(gamma, K, t)
    log_exp = e2 * np.asarray(I_t) / 2.0
    pow_exp = None if p is None else p * e2 * np.asarray(I_t) / (2.0 * (p - 1))
    return SDEHarnackResult(
        t=t, I=I_t, log_exponent=_out(log_exp, t),
        power_exponent=None if pow_exp is None else _out(pow_exp, t),
        C=C, profile=profile, con4_proxy=float(np.max(p4)), con5_proxy=float(np.max(p5)))


__all__ = [
    "HarnackProfile",
    "HypothesisError",
    "SubordinateExponent",
    "SDEHarnackResult",
    "subordinate_log_harnack",
    "subordinate_power_harnack",
    "sde_harnack_profile",
    "coupling_integral",
]
