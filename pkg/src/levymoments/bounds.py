"""Explicit moment bounds with concrete constants extracted from process data.

Every bound returns ``inf`` (instead of raising) when an integral it needs
diverges, so domination checks stay vacuously true. Bounds accept scalar or
array ``t``.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass
from functools import lru_cache

import numpy as np
from scipy import special

from .indices import growth_function, liminf_positive
from .numerics import minimize_1d, riesz_c, riesz_c_prime, surface_area
from .processes import (
    BernsteinFunction,
    CharacteristicExponent,
    LevyTriplet,
    M_kappa_lambda,
    as_symbol,
    as_triplet,
    nu_exp_moment,
    nu_frac_moment,
    nu_tail_mass,
    symbol_from_bernstein,
)

INF = math.inf
WITNESS_C2 = 1e3
WITNESS_EDGE = 1e6
SYMBOL_FACTOR = 2.0 * math.e / (math.e - 1.0)


class WitnessError(ValueError):
    """No growth witness exists for the requested exponent."""


@dataclass(frozen=True)
class GrowthWitness:
    """``g(u) >= C1 u^exponent`` for ``u >= C2`` (kind ``lower``) or
    ``g(u) <= C1 u^exponent`` for ``0 < u <= C2`` (kind ``upper``).

    ``g`` is phi, Re psi or |psi| depending on the source.
    """

    C1: float
    C2: float
    exponent: float
    regime: str = "to-infinity"
    kind: str = "lower"
    source: str = "grid"

    def __post_init__(self):
        if not self.C1 > 0:
            raise WitnessError(f"witness constant C1 must be positive, got {self.C1}")
        if self.C2 < 0:
            raise WitnessError(f"witness threshold C2 must be nonnegative, got {self.C2}")

    def to_dict(self) -> dict:
        return asdict(self)


def _as_array(t):
    arr = np.asarray(t, dtype=float)
    if np.any(arr <= 0):
        raise ValueError("t must be positive")
    return arr


def _out(v, t):
    return float(v) if np.ndim(t) == 0 else v


# ---------------------------------------------------------------------------
# witnesses

def lower_witness(subject, exponent: float, C2: float = WITNESS_C2) -> GrowthWitness:
    """Grid witness ``g(u) >= C1 u^exponent`` on ``[C2, 1e6]``.

    ``subject`` is a BernsteinFunction (g = phi) or a symbol (g = Re psi).
    Raises WitnessError when the liminf condition fails.
    """
    lp = liminf_positive(subject, exponent)
    if not lp.holds:
        raise WitnessError(
            f"liminf g(u) u^-{exponent:g} > 0 fails on the far grid "
            f"(proxy {lp.proxy:.3g}, trend {lp.slope:.3g}); no witness for this exponent")
    return GrowthWitness(lp.proxy, C2, exponent, "to-infinity", "lower", "grid")


def tuned_lower_witness(subject, exponent: float, objective, candidates: int = 37
                        ) -> GrowthWitness:
    """Lower witness whose threshold C2 minimises ``objective(witness)``.

    The liminf condition is first checked on the far grid (raising
    WitnessError when it fails); for each candidate ``C2`` in
    ``[1e-6, 1e3]`` the constant is ``C1 = min g(u) u^-exponent`` over a
    dense log grid on ``[C2, 1e6]``, which is no larger than the far-grid
    proxy that certifies the tail.
    """
    far = lower_witness(subject, exponent)
    g = growth_function(subject)
    u = np.logspace(-6, 6, 1201)
    with np.errstate(all="ignore"):
        ratio = np.asarray(g(u), dtype=float) * u ** (-exponent)
    ratio = np.where(np.isfinite(ratio) & (ratio > 0), ratio, 0.0)
    suffix_min = np.minimum.accumulate(ratio[::-1])[::-1]
    best, best_val = far, objective(far)
    for C2 in np.logspace(-6, 3, candidates):
        C1 = float(suffix_min[np.searchsorted(u, C2 * (1 - 1e-12))])
        if not C1 > 0:
            continue
        w = GrowthWitness(min(C1, far.C1), float(C2), exponent, "to-infinity", "lower", "grid")
        val = objective(w)
        if val < best_val:
            best, best_val = w, val
    return best


def exact_witness(C1: float, exponent: float) -> GrowthWitness:
    """Global witness (C2 = 0), e.g. ``phi(u) = C1 u^rho`` exactly."""
    return GrowthWitness(C1, 0.0, exponent, "to-infinity", "lower", "analytic")


def symbol_upper_witness(psi, beta: float, all_xi: bool = False, points: int = 241
                         ) -> GrowthWitness:
    """``|psi(xi)| <= C_beta |xi|^beta`` on ``0 < |xi| <= 1`` (or on a grid
    over ``[1e-6, 1e6]`` when ``all_xi``), C_beta the grid supremum."""
    psi = as_symbol(psi)
    hi = 6 if all_xi else 0
    r = np.logspace(-6, hi, points)
    ratio = np.abs(psi.profile(r)) * r ** (-beta)
    C = float(np.max(ratio))
    if not math.isfinite(C) or C <= 0:
        raise WitnessError(f"|psi| |xi|^-{beta:g} is not bounded on the grid")
    return GrowthWitness(C, INF if all_xi else 1.0, beta, "to-zero", "upper",
                         "grid-all" if all_xi else "grid")


# ---------------------------------------------------------------------------
# absolute moments of Lévy processes

def _require_no_gaussian(tr: LevyTriplet):
    if not tr.gaussian_free:
        raise ValueError("this bound needs Q = 0")


def small_time_constants(triplet, kappa: float) -> dict:
    tr = as_triplet(triplet)
    _require_no_gaussian(tr)
    return {
        "ell_norm": float(np.linalg.norm(tr.ell)),
        "tail_moment": nu_frac_moment(tr.nu, kappa, "outer").value,
        "inner_second_moment": nu_frac_moment(tr.nu, 2.0, "inner").value,
        "big_jump_mass": nu_tail_mass(tr.nu, 1.0).value,
        "d": tr.d,
    }


def bound_abs_moment_small_time(triplet, kappa: float, t):
    """``E|X_t|^kappa`` bound for Q = 0, kappa in (0, 1]::

        |l|^k t^k + T t + 2 (d/2 k (3-k) I2)^{k/2} [1 + N t]^{1-k/2} t^{k/2}

    with T the tail moment of order kappa, I2 the inner second moment and
    N = nu(|y| >= 1).
    """
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    c = small_time_constants(triplet, kappa)
    ta = _as_array(t)
    if not math.isfinite(c["tail_moment"]):
        return _out(np.full_like(ta, INF), t)
    jump = (c["d"] / 2 * kappa * (3 - kappa) * c["inner_second_moment"]) ** (kappa / 2)
    v = (c["ell_norm"] ** kappa * ta ** kappa + c["tail_moment"] * ta
         + 2.0 * jump * (1.0 + c["big_jump_mass"] * ta) ** (1 - kappa / 2) * ta ** (kappa / 2))
    return _out(v, t)


class _BVObjective:
    """``theta -> [|l_hat|^theta t^theta + J(theta) t]^{kappa/theta}`` with J cached."""

    def __init__(self, triplet: LevyTriplet, kappa: float):
        self.kappa = kappa
        lh = triplet.ell_hat()
        self.ell_hat = None if lh is None else float(np.linalg.norm(lh))
        nu = triplet.nu

        @lru_cache(maxsize=4096)
        def J(theta: float) -> float:
            return nu_frac_moment(nu, theta, "full").value

        self.J = J

    def __call__(self, theta: float, t: float) -> float:
        j = self.J(float(theta))
        if not math.isfinite(j):
            return INF
        inner = self.ell_hat ** theta * t ** theta + j * t
        return inner ** (self.kappa / theta)


def bound_abs_moment_bv(triplet, kappa: float, t, return_theta: bool = False):
    """``E|X_t|^kappa <= inf_{theta in [kappa,1]} [|l_hat|^theta t^theta + J(theta) t]^{kappa/theta}``

    for Q = 0, with ``J(theta) = int |y|^theta nu(dy)``. The infimum uses a
    64-point grid refined by golden section. Returns inf when ``l_hat`` does
    not exist or every J(theta) diverges.
    """
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    tr = as_triplet(triplet)
    _require_no_gaussian(tr)
    obj = _BVObjective(tr, kappa)
    ta = _as_array(t)
    vals = np.empty(ta.shape)
    thetas = np.empty(ta.shape)
    for i, ti in enumerate(ta.flat):
        if obj.ell_hat is None:
            vals.flat[i], thetas.flat[i] = INF, math.nan
            continue
        if kappa == 1:
            th, v = 1.0, obj(1.0, ti)
        else:
            th, v = minimize_1d(lambda th: obj(th, ti), kappa, 1.0)
        vals.flat[i], thetas.flat[i] = v, th
    if return_theta:
        return _out(vals, t), _out(thetas, t)
    return _out(vals, t)


@dataclass(frozen=True)
class TimeBound:
    """``t -> prefactor * t^exponent`` for ``t >= 1`` and
    ``small_t_linear * t + small_t_const`` for ``t < 1``; when the small-t
    coefficients are None the power form holds for every t."""

    prefactor: float
    exponent: float
    small_t_linear: float | None = None
    small_t_const: float | None = None
    description: str = ""

    def __call__(self, t):
        ta = _as_array(t)
        big = self.prefactor * ta ** self.exponent
        if self.small_t_linear is None:
            return _out(big, t)
        small = self.small_t_linear * ta + self.small_t_const
        return _out(np.where(ta >= 1, big, small), t)

    def to_dict(self) -> dict:
        return asdict(self)


def bound_abs_moment_symbol(psi, d: int, kappa: float, beta: float,
                            witness: GrowthWitness | None = None) -> TimeBound:
    """``E|X_t|^kappa <= c_{k,d} s_d t^{k/beta} (C_beta/(beta-k) + 2/k)``.

    The witness ``|psi(xi)| <= C_beta |xi|^beta`` on ``0 < |xi| <= 1`` gives
    the bound for t >= 1; for t < 1 the same splitting at ``|xi| = 1`` gives
    ``c s_d (t C_beta/(beta-k) + 2/k)``. A witness valid for all xi
    (``C2 = inf``) makes the power form valid for every t > 0.
    """
    if not 0 < kappa < beta:
        raise ValueError(f"need 0 < kappa < beta, got kappa={kappa}, beta={beta}")
    if not beta <= 2:
        raise ValueError(f"beta must be at most 2, got {beta}")
    if witness is None:
        witness = symbol_upper_witness(psi, beta)
    C = witness.C1
    pref = riesz_c(kappa, d) * surface_area(d)
    if witness.C2 == INF:
        return TimeBound(pref * (C / (beta - kappa) + 2.0 / kappa), kappa / beta,
                         description="symbol bound, witness on all xi")
    return TimeBound(pref * (C / (beta - kappa) + 2.0 / kappa), kappa / beta,
                     small_t_linear=pref * C / (beta - kappa), small_t_const=pref * 2.0 / kappa,
                     description="symbol bound, witness on |xi| <= 1")


def subordinator_symbol_constant(phi: BernsteinFunction, sigma: float, points: int = 241
                                 ) -> float:
    """``sup_{0<u<=1} phi(u) u^{-sigma}`` on a log grid over ``[1e-6, 1]``."""
    u = np.logspace(-6, 0, points)
    return float(np.max(phi.phi(u) * u ** (-sigma)))


def bound_sub_pos_moment_symbol(phi: BernsteinFunction, kappa: float, sigma: float
                                ) -> TimeBound:
    """``E S_t^kappa <= C_{k,sigma} (t v 1)^{k/sigma}`` for kappa in (0, sigma).

    Uses ``|phi(-i xi)| <= (2e/(e-1)) phi(|xi|)``, so the symbol witness is
    ``C_beta = (2e/(e-1)) sup_{(0,1]} phi(u) u^{-sigma}`` with beta = sigma.
    Since S is increasing, ``E S_t^k <= E S_1^k`` for t < 1.
    """
    if not 0 < kappa < sigma <= 1:
        raise ValueError(f"need 0 < kappa < sigma <= 1, got kappa={kappa}, sigma={sigma}")
    Cs = subordinator_symbol_constant(phi, sigma)
    w = GrowthWitness(SYMBOL_FACTOR * Cs, 1.0, sigma, "to-zero", "upper", "symbol-factor")
    tb = bound_abs_moment_symbol(symbol_from_bernstein(phi), 1, kappa, sigma, w)
    return TimeBound(tb.prefactor, tb.exponent, small_t_linear=0.0, small_t_const=tb.prefactor,
                     description="subordinator symbol bound, (t v 1)^{k/sigma}")


def bound_neg_moment_symbol(psi, d: int, kappa: float, witness: GrowthWitness):
    """``E|X_t|^{-k} <= s_d/c'_{k,d} (C2^k/k + t^{-k/delta} Gamma(k/delta)/(delta C1^{k/delta}))``

    with the witness ``Re psi(xi) >= C1 |xi|^delta`` for ``|xi| >= C2``.
    Returns a callable of t.
    """
    if not 0 < kappa < d:
        raise ValueError(f"kappa must lie in (0, d={d}), got {kappa}")
    delta, C1, C2 = witness.exponent, witness.C1, witness.C2
    pref = surface_area(d) / riesz_c_prime(kappa, d)
    head = C2 ** kappa / kappa
    coef = math.gamma(kappa / delta) / (delta * C1 ** (kappa / delta))

    def bound(t):
        ta = _as_array(t)
        return _out(pref * (head + ta ** (-kappa / delta) * coef), t)

    return bound


# ---------------------------------------------------------------------------
# exponential moments of Lévy processes

def exp_abs_constants(triplet, kappa: float, lam: float) -> dict:
    tr = as_triplet(triplet)
    _require_no_gaussian(tr)
    I2 = nu_frac_moment(tr.nu, 2.0, "inner").value
    C1 = tr.d / 2 * kappa * (lam * kappa + 3 - kappa) * math.exp(2 * lam) * I2
    if tr.nu.is_zero:
        ext, N = 0.0, 0.0
    else:
        ext = nu_exp_moment(tr.nu, lam, kappa, "outer").value
        N = nu_tail_mass(tr.nu, 1.0).value
    C2 = math.exp(lam) * ext - N if math.isfinite(ext) else INF
    return {"C1": C1, "C2": C2, "ell_norm": float(np.linalg.norm(tr.ell))}


def bound_exp_abs_moment(triplet, kappa: float, lam: float, t):
    """``E exp(lam |X_t|^kappa)`` for Q = 0, kappa in (0, 1]::

        exp(lam |l|^k t^k) * min_eps exp[lam eps^{k/2} (1 + C1 t / eps) + C2 t]

    over eps in (0, 1]; the minimiser ``eps* = C1 t (2-k)/k`` is clamped to
    (0, 1] and compared with eps = 1. ``C1 = 0`` gives the eps -> 0 limit
    ``exp(C2 t)``.
    """
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    c = exp_abs_constants(triplet, kappa, lam)
    ta = _as_array(t)
    if not math.isfinite(c["C2"]):
        return _out(np.full_like(ta, INF), t)
    C1, C2 = c["C1"], c["C2"]

    def log_h(eps, tt):
        return lam * eps ** (kappa / 2) * (1.0 + C1 * tt / eps) + C2 * tt

    if C1 == 0:
        logv = C2 * ta
    else:
        eps_star = np.clip(C1 * ta * (2 - kappa) / kappa, 1e-300, 1.0)
        logv = np.minimum(log_h(eps_star, ta), log_h(1.0, ta))
    logv = logv + lam * c["ell_norm"] ** kappa * ta ** kappa
    with np.errstate(over="ignore"):
        return _out(np.exp(logv), t)


def bound_exp_abs_moment_bv(triplet, kappa: float, lam: float, t):
    """``E exp(lam|X_t|^k) <= exp[lam |l_hat|^k t^k + M_{k,lam} t]``.

    Needs ``int_{0<|y|<1} |y|^k nu(dy) < inf`` and exponential tails;
    returns inf otherwise.
    """
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    tr = as_triplet(triplet)
    _require_no_gaussian(tr)
    ta = _as_array(t)
    inner = nu_frac_moment(tr.nu, kappa, "inner")
    lh = tr.ell_hat()
    if inner.divergent or lh is None:
        return _out(np.full_like(ta, INF), t)
    M = 0.0 if tr.nu.is_zero else M_kappa_lambda(tr.nu, lam, kappa).value
    if not math.isfinite(M):
        return _out(np.full_like(ta, INF), t)
    with np.errstate(over="ignore"):
        v = np.exp(lam * float(np.linalg.norm(lh)) ** kappa * ta ** kappa + M * ta)
    return _out(v, t)


def bound_sub_exp_pos_no_big_jumps(phi: BernsteinFunction, kappa2: float, lam: float, t):
    """``E exp(lam S_t^k2) <= exp[lam + t (b lam + int_(0,1) (e^{lam y} - 1) nu(dy))]``

    for subordinators without jumps of size >= 1.
    """
    if not 0 < kappa2 <= 1:
        raise ValueError(f"kappa2 must lie in (0, 1], got {kappa2}")
    if not lam >= 0:
        raise ValueError(f"lambda must be nonnegative, got {lam}")
    if nu_tail_mass(phi.nu, 1.0).value > 0:
        raise ValueError("the Lévy measure charges [1, inf); this bound needs nu[1, inf) = 0")
    ta = _as_array(t)
    if lam == 0:
        return _out(np.ones_like(ta), t)
    integral = phi.nu.integrate_radial(lambda y: np.expm1(lam * y), 0.0, 1.0,
                                       exponent=1.0).value
    with np.errstate(over="ignore"):
        return _out(np.exp(lam + ta * (phi.b * lam + integral)), t)


# ---------------------------------------------------------------------------
# negative moments of subordinators

def bound_sub_neg_moment(phi: BernsteinFunction | None, kappa: float, witness: GrowthWitness, t):
    """``E S_t^{-k} <= C2^k/(k Gamma(k)) + Gamma(k/rho)/(rho Gamma(k) (t C1)^{k/rho})``.

    ``phi`` is only used for documentation; the bound depends on the
    witness ``phi(u) >= C1 u^rho`` for ``u >= C2``.
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    rho, C1, C2 = witness.exponent, witness.C1, witness.C2
    if not 0 < rho <= 1:
        raise ValueError(f"rho must lie in (0, 1], got {rho}")
    ta = _as_array(t)
    with np.errstate(over="ignore"):
        tail = np.exp(special.gammaln(kappa / rho) - math.log(rho) - special.gammaln(kappa)
                      - (kappa / rho) * np.log(ta * C1))
    v = C2 ** kappa / (kappa * math.gamma(kappa)) + tail
    return _out(v, t)


@dataclass(frozen=True)
class ExpNegLedger:
    G: float
    H: float
    eps: float
    coef_G: float
    coef_H: float
    log_value: float


def sub_exp_neg_terms(kappa: float, lam: float, witness: GrowthWitness, t: float
                      ) -> ExpNegLedger:
    rho, C1, C2 = witness.exponent, witness.C1, witness.C2
    eps = 1.0 + kappa - kappa / rho
    if not (0 < eps <= 1):
        raise ValueError(f"need rho in (kappa/(1+kappa), 1]: rho={rho}, kappa={kappa}")
    G = lam * C2 ** kappa * math.exp(kappa + 1) * kappa ** (-kappa)
    H = (math.exp(kappa + 1) / kappa ** kappa * (kappa / (rho * math.e * C1)) ** (kappa / rho)
         * lam / t ** (kappa / rho))
    coef_G = 2.0 + 1.0 / (math.pi ** 2 * kappa) + 1.0 / (math.pi * math.sqrt(kappa))
    a = math.exp(rho / (12 * kappa)) / math.sqrt(2 * math.pi * rho)
    coef_H = 2.0 ** (2 - eps) * a * (2 * a + 1)
    log_value = coef_G * G + eps * math.exp(math.log(2 * H) / eps) + coef_H * H
    return ExpNegLedger(G, H, eps, coef_G, coef_H, log_value)


def bound_sub_exp_neg_moment(phi: BernsteinFunction | None, kappa: float, lam: float,
                             witness: GrowthWitness, t, log: bool = False):
    """``E exp(lam S_t^{-k})`` bound::

        exp[(2 + 1/(pi^2 k) + 1/(pi sqrt k)) G + eps (2H)^{1/eps}
            + 2^{2-eps} a (2a + 1) H]

    with ``G = lam C2^k e^{k+1} k^{-k}``,
    ``H = e^{k+1} k^{-k} (k/(rho e C1))^{k/rho} lam t^{-k/rho}``,
    ``eps = 1 + k - k/rho`` and ``a = e^{rho/(12k)} / sqrt(2 pi rho)``.
    Requires rho in (k/(1+k), 1]. With ``log=True`` the logarithm is
    returned (avoids overflow at small t).
    """
    if not (kappa > 0 and lam > 0):
        raise ValueError("kappa and lambda must be positive")
    ta = _as_array(t)
    logs = np.array([sub_exp_neg_terms(kappa, lam, witness, float(ti)).log_value
                     for ti in ta.flat]).reshape(ta.shape)
    if log:
        return _out(logs, t)
    with np.errstate(over="ignore"):
        return _out(np.exp(logs), t)


__all__ = [
    "GrowthWitness",
    "WitnessError",
    "TimeBound",
    "lower_witness",
    "exact_witness",
    "tuned_lower_witness",
    "symbol_upper_witness",
    "bound_abs_moment_small_time",
    "bound_abs_moment_bv",
    "bound_abs_moment_symbol",
    "bound_sub_pos_moment_symbol",
    "bound_neg_moment_symbol",
    "bound_exp_abs_moment",
    "bound_exp_abs_moment_bv",
    "bound_sub_exp_pos_no_big_jumps",
    "bound_sub_neg_moment",
    "bound_sub_exp_neg_moment",
    "sub_exp_neg_terms",
    "subordinator_symbol_constant",
]
