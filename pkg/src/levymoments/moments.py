"""Exact moments of subordinators and Lévy processes via integral identities.

* ``E S_t^{-k} = Gamma(k)^{-1} int_0^inf u^{k-1} e^{-t phi(u)} du``
* ``E S_t^{k} = k / Gamma(1-k) int_0^inf (1 - e^{-t phi(u)}) u^{-k-1} du``, 0 < k < 1
* ``E e^{lam S_t^{-k}} = 1 + int_0^inf e^{-t phi(u)} K(u) du`` with
  ``K(u) = sum_{n>=1} lam^n u^{nk-1} / (n! Gamma(nk))``
* ``E |X_t|^k = c_{k,d} s_d int_0^inf (1 - Re e^{-t psi(r)}) r^{-k-1} dr``, 0 < k < 2
* ``E |X_t|^{-k} <= s_d / c'_{k,d} int_0^inf r^{k-1} e^{-t Re psi(r)} dr``, 0 < k < d
  (equality when psi is real and radial).
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special

from .indices import estimate_indices, liminf_positive
from .numerics import (
    QuadratureError,
    integrate_semiinf,
    loglog_slope,
    riesz_c,
    riesz_c_prime,
    surface_area,
)
from .processes import (
    BernsteinFunction,
    CharacteristicExponent,
    LevyTriplet,
    M_kappa_lambda,
    as_symbol,
    nu_exp_moment,
    nu_frac_moment,
)

METHODS = ("exact-quadrature", "closed-form", "monte-carlo", "bound")
SERIES_TERMS = 500
SERIES_MAX_TERMS = 20000
SERIES_RTOL = 1e-10
EXP_NEG_CAP = 1e200
CRITERION_MARGIN = 0.05


@dataclass(frozen=True)
class MomentEstimate:
    value: float
    abs_error: float = 0.0
    method: str = "exact-quadrature"
    status: str = "finite"
    certificate: str | None = None

    def __post_init__(self):
        if self.method not in METHODS:
            raise ValueError(f"unknown method tag {self.method!r}")
        if self.status == "finite" and not (self.value >= 0 or math.isnan(self.value)):
            raise ValueError(f"moments are nonnegative, got {self.value}")
        if self.value == math.inf and self.certificate is None:
            raise ValueError("an infinite moment needs a certificate")

    @property
    def finite(self) -> bool:
        return self.status == "finite"

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def infinite(cls, certificate: str, method: str = "exact-quadrature") -> "MomentEstimate":
        return cls(math.inf, 0.0, method, "infinite", certificate)

    @classmethod
    def undecided(cls, reason: str, method: str = "exact-quadrature") -> "MomentEstimate":
        return cls(math.nan, math.inf, method, "undecided", reason)


def _from_quad(res, prefactor: float, method: str = "exact-quadrature") -> MomentEstimate:
    if res.divergent:
        return MomentEstimate.infinite(res.certificate, method)
    return MomentEstimate(prefactor * res.value, prefactor * res.abs_error_estimate, method)


def _crossover(g, target: float = 1.0, lo: float = 1e-12, hi: float = 1e12) -> float:
    """u with g(u) = target for increasing g, by bisection in log u (clamped)."""
    if g(lo) >= target:
        return lo
    if g(hi) <= target:
        return hi
    a, b = math.log(lo), math.log(hi)
    for _ in range(80):
        m = 0.5 * (a + b)
        if g(math.exp(m)) < target:
            a = m
        else:
            b = m
    return math.exp(0.5 * (a + b))


def _phi_scalar(phi: BernsteinFunction):
    return lambda u: float(np.asarray(phi.phi(np.array([u])))[0])


# ---------------------------------------------------------------------------
# subordinators

def sub_neg_moment_exact(phi: BernsteinFunction, kappa: float, t: float) -> MomentEstimate:
    """``E S_t^{-kappa}`` for kappa > 0, t > 0.

    Returns an infinite estimate with certificate when ``e^{-t phi}`` does
    not decay fast enough (e.g. bounded phi, or Gamma with alpha t <= kappa).
    """
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if phi.name == "drift":
        return MomentEstimate((phi.b * t) ** (-kappa), 0.0, "closed-form")
    f1 = _phi_scalar(phi)
    scale = _crossover(lambda u: t * f1(u))

    def integrand(u):
        return u ** (kappa - 1.0) * np.exp(-t * phi.phi(u))

    try:
        res = integrate_semiinf(integrand, kappa - 1.0, scale=scale)
    except QuadratureError as exc:
        return MomentEstimate.undecided(str(exc))
    return _from_quad(res, 1.0 / math.gamma(kappa))


def sub_pos_moment_exact(phi: BernsteinFunction, kappa: float, t: float) -> MomentEstimate:
    """``E S_t^kappa`` for kappa in (0, 1]."""
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if kappa == 1:
        first = phi.b + nu_frac_moment(phi.nu, 1.0).value
        if not math.isfinite(first):
            return MomentEstimate.infinite("int y nu(dy) diverges", "closed-form")
        return MomentEstimate(t * first, 0.0, "closed-form")
    f1 = _phi_scalar(phi)
    scale = _crossover(lambda u: t * f1(u))

    def integrand(u):
        return -np.expm1(-t * phi.phi(u)) * u ** (-kappa - 1.0)

    try:
        res = integrate_semiinf(integrand, None, scale=scale)
    except QuadratureError as exc:
        return MomentEstimate.undecided(str(exc))
    return _from_quad(res, kappa / math.gamma(1.0 - kappa))


def _log_k_terms(u: np.ndarray, kappa: float, lam: float, n_max: int) -> np.ndarray:
    n = np.arange(1, n_max + 1, dtype=float)
    lu = np.log(u)[..., None]
    return (n * math.log(lam) + (n * kappa - 1.0) * lu
            - special.gammaln(n + 1.0) - special.gammaln(n * kappa))


def k_series(u, kappa: float, lam: float, n_max: int = SERIES_TERMS) -> np.ndarray:
    """``K(u) = sum_n lam^n u^{n kappa - 1} / (n! Gamma(n kappa))`` (log-space sum)."""
    u = np.atleast_1d(np.asarray(u, dtype=float))
    terms = _log_k_terms(u, kappa, lam, n_max)
    return np.exp(special.logsumexp(terms, axis=-1))


def _log_k_envelope(u: np.ndarray, kappa: float, lam: float):
    """Peak index n* and an upper bound on log K(u).

    The terms are log-concave in n with the peak near n* solving
    ``log lam + kappa log u = log n + kappa log(n kappa)``; the sum is at
    most ``(3 n* + 1)`` times the peak term (with one unit of log slack).
    """
    with np.errstate(all="ignore"):
        x = (math.log(lam) + kappa * np.log(u) - kappa * math.log(kappa)) / (1.0 + kappa)
        nstar = np.maximum(np.exp(x), 1.0)
        peak = (nstar * math.log(lam) + (nstar * kappa - 1.0) * np.log(u)
                - special.gammaln(nstar + 1.0) - special.gammaln(nstar * kappa))
        envelope = peak + np.log(3.0 * nstar + 1.0) + 1.0
    return nstar, envelope


def _log_k_upper(u: np.ndarray, kappa: float, lam: float, n_max: int):
    """log K(u), whether the truncated series converged, and the envelope.

    The number of terms grows with the peak index (three times the largest
    peak, at most SERIES_MAX_TERMS).
    """
    nstar, envelope = _log_k_envelope(u, kappa, lam)
    finite_peak = nstar[np.isfinite(nstar)]
    if finite_peak.size:
        n_max = int(min(SERIES_MAX_TERMS, max(n_max, 3.0 * float(np.max(finite_peak)) + 50)))
    terms = _log_k_terms(u, kappa, lam, n_max)
    logk = special.logsumexp(terms, axis=-1)
    converged = terms[..., -1] < logk + math.log(SERIES_RTOL)
    return logk, converged, envelope


LOG_GRID = np.arange(-80.0, 160.0, 0.25)
LOG_DROP = 60.0
NEGLIGIBLE = -745.0
HEAD_RTOL = 1e-6


def _exp_neg_log_integrand(phi, kappa, lam, t, s):
    """``log[e^{-t phi(u)} K(u) u]`` at ``u = e^s``.

    Points whose envelope is already negligible give ``-inf`` without
    summing the series; NaN marks unconverged, non-negligible points.
    """
    s = np.atleast_1d(np.asarray(s, dtype=float))
    u = np.exp(s)
    tp = t * phi.phi(u)
    _, env = _log_k_envelope(u, kappa, lam)
    out = np.full(s.shape, -np.inf)
    live = ~(env - tp < NEGLIGIBLE)
    if np.any(live):
        logk, conv, _ = _log_k_upper(u[live], kappa, lam, SERIES_TERMS)
        out[live] = np.where(conv, logk - tp[live] + s[live], np.nan)
    return out


def _k_head(u0: float, kappa: float, lam: float) -> float:
    """``int_0^u0 K(u) du = sum_n lam^n u0^{n kappa} / (n! Gamma(n kappa + 1))``."""
    n = np.arange(1, SERIES_TERMS + 1, dtype=float)
    logs = (n * math.log(lam) + n * kappa * math.log(u0)
            - special.gammaln(n + 1.0) - special.gammaln(n * kappa + 1.0))
    return float(np.exp(special.logsumexp(logs)))


def _exp_neg_logspace(phi, kappa, lam, t):
    """Integrate in ``s = ln u`` when the log integrand is tabulated cleanly
    and drops by LOG_DROP before the right end of the grid; otherwise None.

    Below the grid ``e^{-t phi(u)}`` is within HEAD_RTOL of 1 (checked) and
    the head is summed in closed form with that relative error.
    """
    u0 = math.exp(LOG_GRID[0])
    head_rel = t * float(phi.phi(np.array([u0]))[0])
    if head_rel > HEAD_RTOL:
        return None
    with np.errstate(all="ignore"):
        L = _exp_neg_log_integrand(phi, kappa, lam, t, LOG_GRID)
    if np.any(np.isnan(L)) or np.any(L == np.inf):
        return None
    M = float(np.max(L))
    if not math.isfinite(M) or L[-1] > M - LOG_DROP:
        return None
    keep = np.nonzero(L > M - LOG_DROP)[0]
    lo = LOG_GRID[0]
    hi = LOG_GRID[min(keep[-1] + 1, len(LOG_GRID) - 1)]

    def h(x):
        with np.errstate(all="ignore"):
            v = _exp_neg_log_integrand(phi, kappa, lam, t, x)[0]
        return 0.0 if not np.isfinite(v) else math.exp(v - M)

    peak = float(LOG_GRID[int(np.argmax(L))])
    pts = [p for p in (peak,) if lo < p < hi]
    val, err = integrate.quad(h, lo, hi, points=pts or None, limit=400, epsrel=1e-10,
                              epsabs=0.0)
    if M > 700:
        return MomentEstimate(math.inf, math.inf, "exact-quadrature", "finite",
                              f"finite but above the double range (log value ~ {M:.4g})")
    head = _k_head(u0, kappa, lam)
    return MomentEstimate(1.0 + head + val * math.exp(M), err * math.exp(M) + head * head_rel)


def sub_exp_neg_moment_exact(phi: BernsteinFunction, kappa: float, lam: float, t: float,
                             use_criterion: bool = True, sigma_inf: float | None = None
                             ) -> MomentEstimate:
    """``E exp(lam S_t^{-kappa})``.

    With ``use_criterion`` the analytic criterion is tried first: if the
    growth index ``sigma_inf`` of phi at infinity is below 1 and
    ``kappa > sigma_inf / (1 - sigma_inf)`` (with a 0.05 safety margin on the
    estimate) the moment is infinite. Otherwise the series representation
    is integrated; numerical divergence (overflowing integrand or lower sums
    above the cap) is certified independently.
    """
    if not (kappa > 0 and lam > 0 and t > 0):
        raise ValueError("kappa, lambda and t must be positive")
    if phi.name == "drift":
        return MomentEstimate(math.exp(lam * (phi.b * t) ** (-kappa)), 0.0, "closed-form")
    if use_criterion:
        s = sigma_inf
        if s is None:
            s = float(np.clip(loglog_slope(phi.phi, "to-infinity").slope, 0.0, 1.0))
        if s < 1 and kappa > s / (1 - s) + CRITERION_MARGIN:
            return MomentEstimate.infinite(
                f"growth index sigma_inf={s:.4g} < 1 and kappa={kappa:g} > "
                f"sigma_inf/(1-sigma_inf)={s / (1 - s):.4g}: the Laplace exponent grows "
                f"too slowly for exp(lam S_t^-kappa) to be integrable", "exact-quadrature")

    def integrand(u):
        u = np.atleast_1d(np.asarray(u, dtype=float))
        logk, conv, env = _log_k_upper(u, kappa, lam, SERIES_TERMS)
        tp = t * phi.phi(u)
        with np.errstate(all="ignore"):
            val = np.exp(logk - tp)
            safe = env - tp < -745.0
            val = np.where(conv, val, np.where(safe, 0.0, np.inf))
        return val

    logspace = _exp_neg_logspace(phi, kappa, lam, t)
    if logspace is not None:
        return logspace
    f1 = _phi_scalar(phi)
    scale = _crossover(lambda u: t * f1(u))
    try:
        res = integrate_semiinf(integrand, kappa - 1.0, scale=scale, cap=EXP_NEG_CAP)
    except QuadratureError as exc:
        return MomentEstimate.undecided(str(exc))
    if res.divergent:
        return MomentEstimate.infinite(f"numerical: {res.certificate}")
    return MomentEstimate(1.0 + res.value, res.abs_error_estimate)


# ---------------------------------------------------------------------------
# Lévy processes

def _symbol_scale(psi: CharacteristicExponent, t: float) -> float:
    def g(r):
        return t * float(np.abs(psi.profile(np.array([r]))[0]))
    return _crossover(g)


def levy_abs_moment_exact(psi, d: int, kappa: float, t: float) -> MomentEstimate:
    """``E|X_t|^kappa``, 0 < kappa < 2, from the Riesz kernel identity.

    ``psi`` must be a d = 1 exponent or radial; non-radial d >= 2 input
    raises ValueError.
    """
    psi = as_symbol(psi)
    if not 0 < kappa < 2:
        raise ValueError(f"kappa must lie in (0, 2), got {kappa}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if psi.d != d:
        raise ValueError(f"symbol dimension {psi.d} does not match d={d}")
    if d >= 2 and not psi.radial:
        raise ValueError("levy_abs_moment_exact needs a radial symbol in d >= 2")
    probe = psi.profile(np.logspace(-6, 6, 13))
    if np.all(np.abs(probe) == 0):
        return MomentEstimate(0.0, 0.0, "closed-form")

    def integrand(r):
        p = psi.profile(np.atleast_1d(r))
        a, b = t * p.real, t * p.imag
        one_minus = -np.expm1(-a) * np.cos(b) + 2.0 * np.sin(0.5 * b) ** 2
        return one_minus * np.atleast_1d(r) ** (-kappa - 1.0)

    scale = _symbol_scale(psi, t)
    try:
        res = integrate_semiinf(integrand, None, scale=scale, limit=1000)
    except QuadratureError as exc:
        return MomentEstimate.undecided(str(exc))
    return _from_quad(res, riesz_c(kappa, d) * surface_area(d))


def levy_neg_moment_upper(psi, d: int, kappa: float, t: float) -> MomentEstimate:
    """Upper bound on ``E|X_t|^{-kappa}``, 0 < kappa < d (method tag ``bound``)."""
    psi = as_symbol(psi)
    if not 0 < kappa < d:
        raise ValueError(f"kappa must lie in (0, d={d}), got {kappa}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if d >= 2 and not psi.radial:
        raise ValueError("levy_neg_moment_upper needs a radial symbol in d >= 2")

    def integrand(r):
        return np.atleast_1d(r) ** (kappa - 1.0) * np.exp(-t * psi.profile(np.atleast_1d(r)).real)

    scale = _symbol_scale(psi, t)
    try:
        res = integrate_semiinf(integrand, kappa - 1.0, scale=scale)
    except QuadratureError as exc:
        return MomentEstimate.undecided(str(exc), "bound")
    return _from_quad(res, surface_area(d) / riesz_c_prime(kappa, d), "bound")


# ---------------------------------------------------------------------------
# finiteness classification

@dataclass(frozen=True)
class FinitenessDecision:
    status: str
    reason: str
    criterion: str

    def to_dict(self) -> dict:
        return asdict(self)


KINDS = ("abs", "exp_abs", "neg", "exp_neg")


def classify_finiteness(obj, kind: str, kappa: float, lam: float | None = None
                        ) -> FinitenessDecision:
    """Decide whether a moment is finite, infinite or unknown.

    Parameters
    ----------
    obj : LevyTriplet or BernsteinFunction
    kind : {'abs', 'exp_abs', 'neg', 'exp_neg'}
        ``E|X_t|^k``, ``E e^{lam |X_t|^k}``, ``E|X_t|^{-k}``,
        ``E e^{lam |X_t|^{-k}}``.

    The ``criterion`` field names the rule that decided:

    ``tail-moment``
        ``E|X_t|^k < inf`` iff ``int_{|y|>=1} |y|^k nu(dy) < inf``.
    ``tail-exp-moment``
        for k <= 1, ``E e^{lam|X_t|^k} < inf`` iff
        ``int_{|y|>=1} e^{lam |y|^k} nu(dy) < inf``.
    ``superlinear-exp-moment``
        ``nu != 0`` and k > 1 force ``E e^{lam|X_t|^k} = inf``.
    ``real-symbol-negative-moment``
        a real symbol gives ``E|X_t|^{-k} = inf`` for every k >= d.
    ``real-symbol-exp-negative-moment``
        a real symbol gives ``E e^{lam|X_t|^{-k}} = inf``.
    ``slow-laplace-exponent``
        a subordinator with ``sigma_inf < 1`` and
        ``k > sigma_inf / (1 - sigma_inf)`` has ``E e^{lam S_t^{-k}} = inf``.
    ``power-growth``
        ``phi(u) >= C u^rho`` at infinity gives finite negative moments,
        and finite exponential negative moments when ``k < rho / (1 - rho)``.
    ``bounded-laplace-exponent``
        compound Poisson subordinators charge 0, so negative moments are infinite.
    """
    if kind not in KINDS:
        raise ValueError(f"unknown moment kind {kind!r}; expected one of {KINDS}")
    if not kappa > 0:
        raise ValueError(f"kappa must be positive, got {kappa}")
    if kind in ("exp_abs", "exp_neg") and not (lam is not None and lam > 0):
        raise ValueError("exponential moments need lambda > 0")
    phi = obj if isinstance(obj, BernsteinFunction) else getattr(obj, "bernstein", None)
    triplet = obj if isinstance(obj, LevyTriplet) else LevyTriplet.from_bernstein(obj)
    nu, d = triplet.nu, triplet.d
    psi = triplet.symbol()
    real_symbol = psi.is_real()

    if kind == "abs":
        tail = nu_frac_moment(nu, kappa, "outer")
        if tail.divergent:
            return FinitenessDecision("infinite", f"int_{{|y|>=1}} |y|^{kappa:g} nu(dy) = inf",
                                      "tail-moment")
        return FinitenessDecision("finite", f"int_{{|y|>=1}} |y|^{kappa:g} nu(dy) = "
                                            f"{tail.value:.6g} < inf", "tail-moment")

    if kind == "exp_abs":
        if kappa > 1:
            if not nu.is_zero:
                return FinitenessDecision(
                    "infinite", f"nu != 0 and kappa={kappa:g} > 1", "superlinear-exp-moment")
            if triplet.gaussian_free:
                return FinitenessDecision("finite", "deterministic linear motion",
                                          "deterministic")
            if kappa < 2:
                return FinitenessDecision("finite", "Gaussian tails dominate e^{lam|x|^k}, k < 2",
                                          "gaussian-tail")
            if kappa > 2:
                return FinitenessDecision("infinite", "Gaussian tails lose to e^{lam|x|^k}, k > 2",
                                          "gaussian-tail")
            return FinitenessDecision("unknown", "k = 2 depends on lambda and Q", "gaussian-tail")
        ext = nu_exp_moment(nu, lam, kappa, "outer") if not nu.is_zero else None
        if ext is not None and ext.divergent:
            return FinitenessDecision(
                "infinite", f"int_{{|y|>=1}} e^{{{lam:g}|y|^{kappa:g}}} nu(dy) = inf "
                            f"({ext.certificate})", "tail-exp-moment")
        return FinitenessDecision("finite", "exponential tail integral of nu is finite",
                                  "tail-exp-moment")

    if kind == "neg":
        if real_symbol and kappa >= d:
            return FinitenessDecision(
                "infinite", f"psi is real-valued and kappa={kappa:g} >= d={d}",
                "real-symbol-negative-moment")
        if phi is not None:
            if phi.b == 0 and nu.density is None:
                return FinitenessDecision("infinite", "compound Poisson subordinator: "
                                                      "P(S_t = 0) > 0",
                                          "bounded-laplace-exponent")
            rho = _rho_inf(phi)
            if rho > 0 and liminf_positive(phi, 0.9 * rho).holds:
                return FinitenessDecision("finite", f"phi(u) >= C u^{0.9 * rho:.3g} at infinity",
                                          "power-growth")
            return FinitenessDecision("unknown", "phi grows slower than any power; finiteness "
                                                 "depends on t", "power-growth")
        if kappa < d:
            rep = estimate_indices(psi)
            dl = rep.delta_inf
            if dl is not None and dl > 0 and liminf_positive(psi, 0.9 * dl).holds:
                return FinitenessDecision(
                    "finite", f"Re psi >= C |xi|^{0.9 * dl:.3g} at infinity", "power-growth")
        return FinitenessDecision("unknown", "no criterion applies", "none")

    # exp_neg
    if real_symbol:
        return FinitenessDecision("infinite", "psi is real-valued",
                                  "real-symbol-exp-negative-moment")
    if phi is not None:
        if phi.b == 0 and nu.density is None:
            return FinitenessDecision("infinite", "compound Poisson subordinator: "
                                                  "P(S_t = 0) > 0", "bounded-laplace-exponent")
        s = _rho_inf(phi)
        if s < 1 and kappa > s / (1 - s) + CRITERION_MARGIN:
            return FinitenessDecision(
                "infinite", f"sigma_inf={s:.4g} < 1 and kappa={kappa:g} > "
                            f"sigma_inf/(1-sigma_inf)={s / (1 - s):.4g}",
                "slow-laplace-exponent")
        if 0 < s < 1 and kappa < s / (1 - s) - CRITERION_MARGIN:
            return FinitenessDecision(
                "finite", f"kappa={kappa:g} < rho_inf/(1-rho_inf)={s / (1 - s):.4g}",
                "power-growth")
        if s >= 1:
            return FinitenessDecision("finite", "phi grows linearly", "power-growth")
    return FinitenessDecision("unknown", "no criterion applies", "none")


def _rho_inf(phi: BernsteinFunction) -> float:
    """Regression exponent of phi at infinity (estimates sigma_inf = rho_inf
    for regularly varying phi)."""
    return float(np.clip(loglog_slope(phi.phi, "to-infinity").slope, 0.0, 1.0))


__all__ = [
    "MomentEstimate",
    "FinitenessDecision",
    "sub_neg_moment_exact",
    "sub_pos_moment_exact",
    "sub_exp_neg_moment_exact",
    "levy_abs_moment_exact",
    "levy_neg_moment_upper",
    "classify_finiteness",
    "k_series",
    "M_kappa_lambda",
]
