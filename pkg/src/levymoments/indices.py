"""Growth indices of Bernstein functions and Lévy symbols, and the
subordinator hypotheses used by the Harnack compositions.

Every index is a power-law exponent of ``phi``, ``|psi|`` or ``Re psi`` at 0
or at infinity and is estimated by log-log regression over three decades.
For regularly varying functions the sup- and inf-type definitions agree with
that slope; when the fit residual exceeds ``threshold`` the index is listed
in ``unresolved`` instead of being trusted.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .numerics import loglog_slope, regime_grid
from .processes import (
    BernsteinFunction,
    CharacteristicExponent,
    LevyTriplet,
    nu_frac_moment,
    symbol_from_bernstein,
)

RESIDUAL_THRESHOLD = 0.05
POSITIVITY_FLOOR = 1e-10
TREND_TOL = 0.01
SNAP_ZERO = 0.02
INDEX_NAMES = ("sigma0", "rho0", "sigma_inf", "rho_inf", "beta0", "delta0", "beta_inf",
               "delta_inf")


@dataclass
class IndexReport:
    sigma0: float | None = None
    rho0: float | None = None
    sigma_inf: float | None = None
    rho_inf: float | None = None
    beta0: float | None = None
    delta0: float | None = None
    beta_inf: float | None = None
    delta_inf: float | None = None
    residuals: dict = field(default_factory=dict)
    unresolved: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)

    def values(self) -> dict:
        return {k: getattr(self, k) for k in INDEX_NAMES}


@dataclass
class LiminfResult:
    holds: bool
    proxy: float
    slope: float
    threshold: float
    exponent: float
    regime: str

    def __bool__(self) -> bool:
        return self.holds

    def __iter__(self):
        yield self.holds
        yield self.proxy


@dataclass
class HypothesisReport:
    h1: bool
    h2: bool
    h3: bool
    h4: bool
    witness_rho: float
    witness_sigma: float
    kappa1: float
    kappa2: float
    evidence: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        return asdict(self)

    def failed(self, needed=("h1", "h2", "h3", "h4")) -> list[str]:
        return [h.upper() for h in needed if not getattr(self, h)]


def _safe_slope(g, regime: str):
    try:
        return loglog_slope(g, regime)
    except ValueError:
        return None


def _record(report: IndexReport, names, fit, threshold: float, clip=None, empty=None):
    for name in names:
        if fit is None:
            setattr(report, name, empty)
            report.residuals[name] = math.inf
            if empty is None:
                report.unresolved.append(name)
            continue
        v = fit.slope
        if clip is not None:
            v = float(np.clip(v, clip[0], clip[1]))
        setattr(report, name, v)
        report.residuals[name] = fit.residual
        if fit.residual > threshold:
            report.unresolved.append(name)


def _bernstein_fits(phi: BernsteinFunction):
    return (_safe_slope(phi.phi, "to-zero"), _safe_slope(phi.phi, "to-infinity"))


def estimate_indices(subject, threshold: float = RESIDUAL_THRESHOLD) -> IndexReport:
    """Estimate the eight growth indices of a subordinator or Lévy symbol.

    Parameters
    ----------
    subject : BernsteinFunction, LevyTriplet or CharacteristicExponent
        Bernstein functions give sigma/rho from ``phi`` and beta/delta from
        ``psi(xi) = phi(-i xi)``; symbols only give beta/delta.
    threshold : float
        Residual above which an index is reported as unresolved.

    Notes
    -----
    When ``Re psi`` vanishes identically (pure drift) the delta indices take
    their empty-set values ``delta_inf = 0`` and ``delta0 = inf``.
    """
    report = IndexReport()
    phi = None
    if isinstance(subject, BernsteinFunction):
        phi = subject
        psi = symbol_from_bernstein(subject)
    elif isinstance(subject, LevyTriplet):
        phi = subject.bernstein
        psi = subject.symbol()
    elif isinstance(subject, CharacteristicExponent):
        psi = subject
    else:
        raise TypeError(f"cannot estimate indices of {type(subject).__name__}")

    if phi is not None:
        f0, finf = _bernstein_fits(phi)
        _record(report, ("sigma0", "rho0"), f0, threshold, clip=(0.0, 1.0))
        _record(report, ("sigma_inf", "rho_inf"), finf, threshold, clip=(0.0, 1.0))

    abs_psi = lambda r: np.abs(psi.profile(r))  # noqa: E731
    re_psi = lambda r: psi.profile(r).real  # noqa: E731
    _record(report, ("beta0",), _safe_slope(abs_psi, "to-zero"), threshold)
    _record(report, ("beta_inf",), _safe_slope(abs_psi, "to-infinity"), threshold,
            clip=(0.0, 2.0))
    d0 = _safe_slope(re_psi, "to-zero")
    dinf = _safe_slope(re_psi, "to-infinity")
    zero_re = _re_vanishes(re_psi)
    _record(report, ("delta0",), d0, threshold, empty=math.inf if zero_re else None)
    _record(report, ("delta_inf",), dinf, threshold, clip=(0.0, 2.0),
            empty=0.0 if zero_re else None)
    return report


def _re_vanishes(re_psi) -> bool:
    r = np.logspace(-6, 6, 25)
    return bool(np.all(np.abs(re_psi(r)) <= 1e-14 * (1 + r)))


def liminf_positive(subject, rho: float, regime: str = "to-infinity",
                    floor: float = POSITIVITY_FLOOR, tol: float = TREND_TOL) -> LiminfResult:
    """Decide ``liminf phi(u) u^{-rho} > 0`` (or ``Re psi``) on a far grid.

    The proxy is the grid minimum of ``phi(u) u^{-rho}`` over three decades
    (``[1e3, 1e6]`` at infinity, ``[1e-6, 1e-3]`` at zero); the condition
    holds when the proxy exceeds ``floor`` and the fitted exponent of the
    ratio is at least ``-tol`` (its trend does not go to 0). The proxy is
    the constant C1 of a growth witness with C2 the grid's left edge.
    """
    g = growth_function(subject)
    u = regime_grid(regime)
    with np.errstate(all="ignore"):
        vals = np.asarray(g(u), dtype=float) * u ** (-rho)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        return LiminfResult(False, 0.0, -math.inf, float(u[0]), rho, regime)
    fit = loglog_slope(lambda x: np.asarray(g(x), dtype=float) * x ** (-rho), regime)
    slope = fit.slope if regime == "to-infinity" else -fit.slope
    proxy = float(np.min(vals))
    holds = proxy > floor and slope >= -tol
    return LiminfResult(bool(holds), proxy, float(fit.slope), float(u[0]), rho, regime)


def limsup_finite(subject, sigma: float, regime: str = "to-zero",
                  tol: float = TREND_TOL, cap: float = 1e12) -> LiminfResult:
    """Decide ``limsup phi(u) u^{-sigma} < inf`` on the near (or far) grid.

    The proxy is the grid maximum; the condition holds when it is finite,
    below ``cap`` and the ratio does not grow toward the limit point.
    """
    g = growth_function(subject)
    u = regime_grid(regime)
    with np.errstate(all="ignore"):
        vals = np.asarray(g(u), dtype=float) * u ** (-sigma)
    if not np.all(np.isfinite(vals)) or np.any(vals <= 0):
        return LiminfResult(False, math.inf, math.nan, float(u[-1]), sigma, regime)
    fit = loglog_slope(lambda x: np.asarray(g(x), dtype=float) * x ** (-sigma), regime)
    growth = -fit.slope if regime == "to-zero" else fit.slope
    proxy = float(np.max(vals))
    holds = proxy < cap and growth <= tol
    return LiminfResult(bool(holds), proxy, float(fit.slope), float(u[-1]), sigma, regime)


def growth_function(subject):
    if isinstance(subject, BernsteinFunction):
        return subject.phi
    if isinstance(subject, LevyTriplet):
        if subject.bernstein is not None:
            return subject.bernstein.phi
        subject = subject.symbol()
    if isinstance(subject, CharacteristicExponent):
        return lambda r: subject.profile(r).real
    if callable(subject):
        return subject
    raise TypeError(f"unsupported subject {type(subject).__name__}")


def h3_infimum(phi: BernsteinFunction, kappa2: float, points: int = 33) -> tuple[float, float]:
    """``inf_{theta in [kappa2, 1]} int y^theta nu(dy)`` on a theta grid.

    Returns (infimum, argmin theta); the infimum is ``inf`` when every
    theta gives a divergent integral.
    """
    if phi.nu.is_zero:
        return 0.0, kappa2
    best, arg = math.inf, kappa2
    for theta in np.linspace(kappa2, 1.0, points):
        v = nu_frac_moment(phi.nu, float(theta), "full").value
        if v < best:
            best, arg = v, float(theta)
    return best, arg


def _snap(fit) -> float:
    """Fitted exponent clipped to [0, 1]; estimates at or below SNAP_ZERO are
    treated as 0 (slowly varying growth such as log(1+u) is not a power)."""
    if fit is None:
        return 0.0
    v = float(np.clip(fit.slope, 0.0, 1.0))
    return 0.0 if v <= SNAP_ZERO else v


def check_hypotheses(phi: BernsteinFunction, kappa1: float, kappa2: float,
                     rho: float | None = None, sigma: float | None = None,
                     report: IndexReport | None = None) -> HypothesisReport:
    """Decide the four subordinator hypotheses for given exponents.

    Parameters
    ----------
    kappa1, kappa2 : float
        Exponents of the input Harnack profile, kappa1 > 0, kappa2 in (0, 1].
    rho, sigma : float, optional
        Witness exponents; default to 0.9 times the estimated rho_inf and
        sigma_0.
    """
    if not kappa1 > 0:
        raise ValueError(f"kappa1 must be positive, got {kappa1}")
    if not 0 < kappa2 <= 1:
        raise ValueError(f"kappa2 must lie in (0, 1], got {kappa2}")
    if rho is None or sigma is None:
        f0, finf = _bernstein_fits(phi)
        if rho is None:
            rho = 0.9 * _snap(finf)
        if sigma is None:
            sigma = 0.9 * _snap(f0)
    evidence: dict = {}
    if rho > 0:
        lp = liminf_positive(phi, rho)
        h1 = lp.holds
        evidence["h1_proxy"] = lp.proxy
        evidence["h1_slope"] = lp.slope
    else:
        h1 = False
        evidence["h1_proxy"] = 0.0
    outer = nu_frac_moment(phi.nu, kappa2, "outer")
    h2 = not outer.divergent
    evidence["h2_outer_moment"] = outer.value
    inf3, theta3 = h3_infimum(phi, kappa2)
    h3 = math.isfinite(inf3)
    evidence["h3_infimum"] = inf3
    evidence["h3_theta"] = theta3
    if sigma > 0 and kappa2 < sigma:
        ls = limsup_finite(phi, sigma)
        h4 = ls.holds
        evidence["h4_proxy"] = ls.proxy
    else:
        h4 = False
        evidence["h4_proxy"] = math.inf
    return HypothesisReport(h1=bool(h1), h2=bool(h2), h3=bool(h3), h4=bool(h4),
                            witness_rho=float(rho), witness_sigma=float(sigma),
                            kappa1=kappa1, kappa2=kappa2, evidence=evidence)
