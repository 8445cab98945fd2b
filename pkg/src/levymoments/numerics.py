"""Shared numerical kernels.

Semi-infinite quadrature with power-law endpoint handling, positive and
alternating series summation, a grid-then-golden 1-d minimiser, log-log slope
regression, and the Gamma-function constants used by the Riesz-type kernel
identities.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy import integrate, special

DEFAULT_CAP = 1e12
EXACT_RTOL = 1e-8
BOUND_RTOL = 1e-6
SERIES_WINDOW = 16


class QuadratureError(RuntimeError):
    """Quadrature did not converge within the subdivision budget."""


class SeriesError(RuntimeError):
    """Series neither converged nor was certified divergent."""


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    subdivisions: int = 0
    divergent: bool = False
    certificate: str | None = None

    def __add__(self, other: "QuadratureResult") -> "QuadratureResult":
        div = self.divergent or other.divergent
        cert = self.certificate or other.certificate
        return QuadratureResult(
            value=math.inf if div else self.value + other.value,
            abs_error_estimate=self.abs_error_estimate + other.abs_error_estimate,
            subdivisions=self.subdivisions + other.subdivisions,
            divergent=div,
            certificate=cert,
        )

    @classmethod
    def zero(cls) -> "QuadratureResult":
        return cls(0.0, 0.0, 0)

    @classmethod
    def infinite(cls, certificate: str) -> "QuadratureResult":
        return cls(math.inf, 0.0, 0, True, certificate)


# ---------------------------------------------------------------------------
# special functions

def gamma(x):
    return special.gamma(x)


def lgamma(x):
    return special.gammaln(x)


def surface_area(d: int) -> float:
    """Surface measure of the unit sphere in R^d, 2 pi^{d/2} / Gamma(d/2)."""
    return 2.0 * math.pi ** (d / 2) / math.gamma(d / 2)


@dataclass(frozen=True)
class RieszConstants:
    c_kd: float
    c_prime_kd: float
    c_d: float


def riesz_c(kappa: float, d: int) -> float:
    """Constant of |x|^k = c * int (1 - cos x.xi) |xi|^{-k-d} dxi, 0<k<2."""
    if not 0 < kappa < 2:
        raise ValueError(f"kappa must lie in (0, 2), got {kappa}")
    return (kappa * 2.0 ** (kappa - 1) * math.gamma((kappa + d) / 2)
            / (math.pi ** (d / 2) * math.gamma(1 - kappa / 2)))


def riesz_c_prime(kappa: float, d: int) -> float:
    if not 0 < kappa < d:
        raise ValueError(f"kappa must lie in (0, d={d}), got {kappa}")
    return 2.0 ** kappa * math.pi ** (d / 2) * math.gamma(kappa / 2) / math.gamma((d - kappa) / 2)


def poisson_kernel_c(d: int) -> float:
    return math.pi ** (-(d + 1) / 2) * math.gamma((d + 1) / 2)


def riesz_constants(kappa: float, d: int) -> RieszConstants:
    return RieszConstants(
        c_kd=riesz_c(kappa, d) if 0 < kappa < 2 else math.nan,
        c_prime_kd=riesz_c_prime(kappa, d) if 0 < kappa < d else math.nan,
        c_d=poisson_kernel_c(d),
    )


# ---------------------------------------------------------------------------
# quadrature

def _call(f: Callable, x):
    with np.errstate(all="ignore"):
        y = f(x)
    return np.asarray(y, dtype=float)


def _fit_slope(x: np.ndarray, y: np.ndarray) -> float:
    A = np.vstack([x, np.ones_like(x)]).T
    return float(np.linalg.lstsq(A, y, rcond=None)[0][0])


def endpoint_exponent(f: Callable, scale: float, toward: str) -> float | None:
    """Estimate p with f(u) ~ u^p as u -> 0 ('zero') or u -> inf ('inf').

    Returns None when f is not positive and finite on the probe grid.
    """
    if toward == "zero":
        u = scale * np.logspace(-14, -10, 9)
    else:
        u = scale * np.logspace(10, 14, 9)
    v = _call(f, u)
    if not np.all(np.isfinite(v)) or np.any(v <= 0):
        return None
    return _fit_slope(np.log(u), np.log(v))


def _lower_sum_check(f: Callable, scale: float, toward: str, cap: float,
                     decades: int = 40) -> str | None:
    """Divergence certificate via lower Riemann sums on a geometric grid."""
    if toward == "zero":
        u = scale * np.logspace(0, -decades, 8 * decades + 1)
    else:
        u = scale * np.logspace(0, decades, 8 * decades + 1)
    v = _call(f, u)
    if np.any(np.isposinf(v)):
        return f"integrand overflows near {'0' if toward == 'zero' else 'infinity'}"
    v = np.where(np.isfinite(v), v, 0.0)
    low = np.minimum(v[:-1], v[1:])
    if np.any(low < 0):
        return None
    sums = np.cumsum(low * np.abs(np.diff(u)))
    if sums[-1] > cap:
        k = int(np.argmax(sums > cap))
        return f"lower Riemann sum exceeds {cap:.3g} at u={u[k + 1]:.3g}"
    return None


def divergence_certificate(f: Callable, scale: float, toward: str,
                           cap: float = DEFAULT_CAP, slope_tol: float = 1e-3) -> str | None:
    """Return a reason string if int f diverges at the given endpoint."""
    cert = _lower_sum_check(f, scale, toward, cap)
    if cert:
        return cert
    p = endpoint_exponent(f, scale, toward)
    if p is None:
        return None
    if toward == "zero" and p <= -1 + slope_tol:
        return f"integrand ~ u^{p:.4g} at 0 (exponent <= -1)"
    if toward == "inf" and p >= -1 - slope_tol:
        return f"integrand ~ u^{p:.4g} at infinity (exponent >= -1)"
    return None


def _quad01(g: Callable, rel_tol: float, abs_tol: float, limit: int):
    res = integrate.quad(g, 0.0, 1.0, epsabs=abs_tol, epsrel=rel_tol, limit=limit,
                         full_output=1)
    value, err, info = res[0], res[1], res[2]
    ier = 0 if len(res) < 4 else 1
    return value, err, info["last"], ier


def _scalar(f: Callable) -> Callable[[float], float]:
    def g(x: float) -> float:
        with np.errstate(all="ignore"):
            y = float(np.asarray(f(x), dtype=float).reshape(-1)[0])
        return y if math.isfinite(y) else 0.0
    return g


def integrate_head(f: Callable, b: float, singularity_exponent: float | None = None,
                   rel_tol: float = EXACT_RTOL, abs_tol: float = 0.0, limit: int = 200,
                   check_divergence: bool = True, cap: float = DEFAULT_CAP) -> QuadratureResult:
    """Integral of f over (0, b] with an f ~ u^a singularity at 0."""
    a = singularity_exponent
    if a is None:
        a = endpoint_exponent(f, b, "zero")
    if a is not None and a <= -1:
        return QuadratureResult.infinite(f"integrand ~ u^{a:.4g} at 0 (exponent <= -1)")
    if check_divergence:
        cert = _lower_sum_check(f, b, "zero", cap, decades=30)
        if cert:
            return QuadratureResult.infinite(cert)
    fs = _scalar(f)
    if a is not None and a < 0:
        s = 1.0 / (1.0 + a)

        def g(w):
            if w <= 0.0:
                return 0.0
            return fs(b * w ** s) * b * s * w ** (s - 1.0)
    else:
        def g(w):
            return fs(b * w) * b
    value, err, n, ier = _quad01(g, rel_tol, abs_tol, limit)
    return _finish(value, err, n, ier, rel_tol, abs_tol)


def integrate_tail(f: Callable, b: float, decay_exponent: float | None = None,
                   rel_tol: float = EXACT_RTOL, abs_tol: float = 0.0, limit: int = 200,
                   check_divergence: bool = True, cap: float = DEFAULT_CAP) -> QuadratureResult:
    """Integral of f over [b, inf) via u = b / v, with f ~ u^p at infinity."""
    if check_divergence:
        cert = divergence_certificate(f, b, "inf", cap)
        if cert:
            return QuadratureResult.infinite(cert)
    p = decay_exponent
    if p is None:
        p = endpoint_exponent(f, b, "inf")
    fs = _scalar(f)
    # g(v) = f(b/v) b / v^2 ~ v^c at v -> 0 with c = -p - 2
    c = None if p is None else -p - 2.0
    if c is not None and -1 < c < 0:
        s = 1.0 / (1.0 + c)

        def g(w):
            if w <= 0.0:
                return 0.0
            v = w ** s
            return fs(b / v) * b / (v * v) * s * w ** (s - 1.0)
    else:
        def g(v):
            if v <= 0.0:
                return 0.0
            return fs(b / v) * b / (v * v)
    value, err, n, ier = _quad01(g, rel_tol, abs_tol, limit)
    return _finish(value, err, n, ier, rel_tol, abs_tol)


def _finish(value, err, n, ier, rel_tol, abs_tol) -> QuadratureResult:
    err = max(err, 128 * np.finfo(float).eps * abs(value))
    if ier and err > max(1e3 * rel_tol * abs(value), abs_tol, 1e-300):
        raise QuadratureError(
            f"quadrature did not converge (value={value:.6g}, "
            f"error estimate={err:.3g}, subdivisions={n})")
    return QuadratureResult(float(value), float(err), int(n))


def integrate_semiinf(f: Callable, singularity_exponent: float | None = None,
                      rel_tol: float = EXACT_RTOL, abs_tol: float = 0.0, scale: float = 1.0,
                      decay_exponent: float | None = None, check_divergence: bool = True,
                      cap: float = DEFAULT_CAP, limit: int = 200) -> QuadratureResult:
    """Integrate f over (0, inf).

    The range is split at ``scale``; the head is desingularised by
    ``u = scale * w^{1/(1+a)}`` when the integrand behaves like ``u^a`` with
    ``a`` in (-1, 0), and the tail is mapped onto (0, 1] by ``u = scale / v``.
    Exponents that are not supplied are estimated from log-log slopes of
    ``f`` near the endpoints.

    With ``check_divergence`` the result carries ``divergent=True`` and a
    certificate (a lower Riemann sum above ``cap`` or a non-integrable
    endpoint exponent) instead of a value.
    """
    if scale <= 0 or not math.isfinite(scale):
        raise ValueError(f"scale must be positive and finite, got {scale}")
    head = integrate_head(f, scale, singularity_exponent, rel_tol, abs_tol, limit,
                          check_divergence, cap)
    if head.divergent:
        return head
    tail = integrate_tail(f, scale, decay_exponent, rel_tol, abs_tol, limit,
                          check_divergence, cap)
    return head + tail


def integrate_finite(f: Callable, lo: float, hi: float, rel_tol: float = EXACT_RTOL,
                     abs_tol: float = 0.0, limit: int = 200) -> QuadratureResult:
    """Integral over [lo, hi]; ranges wider than two decades use u = e^s."""
    if hi <= lo:
        return QuadratureResult.zero()
    fs = _scalar(f)
    if lo > 0 and hi / lo > 100.0:
        g = lambda s: fs(math.exp(s)) * math.exp(s)  # noqa: E731
        a, b = math.log(lo), math.log(hi)
    else:
        g, a, b = fs, lo, hi
    res = integrate.quad(g, a, b, epsabs=abs_tol, epsrel=rel_tol, limit=limit, full_output=1)
    ier = 0 if len(res) < 4 else 1
    return _finish(res[0], res[1], res[2]["last"], ier, rel_tol, abs_tol)


def log_panels(h: Callable, kmin: int = -30, kmax: int = 30, order: int = 16) -> np.ndarray:
    """Integrals of h over the decades [10^k, 10^{k+1}], fixed Gauss-Legendre rule.

    Integration is done in s = ln r so that power laws are smooth.
    """
    x, w = np.polynomial.legendre.leggauss(order)
    out = np.empty(kmax - kmin)
    ln10 = math.log(10.0)
    for i, k in enumerate(range(kmin, kmax)):
        s = (k + 0.5 + 0.5 * x) * ln10
        r = np.exp(s)
        v = _call(h, r)
        out[i] = 0.5 * ln10 * np.sum(w * v * r)
    return out


# ---------------------------------------------------------------------------
# series

@dataclass(frozen=True)
class SeriesResult:
    value: float
    terms: int
    divergent: bool = False
    tail_bound: float = 0.0


def sum_series(term: Callable[[int], float], mode: str = "all-positive",
               rel_tol: float = 1e-12, max_terms: int = 10_000, start: int = 1,
               window: int = SERIES_WINDOW) -> SeriesResult:
    """Sum term(n) for n = start, start+1, ...

    ``all-positive``: stops once the terms are log-concave and decreasing, so
    the geometric tail bound ``t_n r / (1 - r)`` with ``r = t_n / t_{n-1}`` is
    valid, and that bound is below ``rel_tol * sum``. Divergence is flagged
    after ``window`` consecutive non-decreasing terms.

    ``alternating-safe``: stops when |t_n| is decreasing and below
    ``rel_tol * |sum|``; the alternating-series bound is the next term.
    """
    if mode not in ("all-positive", "alternating-safe"):
        raise ValueError(f"unknown mode {mode!r}")
    total = 0.0
    prev = None
    prev_ratio = None
    rising = 0
    for i in range(max_terms):
        n = start + i
        t = float(term(n))
        if not math.isfinite(t):
            return SeriesResult(math.inf, i + 1, True, math.inf)
        total += t
        a = abs(t)
        if prev is not None:
            if a >= prev and a > 0:
                rising += 1
                if rising >= window:
                    return SeriesResult(math.inf, i + 1, True, math.inf)
            else:
                rising = 0
            if mode == "alternating-safe":
                if a < prev and a <= rel_tol * abs(total):
                    return SeriesResult(total, i + 1, False, a)
            elif prev > 0:
                r = a / prev
                if r < 1 and (prev_ratio is None or r <= prev_ratio * (1 + 1e-12)):
                    tail = a * r / (1 - r)
                    if tail <= rel_tol * abs(total):
                        return SeriesResult(total, i + 1, False, tail)
                prev_ratio = r
            elif a == 0 and total != 0 and prev == 0:
                return SeriesResult(total, i + 1, False, 0.0)
        prev = a
    raise SeriesError(f"series undecided after {max_terms} terms (partial sum {total:.6g})")


# ---------------------------------------------------------------------------
# minimisation

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section(f: Callable[[float], float], lo: float, hi: float,
                   xtol: float = 1e-10, maxiter: int = 200) -> tuple[float, float]:
    a, b = lo, hi
    c = b - _INVPHI * (b - a)
    d = a + _INVPHI * (b - a)
    fc, fd = f(c), f(d)
    for _ in range(maxiter):
        if abs(b - a) <= xtol * (1.0 + abs(a) + abs(b)):
            break
        if fc <= fd:
            b, d, fd = d, c, fc
            c = b - _INVPHI * (b - a)
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            d = a + _INVPHI * (b - a)
            fd = f(d)
    return (c, fc) if fc <= fd else (d, fd)


def minimize_1d(f: Callable[[float], float], lo: float, hi: float,
                grid: int = 64) -> tuple[float, float]:
    """Minimise f over [lo, hi]: 64-point grid scan, then golden section
    around the best grid point. Returns (argmin, min)."""
    if hi < lo:
        raise ValueError("empty interval")
    if hi == lo:
        return lo, f(lo)
    xs = np.linspace(lo, hi, grid)
    vals = np.array([f(float(x)) for x in xs])
    vals = np.where(np.isnan(vals), np.inf, vals)
    i = int(np.argmin(vals))
    best_x, best_f = float(xs[i]), float(vals[i])
    if not math.isfinite(best_f):
        return best_x, best_f
    a = float(xs[max(i - 1, 0)])
    b = float(xs[min(i + 1, grid - 1)])
    x, fx = golden_section(f, a, b)
    if fx < best_f:
        return float(x), float(fx)
    return best_x, best_f


# ---------------------------------------------------------------------------
# log-log slope regression

@dataclass(frozen=True)
class SlopeFit:
    slope: float
    residual: float
    raw_slope: float
    log_coefficient: float = 0.0


def regime_grid(regime: str, decades: int = 3, points: int = 48,
                edge: float = 3.0) -> np.ndarray:
    if regime == "to-zero":
        return np.logspace(-edge - decades, -edge, points)
    if regime == "to-infinity":
        return np.logspace(edge, edge + decades, points)
    raise ValueError(f"unknown regime {regime!r}")


def loglog_slope(g: Callable, regime: str, decades: int = 3, points: int = 48,
                 slowly_varying: bool = True) -> SlopeFit:
    """Power-law exponent of g as u -> 0 or u -> inf.

    Fits ``log g = c + s log u + m log|log u|`` on 48 log-spaced points over
    ``[10^{-3-decades}, 10^{-3}]`` or ``[10^3, 10^{3+decades}]``; the
    ``log|log u|`` column absorbs logarithmic slowly-varying factors so that,
    e.g., ``log(1+u)`` has exponent 0 at infinity. ``raw_slope`` is the plain
    two-parameter fit. ``residual`` is the RMS of the fit in log units.

    A negative ``log|log u|`` coefficient is not accepted: it arises from a
    lower-order additive term (``u^a + log u``) rather than a slowly varying
    factor and would push the slope past both limiting exponents, so the
    plain fit is returned instead.
    """
    u = regime_grid(regime, decades, points)
    v = _call(g, u)
    if np.any(~np.isfinite(v)) or np.any(v <= 0):
        raise ValueError(f"g must be positive and finite on the {regime} grid")
    lu, lv = np.log(u), np.log(v)
    raw = _fit_slope(lu, lv)
    if not slowly_varying:
        res = lv - np.polyval(np.polyfit(lu, lv, 1), lu)
        return SlopeFit(raw, float(np.sqrt(np.mean(res ** 2))), raw)
    A = np.vstack([np.ones_like(lu), lu, np.log(np.abs(lu))]).T
    coef, *_ = np.linalg.lstsq(A, lv, rcond=None)
    if coef[2] < 0:
        res = lv - np.polyval(np.polyfit(lu, lv, 1), lu)
        return SlopeFit(raw, float(np.sqrt(np.mean(res ** 2))), raw, 0.0)
    res = lv - A @ coef
    return SlopeFit(float(coef[1]), float(np.sqrt(np.mean(res ** 2))), raw, float(coef[2]))


def warn(msg: str) -> None:
    warnings.warn(msg, RuntimeWarning, stacklevel=3)
