"""Lévy measures, Lévy triplets, Bernstein functions and characteristic exponents.

Conventions
-----------
* A Lévy measure in d = 1 is a density on signed ``y`` plus atoms; in d >= 2
  it is a radial density ``f(r)`` with ``nu(dy) = f(|y|) dy``.
* Every integral query only depends on ``|y|``, so it is reduced to the
  radial law ``nu(|y| in dr) = rho(r) dr``: ``rho(r) = f(r) + f(-r)`` in
  d = 1 and ``rho(r) = s_d r^{d-1} f(r)`` in d >= 2.
* The Lévy–Khintchine exponent uses the cutoff ``1_{(0,1)}(|y|)``::

      psi(xi) = -i l.xi + xi.Q xi / 2 + int (1 - e^{i xi.y} + i xi.y 1_{|y|<1}) nu(dy)

  so standard Brownian motion (Q = I) has ``psi(xi) = |xi|^2 / 2``.
* A subordinator with Bernstein function ``phi`` is the d = 1 Lévy process
  with ``psi(xi) = phi(-i xi)`` (principal branch).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import integrate, special

from .numerics import (
    EXACT_RTOL,
    QuadratureResult,
    integrate_finite,
    integrate_head,
    integrate_semiinf,
    integrate_tail,
    log_panels,
    riesz_c,
    surface_area,
)

INF = math.inf


class ConstructionError(ValueError):
    """Invalid Lévy measure, triplet or Bernstein function."""


# ---------------------------------------------------------------------------
# Lévy measures

Interval = tuple[float, float]


def _in_support(x: np.ndarray, support: Sequence[Interval]) -> np.ndarray:
    mask = np.zeros(np.shape(x), dtype=bool)
    for lo, hi in support:
        mask |= (x > lo) & (x < hi)
    return mask


@dataclass(frozen=True)
class LevyMeasure:
    """Lévy measure given by a density with declared support and/or atoms.

    Parameters
    ----------
    d : int
        Dimension.
    density : callable, optional
        Vectorised density. Signed ``y`` in d = 1, radius ``r`` in d >= 2.
    support : tuple of (lo, hi)
        Open intervals carrying the density (signed in d = 1, radial otherwise).
    atoms : tuple of (point, mass)
        Point masses; in d >= 2 ``point`` is the radius of a uniform sphere
        mass (only ``|y|`` enters the integral queries).
    small_exponent, large_exponent : float, optional
        ``a`` with ``rho(r) ~ r^a`` at 0 and at infinity; used to
        desingularise quadrature and to validate integrability.
    partial_moment : callable, optional
        Closed form ``(theta, lo, hi) -> int_{lo <= |y| < hi} |y|^theta nu(dy)``
        for the density part (returns ``inf`` when divergent).
    """

    d: int = 1
    density: Callable | None = None
    support: tuple[Interval, ...] = ()
    atoms: tuple[tuple[float, float], ...] = ()
    small_exponent: float | None = None
    large_exponent: float | None = None
    partial_moment: Callable | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)
    validate: bool = True

    def __post_init__(self):
        if self.d < 1 or int(self.d) != self.d:
            raise ConstructionError(f"dimension must be a positive integer, got {self.d}")
        for p, m in self.atoms:
            if m < 0:
                raise ConstructionError(f"atom mass must be nonnegative, got {m}")
            if p == 0:
                raise ConstructionError("atoms at 0 are not allowed")
        if self.density is not None and not self.support:
            raise ConstructionError("a density needs a declared support")
        if self.d >= 2 and any(lo < 0 for lo, _ in self.support):
            raise ConstructionError("radial supports must lie in [0, inf)")
        if self.validate:
            self._validate()

    # -- structure -------------------------------------------------------
    @property
    def is_zero(self) -> bool:
        return self.density is None and all(m == 0 for _, m in self.atoms)

    @property
    def has_density(self) -> bool:
        return self.density is not None

    @property
    def radial_support(self) -> tuple[Interval, ...]:
        if self.d >= 2:
            return tuple(self.support)
        out = []
        for lo, hi in self.support:
            if lo >= 0:
                out.append((lo, hi))
            elif hi <= 0:
                out.append((-hi, -lo))
            else:
                out.append((0.0, max(-lo, hi)))
        return tuple(out)

    @property
    def on_half_line(self) -> bool:
        """True if nu lives on (0, inf) (d = 1), as for a subordinator."""
        return (self.d == 1 and all(lo >= 0 for lo, _ in self.support)
                and all(p > 0 for p, _ in self.atoms))

    def raw_density(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=float)
        if self.density is None:
            return np.zeros_like(x)
        mask = _in_support(x, self.support)
        with np.errstate(all="ignore"):
            v = np.asarray(self.density(np.where(mask, x, 1.0)), dtype=float)
        return np.where(mask, v, 0.0)

    def radial_density(self, r) -> np.ndarray:
        """Density of the image of nu under y -> |y|."""
        r = np.asarray(r, dtype=float)
        if self.density is None:
            return np.zeros_like(r)
        if self.d == 1:
            return self.raw_density(r) + self.raw_density(-r)
        return surface_area(self.d) * r ** (self.d - 1) * self.raw_density(r)

    def odd_density(self, r) -> np.ndarray:
        """``f(r) - f(-r)`` for d = 1 (zero for radial measures)."""
        r = np.asarray(r, dtype=float)
        if self.density is None or self.d >= 2:
            return np.zeros_like(r)
        return self.raw_density(r) - self.raw_density(-r)

    def _validate(self) -> None:
        if self.density is None:
            return
        x, _ = np.polynomial.legendre.leggauss(16)
        probe = np.concatenate([10.0 ** (k + 0.5 + 0.5 * x) for k in range(-30, 30)])
        vals = self.radial_density(probe)
        if np.any(np.isnan(vals)):
            raise ConstructionError(f"{self.name}: density is NaN on the validation grid")
        if np.any(vals < 0):
            raise ConstructionError(f"{self.name}: density is negative on the validation grid")
        panels = log_panels(lambda r: np.minimum(1.0, r * r) * self.radial_density(r))
        total = float(np.sum(panels))
        if not math.isfinite(total):
            raise ConstructionError(f"{self.name}: int (1 ^ |y|^2) nu(dy) is not finite")
        if total == 0:
            return
        if self.small_exponent is not None:
            ok0 = self.small_exponent + 2 > -1
        else:
            ok0 = panels[0] < 1e-3 * total
        if self.large_exponent is not None:
            oki = self.large_exponent < -1
        else:
            oki = panels[-1] < 1e-3 * total
        if not (ok0 and oki):
            raise ConstructionError(
                f"{self.name}: int (1 ^ |y|^2) nu(dy) does not converge "
                f"({'near 0' if not ok0 else 'at infinity'})")

    def __add__(self, other: "LevyMeasure") -> "LevyMeasure":
        if not isinstance(other, LevyMeasure):
            return NotImplemented
        if self.d != other.d:
            raise ConstructionError("cannot add measures of different dimensions")
        if self.is_zero:
            return other
        if other.is_zero:
            return self
        dens = None
        support: tuple[Interval, ...] = ()
        if self.density is not None and other.density is not None:
            f, g = self, other
            dens = lambda x: f.raw_density(x) + g.raw_density(x)  # noqa: E731
            lo = min(s[0] for s in f.support + g.support)
            hi = max(s[1] for s in f.support + g.support)
            support = ((lo, hi),) if not (lo < 0 < hi) else ((lo, 0.0), (0.0, hi))
        elif self.density is not None:
            dens, support = self.density, self.support
        elif other.density is not None:
            dens, support = other.density, other.support
        pm = None
        if self.partial_moment is not None or other.partial_moment is not None:
            pa = self.partial_moment if self.density is not None else None
            pb = other.partial_moment if other.density is not None else None
            need_a = self.density is not None
            need_b = other.density is not None
            if (not need_a or pa) and (not need_b or pb):
                def pm(theta, lo, hi, pa=pa, pb=pb):
                    return (pa(theta, lo, hi) if pa else 0.0) + (pb(theta, lo, hi) if pb else 0.0)

        def _min_exp(a, b, fa, fb):
            if not fa:
                return b
            if not fb:
                return a
            if a is None or b is None:
                return None
            return min(a, b)

        def _max_exp(a, b, fa, fb):
            if not fa:
                return b
            if not fb:
                return a
            if a is None or b is None:
                return None
            return max(a, b)

        fa, fb = self.density is not None, other.density is not None
        return LevyMeasure(
            d=self.d, density=dens, support=support, atoms=self.atoms + other.atoms,
            small_exponent=_min_exp(self.small_exponent, other.small_exponent, fa, fb),
            large_exponent=_max_exp(self.large_exponent, other.large_exponent, fa, fb),
            partial_moment=pm, name=f"{self.name}+{other.name}",
            params={"parts": [self.params, other.params]}, validate=False)

    # -- generic integration ----------------------------------------------
    def integrate_radial(self, g: Callable, lo: float = 0.0, hi: float = INF,
                         exponent: float = 0.0, scale: float | None = None,
                         rel_tol: float = EXACT_RTOL, check_divergence: bool = True
                         ) -> QuadratureResult:
        """``int_{lo <= |y| < hi} g(|y|) nu(dy)`` with g vectorised.

        ``exponent`` is the power of g near 0 (``g(r) ~ r^exponent``); it
        is combined with the declared small exponent of nu to desingularise.
        """
        total = QuadratureResult.zero()
        for p, m in self.atoms:
            r = abs(p) if np.ndim(p) == 0 else float(np.linalg.norm(p))
            if lo <= r < hi and m > 0:
                v = float(np.asarray(g(np.array([r])))[0]) * m
                if not math.isfinite(v):
                    return QuadratureResult.infinite(f"integrand infinite at atom r={r:g}")
                total = total + QuadratureResult(v, 0.0, 0)
        if self.density is None:
            return total

        def h(r):
            with np.errstate(all="ignore"):
                return np.asarray(g(r), dtype=float) * self.radial_density(r)

        a0 = None
        if self.small_exponent is not None:
            a0 = self.small_exponent + exponent
        for slo, shi in _merge(self.radial_support):
            a, b = max(lo, slo), min(hi, shi)
            if b <= a:
                continue
            res = _integrate_interval(h, a, b, a0 if a == 0 else None, scale, rel_tol,
                                      check_divergence)
            total = total + res
            if total.divergent:
                return total
        return total

    # -- integral queries --------------------------------------------------
    def region_bounds(self, region: str) -> Interval:
        if region == "inner":
            return 0.0, 1.0
        if region == "outer":
            return 1.0, INF
        if region == "full":
            return 0.0, INF
        raise ValueError(f"unknown region {region!r}; expected inner, outer or full")

    def tail_mass(self, r: float) -> QuadratureResult:
        return nu_tail_mass(self, r)

    def frac_moment(self, theta: float, region: str = "full", **kw) -> QuadratureResult:
        return nu_frac_moment(self, theta, region, **kw)


def _merge(intervals: Sequence[Interval]) -> list[Interval]:
    out: list[list[float]] = []
    for lo, hi in sorted(intervals):
        if out and lo <= out[-1][1]:
            out[-1][1] = max(out[-1][1], hi)
        else:
            out.append([lo, hi])
    return [(a, b) for a, b in out]


def _integrate_interval(h, a, b, a0, scale, rel_tol, check_divergence) -> QuadratureResult:
    """Integrate h over [a, b), splitting at 1 and at ``scale``."""
    cuts = sorted({c for c in (1.0, scale) if c is not None and a < c < b})
    edges = [a] + cuts + [b]
    total = QuadratureResult.zero()
    for lo, hi in zip(edges[:-1], edges[1:]):
        if lo == 0 and hi == INF:
            part = integrate_semiinf(h, a0, rel_tol=rel_tol, check_divergence=check_divergence)
        elif lo == 0:
            part = integrate_head(h, hi, a0, rel_tol=rel_tol, check_divergence=check_divergence)
        elif hi == INF:
            part = integrate_tail(h, lo, rel_tol=rel_tol, check_divergence=check_divergence)
        else:
            part = integrate_finite(h, lo, hi, rel_tol=rel_tol)
        total = total + part
        if total.divergent:
            return total
    return total


def nu_tail_mass(nu: LevyMeasure, r: float) -> QuadratureResult:
    """``nu(|y| >= r)``."""
    if not r > 0:
        raise ValueError(f"r must be positive, got {r}")
    return nu_frac_moment(nu, 0.0, bounds=(r, INF))


def nu_frac_moment(nu: LevyMeasure, theta: float, region: str = "full",
                   bounds: Interval | None = None, force_quadrature: bool = False
                   ) -> QuadratureResult:
    """``int |y|^theta nu(dy)`` over inner (0,1), outer [1,inf) or full.

    Returns ``inf`` with a certificate when the integral diverges.
    """
    lo, hi = bounds if bounds is not None else nu.region_bounds(region)
    if nu.partial_moment is not None and nu.density is not None and not force_quadrature:
        v = float(nu.partial_moment(theta, lo, hi))
        atoms = nu.integrate_radial(lambda r: r ** theta, lo, hi) if nu.atoms else None
        if not math.isfinite(v):
            return QuadratureResult.infinite(
                f"closed-form moment of order {theta:g} over [{lo:g},{hi:g}) diverges")
        res = QuadratureResult(v, 4 * np.finfo(float).eps * abs(v), 0)
        return res + atoms if atoms is not None else res
    return nu.integrate_radial(lambda r: r ** theta, lo, hi, exponent=theta)


def nu_exp_moment(nu: LevyMeasure, lam: float, kappa: float, region: str = "outer"
                  ) -> QuadratureResult:
    """``int e^{lam |y|^kappa} nu(dy)`` over the region."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    lo, hi = nu.region_bounds(region)
    return nu.integrate_radial(lambda r: np.exp(lam * r ** kappa), lo, hi)


def M_kappa_lambda(nu: LevyMeasure, lam: float, kappa: float) -> QuadratureResult:
    """``int (e^{lam |y|^kappa} - 1) nu(dy)``."""
    if not lam > 0:
        raise ValueError(f"lambda must be positive, got {lam}")
    if not 0 < kappa <= 1:
        raise ValueError(f"kappa must lie in (0, 1], got {kappa}")
    inner = nu.integrate_radial(lambda r: np.expm1(lam * r ** kappa), 0.0, 1.0, exponent=kappa)
    if inner.divergent:
        return inner
    return inner + nu.integrate_radial(lambda r: np.expm1(lam * r ** kappa), 1.0, INF)


# -- measure families --------------------------------------------------------

def _power_moment(c: float, a: float):
    """Closed ``int_lo^hi c r^{theta + a} dr`` for a radial density c r^a."""
    def pm(theta, lo, hi):
        e = theta + a + 1.0
        if e == 0:
            return INF if lo == 0 or hi == INF else c * math.log(hi / lo)
        if e < 0 and lo == 0:
            return INF
        if e > 0 and hi == INF:
            return INF
        top = 0.0 if hi == INF else hi ** e
        bot = 0.0 if lo == 0 else lo ** e
        return c * (top - bot) / e
    return pm


def power_measure(c: float, alpha: float, truncate: float | None = None) -> LevyMeasure:
    """Density ``c x^{-1-alpha}`` on (0, inf) (or (0, truncate))."""
    if c <= 0:
        raise ConstructionError(f"c must be positive, got {c}")
    if not 0 < alpha < 2:
        raise ConstructionError(f"alpha must lie in (0, 2), got {alpha}")
    hi = INF if truncate is None else float(truncate)
    pm = _power_moment(c, -1.0 - alpha)

    def pm_trunc(theta, lo, up):
        return pm(theta, lo, min(up, hi)) if lo < hi else 0.0

    return LevyMeasure(d=1, density=lambda x: c * x ** (-1.0 - alpha), support=((0.0, hi),),
                       small_exponent=-1.0 - alpha,
                       large_exponent=-1.0 - alpha if truncate is None else None,
                       partial_moment=pm_trunc, name="power",
                       params={"c": c, "alpha": alpha, "truncate": truncate})


def stable_subordinator_measure(alpha: float, c: float = 1.0) -> LevyMeasure:
    """Lévy measure of the subordinator with ``phi(u) = c u^alpha``."""
    if not 0 < alpha < 1:
        raise ConstructionError(f"alpha must lie in (0, 1), got {alpha}")
    m = power_measure(c * alpha / math.gamma(1 - alpha), alpha)
    return _renamed(m, "stable-subordinator", {"alpha": alpha, "c": c})


def gamma_measure(alpha: float, beta: float) -> LevyMeasure:
    """``alpha y^{-1} e^{-beta y} dy`` on (0, inf)."""
    if alpha <= 0 or beta <= 0:
        raise ConstructionError("gamma measure needs alpha > 0 and beta > 0")

    def pm(theta, lo, hi):
        if theta <= 0 and lo == 0:
            return INF
        if theta > 0:
            top = 1.0 if hi == INF else special.gammainc(theta, beta * hi)
            bot = 0.0 if lo == 0 else special.gammainc(theta, beta * lo)
            return alpha * beta ** (-theta) * math.gamma(theta) * (top - bot)
        return _quad_moment(lambda r: alpha * r ** (theta - 1) * np.exp(-beta * r), lo, hi)

    return LevyMeasure(d=1, density=lambda y: alpha * np.exp(-beta * y) / y,
                       support=((0.0, INF),), small_exponent=-1.0, large_exponent=None,
                       partial_moment=pm, name="gamma", params={"alpha": alpha, "beta": beta})


def _quad_moment(h, lo, hi) -> float:
    res = _integrate_interval(h, lo, hi, None, None, EXACT_RTOL, True)
    return res.value


def atom_measure(points: Sequence[float], masses: Sequence[float], d: int = 1) -> LevyMeasure:
    atoms = tuple((float(p), float(m)) for p, m in zip(points, masses))
    return LevyMeasure(d=d, atoms=atoms, name="atoms",
                       params={"points": list(points), "masses": list(masses)})


def symmetric_stable_measure(alpha: float, d: int = 1) -> LevyMeasure:
    """``c_{alpha,d} |y|^{-alpha-d} dy``, the measure with ``psi = |xi|^alpha``."""
    if not 0 < alpha < 2:
        raise ConstructionError(f"alpha must lie in (0, 2), got {alpha}")
    c = riesz_c(alpha, d)
    radial_c = 2.0 * c if d == 1 else surface_area(d) * c
    pm = _power_moment(radial_c, -1.0 - alpha)
    if d == 1:
        dens = lambda y: c * np.abs(y) ** (-1.0 - alpha)  # noqa: E731
        support = ((-INF, 0.0), (0.0, INF))
    else:
        dens = lambda r: c * r ** (-alpha - d)  # noqa: E731
        support = ((0.0, INF),)
    return LevyMeasure(d=d, density=dens, support=support, small_exponent=-1.0 - alpha,
                       large_exponent=-1.0 - alpha, partial_moment=pm,
                       name="symmetric-stable", params={"alpha": alpha, "d": d})


def zero_measure(d: int = 1) -> LevyMeasure:
    return LevyMeasure(d=d, name="zero")


def _renamed(m: LevyMeasure, name: str, params: dict) -> LevyMeasure:
    return LevyMeasure(d=m.d, density=m.density, support=m.support, atoms=m.atoms,
                       small_exponent=m.small_exponent, large_exponent=m.large_exponent,
                       partial_moment=m.partial_moment, name=name, params=params,
                       validate=False)


# ---------------------------------------------------------------------------
# characteristic exponents

@dataclass(frozen=True)
class CharacteristicExponent:
    """A Lévy symbol ``psi`` with ``E e^{i xi.X_t} = e^{-t psi(xi)}``.

    ``func`` takes real scalars (d = 1), radii (``radial=True``) or arrays of
    shape (..., d) and returns complex values.
    """

    func: Callable
    d: int = 1
    radial: bool = False
    source: str = "closed-form"
    name: str = "custom"

    def evaluate(self, xi) -> np.ndarray:
        xi = np.asarray(xi, dtype=float)
        if self.d == 1:
            if xi.ndim >= 1 and xi.shape[-1] == 1 and xi.ndim > 1:
                xi = xi[..., 0]
            return np.asarray(self.func(xi), dtype=complex)
        if xi.shape[-1] != self.d:
            raise ValueError(f"expected points of dimension {self.d}")
        if self.radial:
            return np.asarray(self.func(np.linalg.norm(xi, axis=-1)), dtype=complex)
        return np.asarray(self.func(xi), dtype=complex)

    __call__ = evaluate

    def profile(self, r) -> np.ndarray:
        """``psi`` along the ray ``r e_1``, r >= 0 (the full symbol if radial).

        For d = 1 the negative axis follows from ``psi(-xi) = conj psi(xi)``.
        """
        r = np.asarray(r, dtype=float)
        if self.d == 1 or self.radial:
            return np.asarray(self.func(r), dtype=complex)
        raise ValueError("radial profile requested for a non-radial d >= 2 exponent")

    def is_real(self, grid=None, tol: float = 1e-10) -> bool:
        r = np.logspace(-3, 3, 25) if grid is None else np.asarray(grid, dtype=float)
        v = self.profile(r)
        return bool(np.all(np.abs(v.imag) <= tol * (1.0 + np.abs(v))))


def power_symbol(alpha: float, c: float = 1.0, d: int = 1) -> CharacteristicExponent:
    return CharacteristicExponent(lambda r: c * np.abs(r) ** alpha + 0j, d=d, radial=True,
                                  name=f"power({alpha:g})")


# ---------------------------------------------------------------------------
# Bernstein functions

@dataclass(frozen=True)
class BernsteinFunction:
    """``phi(u) = b u + int (1 - e^{-u x}) nu(dx)`` with optional closed forms.

    ``closed_form``/``closed_derivative`` evaluate phi, phi' directly;
    ``continuation`` evaluates ``phi(-i xi)`` on the principal branch.
    """

    b: float = 0.0
    nu: LevyMeasure = field(default_factory=zero_measure)
    closed_form: Callable | None = None
    closed_derivative: Callable | None = None
    continuation: Callable | None = None
    name: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.b < 0:
            raise ConstructionError(f"drift b must be nonnegative, got {self.b}")
        if self.nu.d != 1 or not self.nu.on_half_line:
            raise ConstructionError("a Bernstein function needs a Lévy measure on (0, inf)")

    # -- evaluation -----------------------------------------------------
    def phi(self, u):
        if self.closed_form is not None:
            u = np.asarray(u, dtype=float)
            with np.errstate(all="ignore"):
                return np.asarray(self.closed_form(u), dtype=float)
        return self.phi_quad(u)

    __call__ = phi

    def phi_quad(self, u, rel_tol: float = 1e-10):
        """Quadrature of ``b u + int -expm1(-u x) nu(dx)``."""
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(u_arr)
        for i, ui in enumerate(u_arr.flat):
            if ui <= 0:
                out.flat[i] = 0.0
                continue
            res = self.nu.integrate_radial(lambda x, ui=ui: -np.expm1(-ui * x),
                                           exponent=1.0, scale=1.0 / ui, rel_tol=rel_tol)
            out.flat[i] = self.b * ui + res.value
        return out.reshape(np.shape(u)) if np.ndim(u) else float(out[0])

    def dphi(self, u):
        """``phi'(u) = b + int x e^{-u x} nu(dx)``."""
        if self.closed_derivative is not None:
            u = np.asarray(u, dtype=float)
            with np.errstate(all="ignore"):
                return np.asarray(self.closed_derivative(u), dtype=float)
        u_arr = np.atleast_1d(np.asarray(u, dtype=float))
        out = np.empty_like(u_arr)
        for i, ui in enumerate(u_arr.flat):
            if ui <= 0:
                res = nu_frac_moment(self.nu, 1.0)
            else:
                res = self.nu.integrate_radial(lambda x, ui=ui: x * np.exp(-ui * x),
                                               exponent=1.0, scale=1.0 / ui)
            out.flat[i] = self.b + res.value
        return out.reshape(np.shape(u)) if np.ndim(u) else float(out[0])

    def continuation_at(self, xi):
        """``phi(-i xi)``: closed continuation or quadrature."""
        xi = np.asarray(xi, dtype=float)
        if self.continuation is not None:
            with np.errstate(all="ignore"):
                return np.asarray(self.continuation(xi), dtype=complex)
        return _bernstein_symbol_quad(self, xi)

    @property
    def is_compound_poisson(self) -> bool:
        if self.b > 0:
            return False
        if self.nu.density is None:
            return True
        return math.isfinite(nu_frac_moment(self.nu, 0.0).value)

    def __add__(self, other: "BernsteinFunction") -> "BernsteinFunction":
        if not isinstance(other, BernsteinFunction):
            return NotImplemented
        f, g = self, other
        closed = cont = dclosed = None
        if f.closed_form is not None and g.closed_form is not None:
            closed = lambda u: f.closed_form(u) + g.closed_form(u)  # noqa: E731
        if f.continuation is not None and g.continuation is not None:
            cont = lambda x: f.continuation(x) + g.continuation(x)  # noqa: E731
        if f.closed_derivative is not None and g.closed_derivative is not None:
            dclosed = lambda u: f.closed_derivative(u) + g.closed_derivative(u)  # noqa: E731
        return BernsteinFunction(b=f.b + g.b, nu=f.nu + g.nu, closed_form=closed,
                                 closed_derivative=dclosed, continuation=cont,
                                 name=f"{f.name}+{g.name}",
                                 params={"parts": [f.params, g.params]})

    # -- families ---------------------------------------------------------
    @classmethod
    def stable(cls, alpha: float, c: float = 1.0) -> "BernsteinFunction":
        """``phi(u) = c u^alpha``, alpha in (0, 1]."""
        if not 0 < alpha <= 1:
            raise ConstructionError(f"alpha must lie in (0, 1], got {alpha}")
        if c <= 0:
            raise ConstructionError(f"c must be positive, got {c}")
        if alpha == 1:
            return cls.drift(c)
        return cls(b=0.0, nu=stable_subordinator_measure(alpha, c),
                   closed_form=lambda u: c * np.maximum(u, 0.0) ** alpha,
                   closed_derivative=lambda u: c * alpha * u ** (alpha - 1.0),
                   continuation=lambda x: c * (-1j * x) ** alpha,
                   name="stable-subordinator", params={"alpha": alpha, "c": c})

    @classmethod
    def gamma(cls, alpha: float = 1.0, beta: float = 1.0) -> "BernsteinFunction":
        """``phi(u) = alpha log(1 + u / beta)``."""
        return cls(b=0.0, nu=gamma_measure(alpha, beta),
                   closed_form=lambda u: alpha * np.log1p(u / beta),
                   closed_derivative=lambda u: alpha / (beta + u),
                   continuation=lambda x: alpha * np.log(1.0 - 1j * x / beta),
                   name="gamma", params={"alpha": alpha, "beta": beta})

    @classmethod
    def drift(cls, b: float) -> "BernsteinFunction":
        if b <= 0:
            raise ConstructionError(f"drift must be positive, got {b}")
        return cls(b=b, closed_form=lambda u: b * u,
                   closed_derivative=lambda u: b + 0.0 * u,
                   continuation=lambda x: -1j * b * x, name="drift", params={"b": b})

    @classmethod
    def compound_poisson(cls, eta: float, jumps: Sequence[float] | None = None,
                         probs: Sequence[float] | None = None,
                         jump_density: Callable | None = None,
                         support: Interval = (0.0, INF)) -> "BernsteinFunction":
        """``phi(u) = eta (1 - E e^{-u Y})`` for a jump law on (0, inf).

        The jump law is either discrete (``jumps``, ``probs``) or a
        probability density ``jump_density`` on ``support``.
        """
        if eta <= 0:
            raise ConstructionError(f"eta must be positive, got {eta}")
        if jump_density is not None:
            nu = LevyMeasure(d=1, density=lambda y: eta * jump_density(y), support=(support,),
                             name="compound-poisson", params={"eta": eta})
            return cls(b=0.0, nu=nu, name="compound-poisson", params={"eta": eta})
        ys = np.asarray([1.0] if jumps is None else jumps, dtype=float)
        ps = np.full(ys.shape, 1.0 / ys.size) if probs is None else np.asarray(probs, float)
        if np.any(ys <= 0) or np.any(ps < 0) or not math.isclose(ps.sum(), 1.0, rel_tol=1e-9):
            raise ConstructionError("jumps must be positive and probabilities sum to 1")
        nu = atom_measure(ys, eta * ps)
        return cls(b=0.0, nu=nu,
                   closed_form=lambda u: eta * (1.0 - np.exp(-np.multiply.outer(u, ys)) @ ps),
                   closed_derivative=lambda u: eta * (np.exp(-np.multiply.outer(u, ys)) @ (ps * ys)),
                   continuation=lambda x: eta * (1.0 - np.exp(1j * np.multiply.outer(x, ys)) @ ps),
                   name="compound-poisson",
                   params={"eta": eta, "jumps": ys.tolist(), "probs": ps.tolist()})

    @classmethod
    def truncated_stable(cls, alpha: float, c: float = 1.0) -> "BernsteinFunction":
        """Lévy measure ``c x^{-1-alpha}`` on (0, 1): no jumps of size >= 1."""
        if not 0 < alpha < 1:
            raise ConstructionError(f"alpha must lie in (0, 1), got {alpha}")

        def closed(u):
            u = np.asarray(u, dtype=float)
            return c * (-(-np.expm1(-u)) / alpha
                        + u ** alpha * math.gamma(1 - alpha) * special.gammainc(1 - alpha, u) / alpha)

        def deriv(u):
            u = np.asarray(u, dtype=float)
            return c * u ** (alpha - 1) * math.gamma(1 - alpha) * special.gammainc(1 - alpha, u)

        def cont(x):
            # int_0^1 (1 - e^{ixy}) y^{-1-alpha} dy: power series for |x| <= 1,
            # otherwise integration by parts and a confluent hypergeometric
            x = np.asarray(x, dtype=float)
            z = np.abs(x)
            small = z <= 1.0
            k = np.arange(1, 30)
            zs = np.where(small, z, 0.0)
            series = -np.sum((1j * zs[..., None]) ** k / (special.factorial(k) * (k - alpha)),
                             axis=-1)
            zl = np.where(small, 1.0, z)
            m = special.hyp1f1(1.0 - alpha, 2.0 - alpha, 1j * zl) / (1.0 - alpha)
            large = -(1.0 - np.exp(1j * zl)) / alpha - (1j * zl / alpha) * m
            val = c * np.where(small, series, large)
            return np.where(x < 0, np.conj(val), val)

        return cls(b=0.0, nu=power_measure(c, alpha, truncate=1.0), closed_form=closed,
                   closed_derivative=deriv, continuation=cont, name="truncated-stable",
                   params={"alpha": alpha, "c": c})


def _bernstein_symbol_quad(phi: BernsteinFunction, xi) -> np.ndarray:
    """``b(-i xi) + int (1 - e^{i xi x}) nu(dx)`` by quadrature."""
    xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
    out = np.empty(xi_arr.shape, dtype=complex)
    for i, x in enumerate(xi_arr.flat):
        if x == 0:
            out.flat[i] = 0.0
            continue
        re = _one_minus_cos(phi.nu, abs(x))
        im = -_sin_integral(phi.nu, abs(x), compensate=False)
        val = complex(re, np.sign(x) * im) - 1j * phi.b * x
        out.flat[i] = val
    return out.reshape(np.shape(xi)) if np.ndim(xi) else out[0]


def symbol_from_bernstein(phi: BernsteinFunction, force_quadrature: bool = False
                          ) -> CharacteristicExponent:
    """``psi(xi) = phi(-i xi)`` on the principal branch (d = 1)."""
    if phi.continuation is not None and not force_quadrature:
        return CharacteristicExponent(phi.continuation, d=1, source="continuation",
                                      name=phi.name)
    if phi.nu.is_zero and phi.b == 0 and phi.closed_form is not None and phi.continuation is None:
        raise ConstructionError("no continuation and no (b, nu) data available")
    return CharacteristicExponent(lambda x: _bernstein_symbol_quad(phi, x), d=1,
                                  source="levy-khintchine", name=phi.name)


# ---------------------------------------------------------------------------
# Lévy–Khintchine quadrature for the jump part

def _one_minus_cos(nu: LevyMeasure, xi: float, rel_tol: float = 1e-10) -> float:
    """``int (1 - cos(xi r)) rho(r) dr`` for xi > 0."""
    total = 0.0
    for p, m in nu.atoms:
        total += m * (1.0 - math.cos(xi * abs(p)))
    if nu.density is None:
        return total
    B = min(math.pi / xi, 1.0)
    head = nu.integrate_radial(lambda r: 2.0 * np.sin(0.5 * xi * r) ** 2, 0.0, B,
                               exponent=2.0, rel_tol=rel_tol)
    total += head.value
    total += _oscillatory_tail(nu, xi, B, "cos", complement=True)
    return total


def _sin_integral(nu: LevyMeasure, xi: float, compensate: bool = True) -> float:
    """``int (sin(xi y) - xi y 1_{|y|<1}) nu(dy)`` (compensator optional), xi > 0."""
    total = 0.0
    for p, m in nu.atoms:
        comp = xi * p if (compensate and abs(p) < 1) else 0.0
        total += m * (math.sin(xi * p) - comp)
    if nu.density is None or nu.d != 1:
        return total
    B = min(math.pi / xi, 1.0)
    odd = nu.odd_density

    def head(r):
        s = np.sin(xi * r)
        if compensate:
            # sin(z) - z, written to avoid cancellation at small z
            z = xi * r
            s = np.where(z < 1e-3, -z ** 3 / 6 + z ** 5 / 120, s - z)
        return s * odd(r)

    a = nu.small_exponent
    head_res = integrate_head(head, B, None if a is None else a + (3.0 if compensate else 1.0),
                              rel_tol=1e-10)
    total += head_res.value
    if compensate and B < 1:
        # remove the compensator on [B, 1)
        total -= xi * integrate_finite(lambda r: r * odd(r), B, 1.0, rel_tol=1e-10).value
    total += _oscillatory_tail(nu, xi, B, "sin", complement=False)
    return total


def _oscillatory_tail(nu: LevyMeasure, xi: float, B: float, kind: str, complement: bool) -> float:
    """Tail ``int_B^inf`` of (1 - cos) rho or sin * odd density."""
    weight_fn = nu.radial_density if kind == "cos" else nu.odd_density
    total = 0.0
    for lo, hi in _merge(nu.radial_support):
        a, b = max(B, lo), hi
        if b <= a:
            continue
        if complement:
            mass = nu.integrate_radial(lambda r: np.ones_like(r), a, b).value
            total += mass
        if b == INF:
            res = integrate.quad(lambda r: float(weight_fn(np.array([r]))[0]), a, INF,
                                 weight=kind, wvar=xi, limlst=200, limit=400)
        else:
            res = integrate.quad(lambda r: float(weight_fn(np.array([r]))[0]), a, b,
                                 weight=kind, wvar=xi, limit=400)
        total += -res[0] if complement else res[0]
    return total


def _bessel_average(z: np.ndarray, d: int) -> np.ndarray:
    """``Gamma(d/2) (2/z)^{d/2-1} J_{d/2-1}(z)``: spherical average of cos."""
    return 1.0 - _one_minus_bessel_average(z, d)


def _one_minus_bessel_average(z: np.ndarray, d: int) -> np.ndarray:
    """``1 - Lambda_d(z)``, by its power series for z < 1 to avoid cancellation."""
    z = np.asarray(z, dtype=float)
    order = d / 2 - 1
    small = z < 1.0
    zs = np.where(small, z, 0.0)
    series = np.zeros_like(zs)
    g = math.gamma(d / 2)
    for k in range(1, 14):
        series -= g * (-1.0) ** k * (zs / 2) ** (2 * k) / (math.factorial(k) * math.gamma(k + d / 2))
    zl = np.where(small, 1.0, z)
    with np.errstate(all="ignore"):
        direct = 1.0 - g * (2.0 / zl) ** order * special.jv(order, zl)
    return np.where(small, series, direct)


def _radial_jump_symbol(nu: LevyMeasure, rho: float, R_factor: float = 2000.0) -> float:
    """``int (1 - Lambda_d(rho r)) rho_nu(r) dr`` for radial nu in d >= 2."""
    d = nu.d
    total = sum(m * float(_one_minus_bessel_average(np.array([rho * abs(p)]), d)[0])
                for p, m in nu.atoms)
    if nu.density is None:
        return total
    B = min(math.pi / rho, 1.0)
    total += nu.integrate_radial(lambda r: _one_minus_bessel_average(rho * r, d), 0.0, B,
                                 exponent=2.0, rel_tol=1e-10).value
    R = R_factor / rho
    total += nu.integrate_radial(lambda r: np.ones_like(r), B, INF).value
    if d == 3:
        res = integrate.quad(lambda r: float(nu.radial_density(np.array([r]))[0]) / (rho * r),
                             B, INF, weight="sin", wvar=rho, limlst=200, limit=400)
        total -= res[0]
    else:
        edges = np.linspace(B, max(R, B + 1.0), 400)
        for a, b in zip(edges[:-1], edges[1:]):
            total -= integrate.quad(
                lambda r: float(nu.radial_density(np.array([r]))[0]
                                * _bessel_average(np.array([rho * r]), d)[0]),
                a, b, limit=200)[0]
    return total


# ---------------------------------------------------------------------------
# Lévy triplets

@dataclass(frozen=True)
class LevyTriplet:
    """Drift ``ell``, Gaussian matrix ``Q`` and Lévy measure ``nu`` in R^d."""

    ell: np.ndarray
    Q: np.ndarray
    nu: LevyMeasure
    d: int = 1
    closed_symbol: CharacteristicExponent | None = None
    bernstein: BernsteinFunction | None = None
    name: str = "custom"

    def __post_init__(self):
        ell = np.atleast_1d(np.asarray(self.ell, dtype=float))
        Q = np.atleast_2d(np.asarray(self.Q, dtype=float))
        if ell.shape != (self.d,) or Q.shape != (self.d, self.d):
            raise ConstructionError(f"ell must have shape ({self.d},) and Q ({self.d},{self.d})")
        if not np.allclose(Q, Q.T, atol=1e-12):
            raise ConstructionError("Q must be symmetric")
        if np.min(np.linalg.eigvalsh(Q)) < -1e-12:
            raise ConstructionError("Q must be positive semidefinite")
        if self.nu.d != self.d:
            raise ConstructionError("Lévy measure dimension does not match d")
        object.__setattr__(self, "ell", ell)
        object.__setattr__(self, "Q", Q)

    @property
    def gaussian_free(self) -> bool:
        return bool(np.all(self.Q == 0))

    def ell_hat(self) -> np.ndarray | None:
        """``ell - int_{0<|y|<1} y nu(dy)``, or None if the integral diverges."""
        if nu_frac_moment(self.nu, 1.0, "inner").divergent:
            return None
        comp = np.zeros(self.d)
        if self.d == 1:
            v = sum(m * p for p, m in self.nu.atoms if 0 < abs(p) < 1)
            if self.nu.density is not None:
                odd = self.nu.odd_density
                a = self.nu.small_exponent
                v += integrate_head(lambda r: r * odd(r), 1.0,
                                    None if a is None else a + 1.0).value
            comp[0] = v
        return self.ell - comp

    def symbol(self, force_quadrature: bool = False) -> CharacteristicExponent:
        if self.closed_symbol is not None and not force_quadrature:
            return self.closed_symbol
        if self.bernstein is not None and not force_quadrature:
            return symbol_from_bernstein(self.bernstein)
        return _lk_symbol(self)

    # -- constructors -------------------------------------------------------
    @classmethod
    def brownian(cls, d: int = 1) -> "LevyTriplet":
        """Standard Brownian motion, ``psi(xi) = |xi|^2 / 2``."""
        return cls(np.zeros(d), np.eye(d), zero_measure(d), d,
                   closed_symbol=CharacteristicExponent(lambda r: 0.5 * np.abs(r) ** 2 + 0j,
                                                        d=d, radial=True, name="brownian"),
                   name="brownian")

    @classmethod
    def symmetric_stable(cls, alpha: float, d: int = 1) -> "LevyTriplet":
        """Rotationally symmetric alpha-stable process, ``psi(xi) = |xi|^alpha``."""
        if alpha == 2:
            return cls(np.zeros(d), 2.0 * np.eye(d), zero_measure(d), d,
                       closed_symbol=power_symbol(2.0, d=d), name="symmetric-stable")
        return cls(np.zeros(d), np.zeros((d, d)), symmetric_stable_measure(alpha, d), d,
                   closed_symbol=CharacteristicExponent(
                       lambda r: np.abs(r) ** alpha + 0j, d=d, radial=True,
                       name=f"symmetric-stable({alpha:g})"),
                   name="symmetric-stable")

    @classmethod
    def from_bernstein(cls, phi: BernsteinFunction) -> "LevyTriplet":
        """The subordinator as a d = 1 Lévy process: ``ell = b + int_0^1 y nu(dy)``."""
        inner = nu_frac_moment(phi.nu, 1.0, "inner")
        if inner.divergent:
            raise ConstructionError("subordinator Lévy measure must integrate y near 0")
        return cls(np.array([phi.b + inner.value]), np.zeros((1, 1)), phi.nu, 1,
                   bernstein=phi, name=phi.name)

    @classmethod
    def compound_poisson(cls, eta: float, points: Sequence[float],
                         probs: Sequence[float] | None = None, ell: float = 0.0
                         ) -> "LevyTriplet":
        pts = np.asarray(points, dtype=float)
        ps = np.full(pts.shape, 1.0 / pts.size) if probs is None else np.asarray(probs, float)
        return cls(np.array([ell]), np.zeros((1, 1)), atom_measure(pts, eta * ps), 1,
                   name="compound-poisson")


def _lk_symbol(tr: LevyTriplet) -> CharacteristicExponent:
    nu = tr.nu
    if tr.d == 1:
        ell, q = float(tr.ell[0]), float(tr.Q[0, 0])

        def f(xi):
            xi_arr = np.atleast_1d(np.asarray(xi, dtype=float))
            out = np.empty(xi_arr.shape, dtype=complex)
            for i, x in enumerate(xi_arr.flat):
                if x == 0:
                    out.flat[i] = 0.0
                    continue
                ax = abs(x)
                re = 0.5 * q * x * x + _one_minus_cos(nu, ax)
                im = -ell * x - np.sign(x) * _sin_integral(nu, ax)
                out.flat[i] = complex(re, im)
            return out.reshape(np.shape(xi)) if np.ndim(xi) else out[0]

        return CharacteristicExponent(f, d=1, source="levy-khintchine", name=tr.name)

    radial = bool(np.all(tr.ell == 0)) and np.allclose(tr.Q, tr.Q[0, 0] * np.eye(tr.d))

    def jump(r):
        r_arr = np.atleast_1d(np.asarray(r, dtype=float))
        vals = np.array([0.0 if x == 0 else _radial_jump_symbol(nu, x) for x in r_arr.flat])
        return vals.reshape(r_arr.shape)

    if radial:
        q = float(tr.Q[0, 0])

        def fr(r):
            r = np.asarray(r, dtype=float)
            return (0.5 * q * r * r + jump(r).reshape(np.shape(r))).astype(complex)
        return CharacteristicExponent(fr, d=tr.d, radial=True, source="levy-khintchine",
                                      name=tr.name)

    def fv(xi):
        xi = np.asarray(xi, dtype=float)
        quad_form = 0.5 * np.einsum("...i,ij,...j->...", xi, tr.Q, xi)
        r = np.linalg.norm(xi, axis=-1)
        return quad_form + jump(r).reshape(r.shape) - 1j * (xi @ tr.ell)

    return CharacteristicExponent(fv, d=tr.d, radial=False, source="levy-khintchine",
                                  name=tr.name)


# ---------------------------------------------------------------------------
# plain-text family configuration

FAMILIES = ("stable-subordinator", "gamma", "drift", "compound-poisson", "truncated-stable",
            "symmetric-stable", "brownian")

REQUIRED = {
    "stable-subordinator": ("alpha",),
    "gamma": (),
    "drift": ("b",),
    "compound-poisson": ("eta",),
    "truncated-stable": ("alpha",),
    "symmetric-stable": ("alpha",),
    "brownian": (),
}


class FamilyConfigError(ValueError):
    """Missing or invalid family parameter."""


def _floats(s) -> list[float]:
    if isinstance(s, (list, tuple)):
        return [float(x) for x in s]
    return [float(x) for x in str(s).replace(";", ",").split(",") if x.strip()]


def family_from_config(cfg: dict):
    """Build a BernsteinFunction or LevyTriplet from key=value settings.

    Keys: ``family`` (one of FAMILIES), ``alpha``, ``beta``, ``c``, ``b``,
    ``eta``, ``jumps`` (comma list), ``probs`` (comma list), ``d``.
    Subordinator families return a BernsteinFunction; ``symmetric-stable``
    and ``brownian`` return a LevyTriplet.
    """
    fam = cfg.get("family")
    if fam is None:
        raise FamilyConfigError("missing required field 'family'")
    fam = str(fam).strip().lower()
    if fam not in FAMILIES:
        raise FamilyConfigError(f"unknown family {fam!r}; expected one of {', '.join(FAMILIES)}")
    for key in REQUIRED[fam]:
        if cfg.get(key) is None:
            raise FamilyConfigError(f"family {fam!r} requires field '{key}'")

    def num(key, default=None):
        v = cfg.get(key)
        if v is None:
            return default
        try:
            return float(v)
        except (TypeError, ValueError) as exc:
            raise FamilyConfigError(f"field '{key}' must be a number, got {v!r}") from exc

    d = int(num("d", 1))
    try:
        if fam == "stable-subordinator":
            return BernsteinFunction.stable(num("alpha"), num("c", 1.0))
        if fam == "gamma":
            return BernsteinFunction.gamma(num("alpha", 1.0), num("beta", 1.0))
        if fam == "drift":
            return BernsteinFunction.drift(num("b"))
        if fam == "compound-poisson":
            jumps = _floats(cfg.get("jumps", "1"))
            probs = _floats(cfg["probs"]) if cfg.get("probs") is not None else None
            return BernsteinFunction.compound_poisson(num("eta"), jumps, probs)
        if fam == "truncated-stable":
            return BernsteinFunction.truncated_stable(num("alpha"), num("c", 1.0))
        if fam == "symmetric-stable":
            return LevyTriplet.symmetric_stable(num("alpha"), d)
        return LevyTriplet.brownian(d)
    except ConstructionError as exc:
        raise FamilyConfigError(str(exc)) from exc


def as_triplet(obj) -> LevyTriplet:
    if isinstance(obj, LevyTriplet):
        return obj
    if isinstance(obj, BernsteinFunction):
        return LevyTriplet.from_bernstein(obj)
    raise TypeError(f"expected LevyTriplet or BernsteinFunction, got {type(obj).__name__}")


def as_symbol(obj) -> CharacteristicExponent:
    if isinstance(obj, CharacteristicExponent):
        return obj
    if isinstance(obj, LevyTriplet):
        return obj.symbol()
    if isinstance(obj, BernsteinFunction):
        return symbol_from_bernstein(obj)
    raise TypeError(f"cannot build a symbol from {type(obj).__name__}")
