"""Seeded Monte Carlo oracles for the reference families and the SDE example.

All samplers draw in fixed-size chunks, each from its own generator spawned
from ``np.random.SeedSequence(seed)``, so a batch depends only on
``(seed, n)`` and the chunks can be drawn in any order.
"""

from __future__ import annotations

import csv
import math
from dataclasses import asdict, dataclass, field
from typing import Callable

import numpy as np

from .numerics import warn
from .processes import BernsteinFunction, LevyTriplet

CHUNK = 1 << 16
SDE_STEPS = 2048


@dataclass
class SampleBatch:
    """Independent draws of ``X_t`` (shape (n,) or (n, d))."""

    values: np.ndarray
    seed: int | None
    family: str
    t: float
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return len(self.values)

    def descriptor(self) -> str:
        parts = [f"family={self.family}"] + [f"{k}={v}" for k, v in sorted(self.params.items())]
        parts += [f"t={self.t:g}", f"seed={self.seed}", f"n={self.n}"]
        return " ".join(parts)

    def to_csv(self, path) -> None:
        """One sample per line after a comment line with the descriptor."""
        with open(path, "w", newline="") as fh:
            fh.write(f"# {self.descriptor()}\n")
            w = csv.writer(fh)
            vals = np.asarray(self.values)
            if vals.ndim == 1:
                w.writerow(["value"])
                w.writerows([[repr(float(v))] for v in vals])
            else:
                w.writerow([f"x{i}" for i in range(vals.shape[1])])
                w.writerows([[repr(float(v)) for v in row] for row in vals])


@dataclass
class EmpiricalMoment:
    """Sample mean with ``std_error = sample std / sqrt(n)``.

    ``evidence`` holds the means of the finite values over the first n/8,
    n/4, n/2 and n samples when the functional is infinite on some samples.
    """

    mean: float
    std_error: float
    n: int
    functional: dict = field(default_factory=dict)
    evidence: list = field(default_factory=list)

    def to_dict(self) -> dict:
        return asdict(self)


def _chunks(n: int, seed):
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    k = -(-n // CHUNK)
    children = np.random.SeedSequence(seed).spawn(k)
    for i, child in enumerate(children):
        yield np.random.default_rng(child), min(CHUNK, n - i * CHUNK)


def _draw(n: int, seed, one: Callable[[np.random.Generator, int], np.ndarray]) -> np.ndarray:
    return np.concatenate([one(rng, m) for rng, m in _chunks(int(n), seed)])


def kanter_factor(u: np.ndarray, alpha: float) -> np.ndarray:
    """Log of the Kanter integrand
    ``A(u) = sin(alpha u) sin(u)^{-1/alpha} sin((1-alpha) u)^{(1-alpha)/alpha}``."""
    return (np.log(np.sin(alpha * u)) - np.log(np.sin(u)) / alpha
            + (1.0 - alpha) / alpha * np.log(np.sin((1.0 - alpha) * u)))


def sample_stable_subordinator(alpha: float, t: float, n: int, seed=None, c: float = 1.0
                               ) -> SampleBatch:
    """Draws of ``S_t`` for ``phi(u) = c u^alpha`` by Kanter's representation.

    ``S_1 = A(U) E^{1 - 1/alpha}`` with U uniform on (0, pi) and E unit
    exponential has ``E exp(-u S_1) = exp(-u^alpha)``; self-similarity gives
    ``S_t = (c t)^{1/alpha} S_1``. Computed in log space.
    """
    if not 0 < alpha < 1:
        raise ValueError(f"alpha must lie in (0, 1), got {alpha}")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    log_scale = math.log(c * t) / alpha

    def one(rng, m):
        u = rng.uniform(0.0, math.pi, m)
        e = rng.standard_exponential(m)
        return np.exp(log_scale + kanter_factor(u, alpha) + (1.0 - 1.0 / alpha) * np.log(e))

    return SampleBatch(_draw(n, seed, one), seed, "stable-subordinator", t,
                       {"alpha": alpha, "c": c})


def sample_gamma_process(alpha: float, beta: float, t: float, n: int, seed=None
                         ) -> SampleBatch:
    """Draws of ``S_t ~ Gamma(shape alpha t, rate beta)``."""
    if not (alpha > 0 and beta > 0 and t > 0):
        raise ValueError("alpha, beta and t must be positive")
    vals = _draw(n, seed, lambda rng, m: rng.gamma(alpha * t, 1.0 / beta, m))
    return SampleBatch(vals, seed, "gamma", t, {"alpha": alpha, "beta": beta})


def sample_compound_poisson(eta: float, jump_sampler: Callable, t: float, n: int, seed=None,
                            drift: float = 0.0, params: dict | None = None) -> SampleBatch:
    """Draws of ``drift t + sum_{i <= N_t} Y_i`` with ``N_t ~ Poisson(eta t)``.

    ``jump_sampler(rng, size)`` returns ``size`` jump sizes.
    """
    if not (eta >= 0 and t > 0):
        raise ValueError("eta must be nonnegative and t positive")

    def one(rng, m):
        counts = rng.poisson(eta * t, m)
        total = int(counts.sum())
        out = np.full(m, drift * t)
        if total:
            jumps = np.asarray(jump_sampler(rng, total), dtype=float)
            owner = np.repeat(np.arange(m), counts)
            out += np.bincount(owner, weights=jumps, minlength=m)
        return out

    return SampleBatch(_draw(n, seed, one), seed, "compound-poisson", t,
                       dict(params or {}, eta=eta))


def atom_sampler(points, probs=None) -> Callable:
    pts = np.asarray(points, dtype=float)
    ps = None if probs is None else np.asarray(probs, dtype=float) / np.sum(probs)
    return lambda rng, size: rng.choice(pts, size=size, p=ps)


def sample_subordinate_brownian(alpha: float, d: int, t: float, n: int, seed=None
                                ) -> SampleBatch:
    """Symmetric alpha-stable ``X_t`` in R^d with symbol ``|xi|^alpha``.

    ``X_t = sqrt(2 S_t) Z`` with ``S`` an (alpha/2)-stable subordinator
    (``phi(u) = u^{alpha/2}``) and Z standard normal in R^d: a Brownian
    motion with symbol ``|xi|^2`` run at the random time ``S_t``.
    """
    if not 0 < alpha < 2:
        raise ValueError(f"alpha must lie in (0, 2), got {alpha}")
    half = alpha / 2.0
    log_scale = math.log(t) / half

    def one(rng, m):
        u = rng.uniform(0.0, math.pi, m)
        e = rng.standard_exponential(m)
        s = np.exp(log_scale + kanter_factor(u, half) + (1.0 - 1.0 / half) * np.log(e))
        z = rng.standard_normal((m, d))
        return np.sqrt(2.0 * s)[:, None] * z

    vals = _draw(n, seed, one)
    if d == 1:
        vals = vals[:, 0]
    return SampleBatch(vals, seed, "symmetric-stable", t, {"alpha": alpha, "d": d})


def sample_brownian(d: int, t: float, n: int, seed=None) -> SampleBatch:
    """``B_t ~ N(0, t I)`` (symbol ``|xi|^2/2``)."""
    vals = _draw(n, seed, lambda rng, m: math.sqrt(t) * rng.standard_normal((m, d)))
    if d == 1:
        vals = vals[:, 0]
    return SampleBatch(vals, seed, "brownian", t, {"d": d})


def sample_process(obj, t: float, n: int, seed=None) -> SampleBatch:
    """Dispatch to the exact sampler of a named family."""
    if isinstance(obj, BernsteinFunction):
        p = obj.params
        if obj.name == "stable-subordinator":
            return sample_stable_subordinator(p["alpha"], t, n, seed, p.get("c", 1.0))
        if obj.name == "gamma":
            return sample_gamma_process(p["alpha"], p["beta"], t, n, seed)
        if obj.name == "compound-poisson" and "jumps" in p:
            return sample_compound_poisson(p["eta"], atom_sampler(p["jumps"], p["probs"]),
                                           t, n, seed, drift=obj.b,
                                           params={"jumps": p["jumps"], "probs": p["probs"]})
        if obj.name == "drift":
            return SampleBatch(np.full(int(n), p["b"] * t), seed, "drift", t, dict(p))
    if isinstance(obj, LevyTriplet):
        if obj.name == "brownian":
            return sample_brownian(obj.d, t, n, seed)
        if obj.name == "symmetric-stable":
            alpha = obj.nu.params.get("alpha", 2.0) if not obj.nu.is_zero else 2.0
            if alpha == 2.0:
                b = sample_brownian(obj.d, 2.0 * t, n, seed)
                return SampleBatch(b.values, seed, "symmetric-stable", t, {"alpha": 2.0})
            return sample_subordinate_brownian(alpha, obj.d, t, n, seed)
        if obj.bernstein is not None:
            return sample_process(obj.bernstein, t, n, seed)
    raise ValueError(f"no exact sampler for {getattr(obj, 'name', type(obj).__name__)!r}")


# ---------------------------------------------------------------------------
# functionals

def _norm(values: np.ndarray) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return np.abs(v) if v.ndim == 1 else np.linalg.norm(v, axis=1)


def power_functional(kappa: float) -> Callable:
    """``x -> |x|^kappa`` (kappa may be negative)."""
    return lambda x: _norm(x) ** kappa


def exp_functional(kappa: float, lam: float) -> Callable:
    """``x -> exp(lam |x|^kappa)``."""
    return lambda x: np.exp(lam * _norm(x) ** kappa)


def empirical_moment(batch: SampleBatch | np.ndarray, g: Callable | None = None,
                     descriptor: dict | None = None) -> EmpiricalMoment:
    """Mean of ``g(X)`` over the batch with its standard error.

    Samples where ``g`` is infinite give ``mean = inf`` with prefix means
    as divergence evidence.
    """
    values = batch.values if isinstance(batch, SampleBatch) else np.asarray(batch)
    with np.errstate(all="ignore"):
        y = np.asarray(values if g is None else g(values), dtype=float)
    n = len(y)
    if n < 2:
        raise ValueError("need at least two samples")
    desc = dict(descriptor or {})
    if not np.all(np.isfinite(y)):
        finite = np.where(np.isfinite(y), y, np.nan)
        ev = [float(np.nanmean(finite[: max(1, n // k)])) for k in (8, 4, 2, 1)]
        return EmpiricalMoment(math.inf, math.inf, n, desc, ev)
    mean = float(np.mean(y))
    se = float(np.std(y, ddof=1) / math.sqrt(n))
    return EmpiricalMoment(mean, se, n, desc)


# ---------------------------------------------------------------------------
# SDE example

def _diag(sigma, t: float, d: int) -> np.ndarray:
    s = sigma(t) if callable(sigma) else sigma
    s = np.asarray(s, dtype=float)
    if s.ndim == 0:
        return np.full(d, float(s))
    if s.shape != (d,):
        raise ValueError(f"Sigma must be a scalar or a length-{d} diagonal, got shape {s.shape}")
    return s


@dataclass
class SDESample:
    """Terminal values ``X_t^x`` of Euler–Maruyama paths and the shift ``e``.

    ``P_t g(x)`` is estimated by ``expect(g)``, ``P_t[g(. + e)](x)`` by
    ``expect(g, shifted=True)``.
    """

    X: np.ndarray
    e: np.ndarray
    t: float
    x0: np.ndarray
    n_steps: int
    seed: int | None

    def expect(self, g: Callable, shifted: bool = False) -> EmpiricalMoment:
        pts = self.X + self.e if shifted else self.X
        return empirical_moment(_squeeze(pts), g, {"shifted": shifted})

    def log_f(self, f: Callable) -> EmpiricalMoment:
        """``P_t log f(x)``."""
        return empirical_moment(_squeeze(self.X), lambda y: np.log(f(y)), {"functional": "log f"})

    def shifted_f(self, f: Callable, p: float = 1.0) -> EmpiricalMoment:
        """``P_t[f^p(. + e)](x)``."""
        return empirical_moment(_squeeze(self.X + self.e), lambda y: f(y) ** p,
                                {"functional": f"f^{p:g}(. + e)"})


def _squeeze(x: np.ndarray) -> np.ndarray:
    return x[:, 0] if x.ndim == 2 and x.shape[1] == 1 else x


def _lipschitz_probe(drift, t: float, x0: np.ndarray, h: float = 1e-4) -> float:
    d = len(x0)
    base = np.asarray(drift(0.0, x0[None, :]), dtype=float).reshape(1, d)
    k = 0.0
    for i in range(d):
        xp = x0.copy()
        xp[i] += h
        diff = np.asarray(drift(0.0, xp[None, :]), dtype=float).reshape(1, d) - base
        k = max(k, float(np.linalg.norm(diff)) / h)
    return k


def simulate_sde_coupling(drift: Callable, sigma, x0, e, t: float, n_paths: int,
                          n_steps: int | None = None, seed=None) -> SDESample:
    """Euler–Maruyama for ``dX = l_s(X) ds + Sigma_s dW`` from ``x0`` up to ``t``.

    ``drift(s, X)`` acts on an (m, d) array; ``sigma`` is a scalar, a
    length-d diagonal or a callable of s returning either. ``n_steps``
    defaults to ``2048 max(t, 1)``. A warning is issued when the step
    size times a finite-difference Lipschitz probe of the drift exceeds 0.5.
    """
    x0 = np.atleast_1d(np.asarray(x0, dtype=float))
    d = len(x0)
    if d not in (1, 2, 3):
        raise ValueError(f"dimension must be 1, 2 or 3, got {d}")
    e = np.atleast_1d(np.asarray(e, dtype=float))
    if e.shape != (d,):
        raise ValueError(f"e must have shape ({d},)")
    if not t > 0:
        raise ValueError(f"t must be positive, got {t}")
    if n_steps is None:
        n_steps = int(math.ceil(SDE_STEPS * max(t, 1.0)))
    dt = t / n_steps
    K = _lipschitz_probe(drift, t, x0)
    if K * dt > 0.5:
        warn(f"Euler-Maruyama step {dt:.3g} is large for drift Lipschitz constant ~{K:.3g}; "
             "increase n_steps")
    sq = math.sqrt(dt)
    diags = [_diag(sigma, k * dt, d) for k in range(n_steps)]

    def one(rng, m):
        X = np.tile(x0, (m, 1))
        for k in range(n_steps):
            s = k * dt
            X = X + np.asarray(drift(s, X), dtype=float).reshape(m, d) * dt \
                + diags[k] * (sq * rng.standard_normal((m, d)))
        return X

    X = _draw(n_paths, seed, one)
    return SDESample(X, e, t, x0, n_steps, seed)


@dataclass
class HarnackCheck:
    """Outcome of an empirical shift Harnack check.

    ``margin = rhs - lhs``; the check holds when ``lhs <= rhs + 3 se`` with
    ``se`` the delta-method standard error of ``lhs - rhs``.
    """

    holds: bool
    kind: str
    lhs: float
    rhs: float
    exponent: float
    std_error: float
    margin: float

    def to_dict(self) -> dict:
        return asdict(self)


def verify_shift_harnack(sample: SDESample, exponent: float, f: Callable,
                         kind: str = "log", p: float | None = None, sigmas: float = 3.0
                         ) -> HarnackCheck:
    """Check ``P_t log f(x) <= log P_t[f(. + e)](x) + exponent`` (``kind='log'``,
    f >= 1) or ``p log P_t f(x) <= log P_t[f^p(. + e)](x) + exponent``
    (``kind='power'``, f >= 0 bounded) on the simulated paths.
    """
    X = _squeeze(sample.X)
    Xe = _squeeze(sample.X + sample.e)
    n = len(X)
    if kind == "log":
        a = np.log(f(X))
        b = f(Xe)
        mb = float(np.mean(b))
        lhs = float(np.mean(a))
        rhs = math.log(mb) + exponent
        influence = a - b / mb
    elif kind == "power":
        if p is None or not p > 1:
            raise ValueError("the power check needs p > 1")
        a = f(X)
        b = f(Xe) ** p
        ma, mb = float(np.mean(a)), float(np.mean(b))
        lhs = p * math.log(ma)
        rhs = math.log(mb) + exponent
        influence = p * a / ma - b / mb
    else:
        raise ValueError(f"kind must be 'log' or 'power', got {kind!r}")
    se = float(np.std(influence, ddof=1) / math.sqrt(n))
    holds = lhs <= rhs + sigmas * se
    return HarnackCheck(bool(holds), kind, lhs, rhs, float(exponent), se, rhs - lhs)


__all__ = [
    "SampleBatch",
    "EmpiricalMoment",
    "SDESample",
    "HarnackCheck",
    "sample_stable_subordinator",
    "sample_gamma_process",
    "sample_compound_poisson",
    "sample_subordinate_brownian",
    "sample_brownian",
    "sample_process",
    "atom_sampler",
    "kanter_factor",
    "power_functional",
    "exp_functional",
    "empirical_moment",
    "simulate_sde_coupling",
    "verify_shift_harnack",
]
