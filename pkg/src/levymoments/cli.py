"""Command-line interface: ``levymoments <command> [options]``.

Commands
--------
indices   growth indices of a family (JSON)
moment    exact, bound or Monte Carlo moments on a t grid (CSV or JSON)
bound     one bound on a t grid with the witness it used (JSON or CSV)
harnack   subordinate log/power Harnack exponents and the SDE example
verify    invariant suites; exit status 1 when any check fails
table     exact moment next to every applicable bound on a t grid

Exit status is 0 on success, 1 when a verification suite fails and 2 on an
invalid configuration. ``--config FILE`` reads ``key = value`` lines that
mirror the long flags; flags given on the command line override the file.
The default seed is read from ``LEVYMOMENTS_SEED`` (0 when unset).
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import shlex
import sys
from dataclasses import dataclass

import numpy as np

from . import bounds as B
from .bounds import WitnessError
from .harnack import (
    HarnackProfile,
    HypothesisError,
    sde_harnack_profile,
    subordinate_log_harnack,
    subordinate_power_harnack,
)
from .indices import SNAP_ZERO, estimate_indices
from .moments import (
    MomentEstimate,
    classify_finiteness,
    levy_abs_moment_exact,
    levy_neg_moment_upper,
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
from .processes import (
    BernsteinFunction,
    FamilyConfigError,
    LevyTriplet,
    as_symbol,
    as_triplet,
    family_from_config,
)
from .verify import SUITES, run_suites

SCHEMA = 1
SEED_ENV = "LEVYMOMENTS_SEED"
EXIT_OK, EXIT_FAIL, EXIT_CONFIG = 0, 1, 2
SELECTORS = ("thm3.1a", "thm3.1b", "thm3.1c", "thm3.1d", "thm3.2a", "thm3.2b", "thm3.6a",
             "thm3.6b", "cor3.5", "no-big-jumps")
NEGATIVE_SELECTORS = ("thm3.1d", "thm3.6a", "thm3.6b")
EXP_SELECTORS = ("thm3.2a", "thm3.2b", "thm3.6b", "no-big-jumps")
SUBORDINATOR_SELECTORS = ("thm3.6a", "thm3.6b", "cor3.5", "no-big-jumps")
WITNESS_SHRINK = 0.9
FAMILY_KEYS = ("family", "alpha", "beta", "c", "b", "eta", "jumps", "probs", "d")
PHI_ALIASES = {"stable": "stable-subordinator", "tstable": "truncated-stable",
               "cp": "compound-poisson"}
PHI_POSITIONAL = {
    "stable-subordinator": ("alpha", "c"),
    "gamma": ("alpha", "beta"),
    "drift": ("b",),
    "truncated-stable": ("alpha", "c"),
    "compound-poisson": ("eta", "jumps"),
}


class ConfigError(ValueError):
    """Invalid command-line or config-file input (exit status 2)."""


CONFIG_ERRORS = (ConfigError, FamilyConfigError, HypothesisError, WitnessError, ValueError,
                 TypeError)


# ---------------------------------------------------------------------------
# parsing helpers

def parse_grid(spec: str) -> np.ndarray:
    """``start:stop:count[:log|linear]`` (log by default) or a comma list."""
    spec = spec.strip()
    if ":" not in spec:
        try:
            vals = np.array([float(x) for x in spec.split(",") if x.strip()])
        except ValueError as exc:
            raise ConfigError(f"invalid grid {spec!r}") from exc
    else:
        parts = spec.split(":")
        if len(parts) not in (3, 4):
            raise ConfigError(f"grid must be start:stop:count[:scale], got {spec!r}")
        scale = parts[3].strip().lower() if len(parts) == 4 else "log"
        try:
            start, stop, count = float(parts[0]), float(parts[1]), int(float(parts[2]))
        except ValueError as exc:
            raise ConfigError(f"invalid grid {spec!r}") from exc
        if count < 1:
            raise ConfigError(f"grid count must be positive, got {count}")
        if scale in ("log", "geom", "geometric"):
            if start <= 0 or stop <= 0:
                raise ConfigError("log grids need positive endpoints")
            vals = np.geomspace(start, stop, count)
        elif scale in ("linear", "lin"):
            vals = np.linspace(start, stop, count)
        else:
            raise ConfigError(f"grid scale must be log or linear, got {scale!r}")
    if vals.size == 0:
        raise ConfigError(f"empty grid {spec!r}")
    return vals


def parse_floats(spec: str, count: int | None = None, name: str = "list") -> list[float]:
    try:
        vals = [float(x) for x in spec.split(",") if x.strip()]
    except ValueError as exc:
        raise ConfigError(f"{name} must be comma-separated numbers, got {spec!r}") from exc
    if count is not None and len(vals) != count:
        raise ConfigError(f"{name} needs {count} values, got {len(vals)}")
    return vals


def parse_count(spec) -> int:
    """Sample counts accept float syntax such as ``1e6``."""
    try:
        v = float(spec)
    except (TypeError, ValueError) as exc:
        raise argparse.ArgumentTypeError(f"invalid count {spec!r}") from exc
    if not (v >= 2 and v == int(v)):
        raise argparse.ArgumentTypeError(f"count must be an integer >= 2, got {spec!r}")
    return int(v)


def parse_phi(spec: str) -> dict:
    """``name:p1,p2`` or ``name:key=v,key=v`` into a family config."""
    name, _, rest = spec.partition(":")
    name = PHI_ALIASES.get(name.strip().lower(), name.strip().lower())
    cfg: dict = {"family": name}
    if not rest:
        return cfg
    positional = PHI_POSITIONAL.get(name, ())
    items = [x.strip() for x in rest.split(",") if x.strip()]
    for i, item in enumerate(items):
        if "=" in item:
            k, v = item.split("=", 1)
            cfg[k.strip()] = v.strip()
        elif i < len(positional):
            cfg[positional[i]] = item
        else:
            raise ConfigError(f"too many parameters in --phi {spec!r}")
    return cfg


def default_seed() -> int:
    raw = os.environ.get(SEED_ENV)
    if raw is None or raw.strip() == "":
        return 0
    try:
        return int(raw)
    except ValueError as exc:
        raise ConfigError(f"{SEED_ENV} must be an integer, got {raw!r}") from exc


def read_config(path: str) -> list[str]:
    """Turn ``key = value`` lines into long-flag tokens.

    ``true``/``yes``/``on`` values become bare switches, ``false``/``no``/``off``
    are dropped; ``#`` starts a comment.
    """
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path!r}: {exc.strerror}") from exc
    tokens: list[str] = []
    for lineno, line in enumerate(lines, 1):
        line = line.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{lineno}: expected key = value, got {line!r}")
        key, value = (s.strip() for s in line.split("=", 1))
        flag = "--" + key.replace("_", "-")
        low = value.lower()
        if low in ("true", "yes", "on"):
            tokens.append(flag)
        elif low in ("false", "no", "off"):
            continue
        else:
            tokens.extend([flag, *shlex.split(value)] if value else [flag])
    return tokens


def expand_config(argv: list[str]) -> list[str]:
    """Insert config-file tokens right after the command words so that
    explicit flags, which come later, take precedence."""
    argv = list(argv)
    path = None
    for i, tok in enumerate(argv):
        if tok == "--config":
            if i + 1 >= len(argv):
                raise ConfigError("--config needs a path")
            path = argv[i + 1]
            del argv[i:i + 2]
            break
        if tok.startswith("--config="):
            path = tok.split("=", 1)[1]
            del argv[i]
            break
    if path is None:
        return argv
    tokens = read_config(path)
    words = 2 if argv[:1] == ["harnack"] else 1
    pos = 0
    while pos < min(words, len(argv)) and not argv[pos].startswith("-"):
        pos += 1
    return argv[:pos] + tokens + argv[pos:]


# ---------------------------------------------------------------------------
# output

def _clean(x):
    """JSON-safe copy: numpy scalars to Python, non-finite floats to strings."""
    if isinstance(x, dict):
        return {str(k): _clean(v) for k, v in x.items()}
    if isinstance(x, (list, tuple)):
        return [_clean(v) for v in x]
    if isinstance(x, np.ndarray):
        return _clean(x.tolist())
    if isinstance(x, (np.bool_, bool)):
        return bool(x)
    if isinstance(x, (np.integer,)):
        return int(x)
    if isinstance(x, (float, np.floating)):
        v = float(x)
        if math.isnan(v):
            return "nan"
        if math.isinf(v):
            return "inf" if v > 0 else "-inf"
        return v
    return x


def restore_floats(x):
    """Inverse of the non-finite encoding used in JSON output."""
    if isinstance(x, dict):
        return {k: restore_floats(v) for k, v in x.items()}
    if isinstance(x, list):
        return [restore_floats(v) for v in x]
    if x in ("nan", "inf", "-inf"):
        return float(x)
    return x


def to_json(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **_clean(payload)}, indent=2, sort_keys=False)


def rows_to_csv(rows: list[dict], columns: list[str]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([_fmt(r.get(c)) for c in columns])
    return buf.getvalue()


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


# ---------------------------------------------------------------------------
# family and grid arguments

def add_family_args(p: argparse.ArgumentParser) -> None:
    g = p.add_argument_group("family")
    g.add_argument("--family", help="stable-subordinator, gamma, drift, compound-poisson, "
                   "truncated-stable, symmetric-stable or brownian")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float, help="Gamma rate parameter")
    g.add_argument("--c", type=float, help="stable scale")
    g.add_argument("--b", type=float, help="drift")
    g.add_argument("--eta", type=float, help="compound Poisson rate")
    g.add_argument("--jumps", help="comma list of jump sizes")
    g.add_argument("--probs", help="comma list of jump probabilities")
    g.add_argument("--d", type=int, help="dimension (symmetric-stable, brownian)")


def add_grid_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("--t", type=float, help="single time")
    p.add_argument("--t-grid", help="start:stop:count[:log|linear] or a comma list")


def family_of(args):
    cfg = {k: getattr(args, k, None) for k in FAMILY_KEYS}
    if cfg["family"] is None:
        raise ConfigError("missing required field 'family'")
    return family_from_config(cfg)


def times_of(args) -> np.ndarray:
    if args.t_grid is not None:
        ts = parse_grid(args.t_grid)
    elif args.t is not None:
        ts = np.array([args.t])
    else:
        raise ConfigError("give --t or --t-grid")
    if np.any(ts <= 0):
        raise ConfigError("times must be positive")
    return ts


def describe(obj) -> dict:
    """Family name and parameters of a subordinator or triplet."""
    if isinstance(obj, LevyTriplet):
        params = dict(obj.bernstein.params if obj.bernstein is not None else obj.nu.params)
        params["d"] = obj.d
        return {"family": obj.name, "params": params}
    return {"family": obj.name, "params": obj.params}


def _dimension(obj) -> int:
    return obj.d if isinstance(obj, LevyTriplet) else 1


def _subordinator(obj, what: str) -> BernsteinFunction:
    if isinstance(obj, BernsteinFunction):
        return obj
    if isinstance(obj, LevyTriplet) and obj.bernstein is not None:
        return obj.bernstein
    raise ConfigError(f"{what} needs a subordinator family")


# ---------------------------------------------------------------------------
# moments

@dataclass
class BoundPlan:
    """A selector bound evaluated per t, with the parameters it used."""

    selector: str
    evaluate: object
    params: dict


def _index_default(value, name: str, override):
    if override is not None:
        return float(override)
    if value is None or not math.isfinite(value) or value <= SNAP_ZERO:
        raise ConfigError(f"cannot choose a default {name}: estimated index is {value}; "
                          f"pass --{name.replace('_', '-')}")
    return WITNESS_SHRINK * float(value)


def plan_bound(selector: str, obj, kappa: float, lam: float | None, args) -> BoundPlan:
    """Resolve a selector to a callable ``t -> bound``.

    Witness exponents default to 0.9 times the estimated index (rho_inf for
    subordinator negative moments, delta_inf for symbols, beta0 and
    sigma0 for the symbol bounds); thresholds are tuned per t.
    """
    if selector not in SELECTORS:
        raise ConfigError(f"unknown bound selector {selector!r}; expected one of "
                          f"{', '.join(SELECTORS)}")
    negative = selector in NEGATIVE_SELECTORS
    if negative and kappa >= 0:
        raise ConfigError(f"{selector} bounds a negative moment; pass --kappa < 0")
    if not negative and kappa <= 0:
        raise ConfigError(f"{selector} bounds a positive moment; pass --kappa > 0")
    if selector in EXP_SELECTORS and lam is None:
        raise ConfigError(f"{selector} bounds an exponential moment; pass --lambda")
    if selector not in EXP_SELECTORS and lam is not None:
        raise ConfigError(f"{selector} bounds a power moment; drop --lambda")
    k = abs(kappa)
    d = _dimension(obj)
    params: dict = {"kappa": kappa}
    if lam is not None:
        params["lambda"] = lam

    if selector == "thm3.1a":
        tr = as_triplet(obj)
        return BoundPlan(selector, lambda t: B.bound_abs_moment_small_time(tr, k, t), params)
    if selector == "thm3.1b":
        tr = as_triplet(obj)
        return BoundPlan(selector, lambda t: B.bound_abs_moment_bv(tr, k, t), params)
    if selector == "thm3.2a":
        tr = as_triplet(obj)
        return BoundPlan(selector, lambda t: B.bound_exp_abs_moment(tr, k, lam, t), params)
    if selector == "thm3.2b":
        tr = as_triplet(obj)
        return BoundPlan(selector, lambda t: B.bound_exp_abs_moment_bv(tr, k, lam, t), params)
    if selector == "no-big-jumps":
        phi = _subordinator(obj, selector)
        return BoundPlan(selector, lambda t: B.bound_sub_exp_pos_no_big_jumps(phi, k, lam, t),
                         params)

    rep = estimate_indices(obj)
    if selector == "thm3.1c":
        psi = as_symbol(obj)
        beta = _index_default(rep.beta0, "beta_index", args.beta_index)
        w = B.symbol_upper_witness(psi, beta)
        tb = B.bound_abs_moment_symbol(psi, d, k, beta, w)
        params.update(beta_index=beta, witness=w.to_dict())
        return BoundPlan(selector, tb, params)
    if selector == "cor3.5":
        phi = _subordinator(obj, selector)
        sigma = _index_default(rep.sigma0, "sigma", args.sigma)
        tb = B.bound_sub_pos_moment_symbol(phi, k, sigma)
        params.update(sigma=sigma)
        return BoundPlan(selector, tb, params)
    if selector == "thm3.1d":
        psi = as_symbol(obj)
        delta = _index_default(rep.delta_inf, "delta", args.delta)
        params.update(delta=delta)

        def neg_symbol(t):
            w = B.tuned_lower_witness(
                psi, delta, lambda w: B.bound_neg_moment_symbol(psi, d, k, w)(t))
            return B.bound_neg_moment_symbol(psi, d, k, w)(t)

        return BoundPlan(selector, neg_symbol, params)
    phi = _subordinator(obj, selector)
    rho = _index_default(rep.rho_inf, "rho", args.rho)
    params.update(rho=rho)
    if selector == "thm3.6a":
        def neg(t):
            w = B.tuned_lower_witness(phi, rho, lambda w: B.bound_sub_neg_moment(phi, k, w, t))
            return B.bound_sub_neg_moment(phi, k, w, t)

        return BoundPlan(selector, neg, params)

    def exp_neg(t):
        w = B.tuned_lower_witness(
            phi, rho, lambda w: B.bound_sub_exp_neg_moment(phi, k, lam, w, t, log=True))
        return B.bound_sub_exp_neg_moment(phi, k, lam, w, t)

    return BoundPlan(selector, exp_neg, params)


def exact_moment(obj, kappa: float, lam: float | None, t: float):
    """Quadrature route for the requested functional."""
    if kappa == 0:
        raise ConfigError("kappa must be nonzero")
    kind = ("neg" if kappa < 0 else "abs") if lam is None else (
        "exp_neg" if kappa < 0 else "exp_abs")
    dec = classify_finiteness(obj, kind, abs(kappa), lam)
    if dec.status == "infinite":
        return MomentEstimate.infinite(f"{dec.criterion}: {dec.reason}")
    if isinstance(obj, BernsteinFunction):
        if lam is None:
            if kappa > 0:
                return sub_pos_moment_exact(obj, kappa, t)
            return sub_neg_moment_exact(obj, -kappa, t)
        if kappa < 0:
            return sub_exp_neg_moment_exact(obj, -kappa, lam, t)
        raise ConfigError("no quadrature route for E exp(lam S_t^kappa); use --mc or --bound")
    psi = as_symbol(obj)
    d = _dimension(obj)
    if lam is not None:
        raise ConfigError("no quadrature route for exponential moments of Lévy processes; "
                          "use --mc or --bound")
    if kappa > 0:
        return levy_abs_moment_exact(psi, d, kappa, t)
    return levy_neg_moment_upper(psi, d, -kappa, t)


def mc_moment(obj, kappa: float, lam: float | None, t: float, n: int, seed: int):
    g = power_functional(kappa) if lam is None else exp_functional(kappa, lam)
    batch = sample_process(obj, t, n, seed)
    return empirical_moment(batch, g, {"kappa": kappa, "lambda": lam})


def _cell_seeds(seed: int, count: int) -> list[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def moment_rows(args) -> tuple[list[dict], dict]:
    obj = family_of(args)
    ts = times_of(args)
    kappa, lam = args.kappa, args.lam
    if kappa is None:
        raise ConfigError("missing required field 'kappa'")
    rows: list[dict] = []
    meta: dict = {**describe(obj), "kappa": kappa, "lambda": lam}
    if args.bound is not None:
        plan = plan_bound(args.bound, obj, kappa, lam, args)
        meta.update(selector=plan.selector, bound_params=plan.params)
        for t in ts:
            rows.append({"t": float(t), "value": float(plan.evaluate(float(t))), "error": 0.0,
                         "method": "bound"})
    elif args.mc:
        seed = default_seed() if args.seed is None else args.seed
        meta.update(n=args.n, seed=seed)
        for t, s in zip(ts, _cell_seeds(seed, len(ts))):
            m = mc_moment(obj, kappa, lam, float(t), args.n, s)
            rows.append({"t": float(t), "value": m.mean, "error": m.std_error,
                         "method": "monte-carlo"})
    else:
        for t in ts:
            est = exact_moment(obj, kappa, lam, float(t))
            rows.append({"t": float(t), "value": est.value, "error": est.abs_error,
                         "method": est.method, "status": est.status,
                         "certificate": est.certificate})
    return rows, meta


# ---------------------------------------------------------------------------
# commands

CSV_COLUMNS = ["t", "value", "error", "method"]


def _emit(args, payload: dict, rows: list[dict] | None = None, columns=None) -> None:
    fmt = args.format
    if fmt == "csv" and rows is not None:
        sys.stdout.write(rows_to_csv(rows, columns or CSV_COLUMNS))
    else:
        sys.stdout.write(to_json(payload) + "\n")


def cmd_indices(args) -> int:
    obj = family_of(args)
    rep = estimate_indices(obj)
    _emit(args, {"command": "indices", **describe(obj), **rep.to_dict()})
    return EXIT_OK


def cmd_moment(args) -> int:
    rows, meta = moment_rows(args)
    _emit(args, {"command": "moment", **meta, "rows": rows}, rows)
    return EXIT_OK


def cmd_bound(args) -> int:
    args.bound, args.mc = args.selector, False
    rows, meta = moment_rows(args)
    _emit(args, {"command": "bound", **meta, "rows": rows}, rows)
    return EXIT_OK


def cmd_table(args) -> int:
    obj = family_of(args)
    ts = times_of(args)
    kappa, lam = args.kappa, args.lam
    if kappa is None:
        raise ConfigError("missing required field 'kappa'")
    wanted = args.bounds.split(",") if args.bounds else list(SELECTORS)
    plans, skipped = [], {}
    for sel in (s.strip() for s in wanted):
        try:
            plans.append(plan_bound(sel, obj, kappa, lam, args))
        except CONFIG_ERRORS as exc:
            if args.bounds:
                raise
            skipped[sel] = str(exc)
    columns = ["t", "exact", "exact_error"] + [p.selector for p in plans]
    rows = []
    for t in ts:
        row = {"t": float(t)}
        try:
            est = exact_moment(obj, kappa, lam, float(t))
            row["exact"], row["exact_error"] = est.value, est.abs_error
        except ConfigError:
            row["exact"], row["exact_error"] = math.nan, math.nan
        for p in plans:
            row[p.selector] = float(p.evaluate(float(t)))
        rows.append(row)
    _emit(args, {"command": "table", **describe(obj), "kappa": kappa,
                 "lambda": lam, "bounds": {p.selector: p.params for p in plans},
                 "skipped": skipped, "rows": rows}, rows, columns)
    return EXIT_OK


def _phi_of(args) -> BernsteinFunction:
    if args.phi is not None:
        obj = family_from_config(parse_phi(args.phi))
    else:
        obj = family_of(args)
    return _subordinator(obj, "harnack")


def _t_value(args):
    ts = times_of(args)
    return float(ts[0]) if ts.size == 1 and args.t_grid is None else ts


def cmd_harnack(args) -> int:
    if args.kind == "sde":
        return cmd_harnack_sde(args)
    phi = _phi_of(args)
    t = _t_value(args)
    if args.kind == "log":
        C = parse_floats(args.C, 3, "--C")
        prof = HarnackProfile.log(args.kappa1, args.kappa2, *C)
        res = subordinate_log_harnack(prof, phi, t, case=args.case, rho=args.rho,
                                      sigma=args.sigma, exact=args.exact)
    else:
        H = parse_floats(args.H, 3, "--H")
        prof = HarnackProfile.power(args.kappa1, args.kappa2, *H, args.p)
        res = subordinate_power_harnack(prof, phi, args.r, t, rho=args.rho)
    _emit(args, {"command": f"harnack {args.kind}", "family": phi.name, "params": phi.params,
                 "profile": prof.to_dict(), **res.to_dict()})
    return EXIT_OK


def cmd_harnack_sde(args) -> int:
    """Constant gamma and K (OU drift ``l(x) = -K x`` when checked by Monte Carlo)."""
    gamma, K = args.gamma, args.K
    t = _t_value(args)
    res = sde_harnack_profile(lambda r: gamma, lambda r: K, args.e, t=t, p=args.p,
                              kappa1=args.kappa1, kappa2=args.kappa2)
    payload = {"command": "harnack sde", "gamma": gamma, "K": K, "e": args.e, **res.to_dict()}
    status = EXIT_OK
    if args.mc:
        if np.ndim(t) != 0:
            raise ConfigError("the Monte Carlo check needs a single --t")
        seed = default_seed() if args.seed is None else args.seed
        checks = []
        for k in range(args.seeds):
            sim = simulate_sde_coupling(lambda s, x: -K * x, 1.0 / gamma, [args.x], [args.e],
                                        t, args.n, args.steps, seed=seed + k)
            lc = verify_shift_harnack(sim, float(res.log_exponent),
                                      lambda y: 1.0 + np.exp(-y ** 2))
            entry = {"seed": seed + k, "log": lc.to_dict()}
            if args.p is not None:
                pc = verify_shift_harnack(sim, float(res.power_exponent),
                                          lambda y: np.exp(-y ** 2), "power", args.p)
                entry["power"] = pc.to_dict()
            checks.append(entry)
        ok = all(c["log"]["holds"] and c.get("power", {"holds": True})["holds"] for c in checks)
        payload["mc"] = {"n": args.n, "steps": args.steps, "checks": checks, "passed": ok}
        status = EXIT_OK if ok else EXIT_FAIL
    _emit(args, payload)
    return status


def cmd_verify(args) -> int:
    names = [s.strip() for s in args.suite.split(",")]
    for s in names:
        if s != "all" and s not in SUITES:
            raise ConfigError(f"unknown suite {s!r}; expected one of {', '.join(SUITES)}, all")
    seed = default_seed() if args.seed is None else args.seed
    families = [f.strip() for f in args.family.split(",")] if args.family else None
    reports = run_suites(names, n=args.n, seed=seed, families=families, seeds=args.seeds)
    passed = all(r.passed for r in reports)
    rows = [{"suite": r.suite, **row.to_dict()} for r in reports for row in r.rows]
    payload = {"command": "verify", "seed": seed, "passed": passed,
               "suites": [r.to_dict() for r in reports]}
    if args.format == "csv":
        sys.stdout.write(rows_to_csv(rows, ["suite", "name", "passed", "value", "reference",
                                            "margin"]))
    else:
        sys.stdout.write(to_json(payload) + "\n")
    return EXIT_OK if passed else EXIT_FAIL


# ---------------------------------------------------------------------------
# parser

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="levymoments", description=__doc__.split("\n\n")[0],
                     formatter_class=argparse.RawDescriptionHelpFormatter)
    parser.add_argument("--config", help="key = value file mirroring the long flags")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(p, default):
        p.add_argument("--format", choices=("json", "csv"), default=default)

    p = sub.add_parser("indices", help="growth indices of a family")
    add_family_args(p)
    fmt(p, "json")
    p.set_defaults(func=cmd_indices)

    def moment_opts(p):
        add_family_args(p)
        add_grid_args(p)
        p.add_argument("--kappa", type=float, help="moment order; negative for S^-kappa")
        p.add_argument("--lambda", dest="lam", type=float, help="exponential-moment rate")
        p.add_argument("--rho", type=float, help="lower growth exponent of phi at infinity")
        p.add_argument("--sigma", type=float, help="growth exponent of phi at 0")
        p.add_argument("--delta", type=float, help="lower growth exponent of Re psi")
        p.add_argument("--beta-index", type=float, help="growth exponent of |psi| at 0")

    p = sub.add_parser("moment", help="exact, bound or Monte Carlo moment")
    moment_opts(p)
    mode = p.add_mutually_exclusive_group()
    mode.add_argument("--exact", action="store_true", help="quadrature route (default)")
    mode.add_argument("--bound", metavar="SELECTOR", help=", ".join(SELECTORS))
    mode.add_argument("--mc", action="store_true", help="Monte Carlo")
    p.add_argument("--n", type=parse_count, default=100_000)
    p.add_argument("--seed", type=int)
    fmt(p, "csv")
    p.set_defaults(func=cmd_moment)

    p = sub.add_parser("bound", help="one bound on a t grid")
    p.add_argument("selector", help=", ".join(SELECTORS))
    moment_opts(p)
    fmt(p, "json")
    p.set_defaults(func=cmd_bound, n=None, seed=None)

    p = sub.add_parser("table", help="exact moment next to every applicable bound")
    moment_opts(p)
    p.add_argument("--bounds", help="comma list of selectors (default: all applicable)")
    fmt(p, "csv")
    p.set_defaults(func=cmd_table)

    p = sub.add_parser("harnack", help="Harnack exponents")
    hsub = p.add_subparsers(dest="kind", required=True, parser_class=_Parser)
    for kind, desc in (("log", "log-Harnack exponent for a subordinate process"),
                       ("power", "power-Harnack exponent for a subordinate process")):
        h = hsub.add_parser(kind, help=desc)
        h.add_argument("--phi", help="family shorthand, e.g. stable:0.5 or gamma:1,1")
        add_family_args(h)
        add_grid_args(h)
        h.add_argument("--kappa1", type=float, required=True)
        h.add_argument("--kappa2", type=float, required=True)
        h.add_argument("--rho", type=float)
        if kind == "log":
            h.add_argument("--C", required=True, help="C1,C2,C3")
            h.add_argument("--case", choices=("a", "b", "c", "auto"), default="auto")
            h.add_argument("--sigma", type=float)
            h.add_argument("--exact", action="store_true",
                           help="quadrature moments instead of the bounds")
        else:
            h.add_argument("--H", required=True, help="H1,H2,H3")
            h.add_argument("--p", type=float, required=True)
            h.add_argument("--r", type=float, default=2.0, help="Hölder exponent (> 1)")
        fmt(h, "json")
        h.set_defaults(func=cmd_harnack)
    h = hsub.add_parser("sde", help="coupling exponent for constant gamma and K")
    add_grid_args(h)
    h.add_argument("--gamma", type=float, default=1.0)
    h.add_argument("--K", type=float, default=1.0)
    h.add_argument("--e", type=float, required=True, help="shift length |e|")
    h.add_argument("--p", type=float)
    h.add_argument("--kappa1", type=float, default=1.0)
    h.add_argument("--kappa2", type=float, default=1.0)
    h.add_argument("--mc", action="store_true", help="Monte Carlo check of the inequality")
    h.add_argument("--x", type=float, default=0.0)
    h.add_argument("--n", type=parse_count, default=100_000)
    h.add_argument("--steps", type=int, default=2048)
    h.add_argument("--seeds", type=int, default=1)
    h.add_argument("--seed", type=int)
    fmt(h, "json")
    h.set_defaults(func=cmd_harnack)

    p = sub.add_parser("verify", help="run invariant suites")
    p.add_argument("--suite", default="all", help=", ".join(SUITES) + " or all")
    p.add_argument("--n", type=parse_count, help="Monte Carlo samples per cell")
    p.add_argument("--seed", type=int)
    p.add_argument("--family", help="restrict the domination matrix (comma list)")
    p.add_argument("--seeds", type=int, default=20, help="SDE seeds for the harnack suite")
    fmt(p, "json")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: list[str] | None = None) -> int:
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = build_parser().parse_args(expand_config(argv))
        return args.func(args)
    except CONFIG_ERRORS as exc:
        print(f"levymoments: error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
