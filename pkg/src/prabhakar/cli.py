"""Command-line interface.

Subcommands: ``eval-mlf``, ``apply``, ``solve-ivp``, ``solve-heat``, ``verify``.
Exit codes: 0 success, 2 invalid input, 3 numerical failure, 4 verification
failure.  ``FC_MAX_TERMS`` in the environment overrides the series term cap.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import funcalg as fa
from . import mlf
from .errors import ConstraintWarning, InvalidParams, PrabhakarError, TruncationWarning
from .funcalg import MLSeries
from .levels import NthLevelSpec
from .mlf import PrabhakarParams, SeriesControl
from .operators import (
    SampledFn, nth_level_derivative_quad, pr_derivative_series, prabhakar_integral_quad,
)
from .solvers import HeatProblem, IVPProblem, evaluate_ivp, ivp_initial_values, ivp_residual, solve_heat, solve_ivp
from .verify import SUITES, run_suite

EXIT_OK, EXIT_INPUT, EXIT_NUMERIC, EXIT_VERIFY = 0, 2, 3, 4


class CliError(Exception):
    def __init__(self, msg, code=EXIT_INPUT):
        super().__init__(msg)
        self.code = code


@dataclass
class Table:
    columns: list
    rows: list
    params: dict = field(default_factory=dict)
    metadata: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def _jsonable(v):
    if isinstance(v, dict):
        return {k: _jsonable(u) for k, u in v.items()}
    if isinstance(v, (list, tuple)):
        return [_jsonable(u) for u in v]
    if isinstance(v, np.generic):
        v = v.item()
    if isinstance(v, float) and not math.isfinite(v):
        return str(v)
    return v


def render(table: Table, fmt: str, command: str) -> str:
    if fmt == "json":
        env = {
            "command": command,
            "params": table.params,
            "columns": table.columns,
            "rows": [dict(zip(table.columns, r)) for r in table.rows],
            "metadata": table.metadata,
            "warnings": table.warnings,
        }
        return json.dumps(_jsonable(env), indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(table.columns)
    for r in table.rows:
        w.writerow([_fmt(v) for v in r])
    return buf.getvalue()


# ---------------------------------------------------------------- parsing helpers

def _floats(text):
    if text is None:
        return None
    try:
        return [float(t) for t in str(text).replace(",", " ").split()]
    except ValueError as e:
        raise CliError(f"expected a comma separated list of numbers, got {text!r}") from e


def _grid(args, default=(0.1, 1.0, 10)):
    lo = default[0] if args.x_from is None else args.x_from
    hi = default[1] if args.x_to is None else args.x_to
    n = default[2] if args.x_steps is None else args.x_steps
    if n < 1:
        raise CliError("--x-steps must be at least 1")
    return np.array([lo]) if n == 1 else np.linspace(lo, hi, n)


def _read_json(path):
    try:
        if path == "-":
            text = sys.stdin.read()
        else:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
    except OSError as e:
        raise CliError(f"cannot read {path}: {e}") from e
    try:
        return fa.loads_exact(text)
    except json.JSONDecodeError as e:
        raise CliError(f"{path} is not valid JSON: {e}") from e


def _num(d):
    """Convert Decimal leaves from loads_exact to float, keeping MLSeries objects exact."""
    if isinstance(d, dict):
        if "terms" in d and "alpha" in d:
            return d
        return {k: _num(v) for k, v in d.items()}
    if isinstance(d, list):
        return [_num(v) for v in d]
    if isinstance(d, bool) or d is None or isinstance(d, str):
        return d
    return float(d)


def _spec_from_args(args, cfg=None) -> NthLevelSpec:
    cfg = cfg or {}

    def pick(name, flag, default=None):
        v = getattr(args, flag, None)
        if v is not None:
            return v
        return cfg.get(name, default)

    bi = _floats(args.beta_i) if args.beta_i is not None else cfg.get("beta_i")
    th = _floats(args.theta_i) if args.theta_i is not None else cfg.get("theta_i")
    alpha, beta = pick("alpha", "alpha"), pick("beta", "beta")
    if alpha is None or beta is None:
        raise CliError("--alpha and --beta are required")
    if bi is None:
        raise CliError("--beta-i is required")
    if th is None:
        th = [0.0] * len(bi)
    return NthLevelSpec(alpha, beta, pick("gamma", "gamma", 0.0), pick("delta", "delta", 0.0),
                        tuple(bi), tuple(th))


def _control():
    raw = os.environ.get("FC_MAX_TERMS")
    if raw is None:
        return None
    try:
        n = int(raw)
    except ValueError as e:
        raise CliError(f"FC_MAX_TERMS must be an integer, got {raw!r}") from e
    return SeriesControl(max_terms=n)


# ---------------------------------------------------------------- functions for apply

def parse_function(text: str, alpha, delta):
    """Return ``(series or None, SampledFn, description)``.

    Accepted: ``power:r=R``, ``exp:c=C``, ``sin:w=W``, a path to an MLSeries
    JSON file, ``-`` for stdin, or an inline MLSeries JSON object.
    """
    text = text.strip()
    if text.startswith("{") or text.endswith(".json") or text == "-":
        d = fa.loads_exact(text) if text.startswith("{") else _read_json(text)
        f = MLSeries.from_dict(d)
        return f, SampledFn.from_series(f, T=1e300), "series"
    name, _, rest = text.partition(":")
    kw = {}
    for part in filter(None, rest.split(",")):
        k, _, v = part.partition("=")
        try:
            kw[k.strip()] = float(v)
        except ValueError as e:
            raise CliError(f"bad function parameter {part!r}") from e
    if name == "power":
        r = kw.get("r", 1.0)
        ders = [_power_der(r, i) for i in range(1, 4)]
        f = fa.from_power(r, alpha, delta) if alpha is not None else None
        return f, SampledFn(lambda t: np.asarray(t) ** r, 1e300, r, tuple(ders)), f"x^{r:g}"
    if name == "exp":
        c = kw.get("c", 1.0)
        ders = [(lambda t, i=i: c**i * np.exp(c * np.asarray(t))) for i in range(1, 4)]
        series = None
        if alpha is not None and float(alpha) == 1.0 and delta == c:
            series = fa.kernel_term(1, c, 1, 1)  # E^1_{1,1}(c x) = e^(c x)
        return series, SampledFn(lambda t: np.exp(c * np.asarray(t)), 1e300, 0.0, tuple(ders)), f"exp({c:g}x)"
    if name == "sin":
        w = kw.get("w", 1.0)
        ders = [(lambda t, i=i: w**i * np.sin(w * np.asarray(t) + i * np.pi / 2)) for i in range(1, 4)]
        return None, SampledFn(lambda t: np.sin(w * np.asarray(t)), 1e300, 1.0, tuple(ders)), f"sin({w:g}x)"
    raise CliError(f"unknown function {text!r}; use power:r=, exp:c=, sin:w= or an MLSeries JSON")


def _power_der(r, i):
    coef = math.prod(r - j for j in range(i))

    def d(t):
        t = np.asarray(t, dtype=float)
        return coef * t ** (r - i) if coef else np.zeros_like(t)

    return d


# ---------------------------------------------------------------- commands

def cmd_eval_mlf(args) -> Table:
    if args.alpha is None or args.beta is None:
        raise CliError("--alpha and --beta are required")
    ctl = _control()
    g = 1.0 if args.gamma is None else args.gamma
    zs = _floats(args.z) if args.z is not None else list(_grid(args, (-1.0, 1.0, 11)))
    rows = []
    for z in zs:
        try:
            v, n, ext = mlf.prabhakar_e_info(args.alpha, args.beta, g, z, ctl)
            rows.append([z, v, n, ext, ""])
        except PrabhakarError as e:
            rows.append([z, math.nan, 0, False, f"{type(e).__name__}: {e}"])
    if rows and all(r[4] for r in rows):
        raise CliError(rows[0][4], EXIT_NUMERIC)
    return Table(["z", "value", "terms_used", "extended", "flag"], rows,
                 {"alpha": args.alpha, "beta": args.beta, "gamma": g})


def cmd_apply(args) -> Table:
    op = args.op
    ctl = _control()
    xs = _grid(args)
    if np.any(xs <= 0):
        raise CliError("x values must be positive")
    series, sampled, desc = parse_function(args.function, args.alpha, args.delta or 0.0)
    if series is not None:
        args.alpha = float(series.alpha) if args.alpha is None else args.alpha
        args.delta = series.delta if args.delta is None else args.delta
    params = {"op": op, "function": desc}
    if op == "nth-level":
        spec = _spec_from_args(args)
        if series is not None:
            spec.check_series(series)
        exact_fn = (lambda f: fa.nth_level_derivative(f, spec, strict=False))
        quad_fn = (lambda x: nth_level_derivative_quad(sampled, spec, float(x)))
        params["spec"] = spec.to_dict()
    else:
        if args.alpha is None or args.beta is None:
            raise CliError("--alpha and --beta are required")
        p = PrabhakarParams(args.alpha, args.beta, args.gamma or 0.0, args.delta or 0.0)
        params.update(alpha=p.alpha, beta=p.beta, gamma=p.gamma, delta=p.delta)
        if series is not None and (float(series.alpha) != p.alpha or series.delta != p.delta):
            raise CliError("the function's (alpha, delta) differ from the operator's")
        if op == "integral":
            exact_fn = (lambda f: fa.prabhakar_integrate(f, fa.exact(p.beta), fa.exact(p.gamma)))
            quad_fn = (lambda x: float(prabhakar_integral_quad(sampled, p, float(x))))
        elif op == "pr-derivative":
            exact_fn = (lambda f: fa.pr_derivative(f, fa.exact(p.beta), fa.exact(p.gamma), strict=False))
            quad_fn = (lambda x: pr_derivative_series(sampled, p, float(x), ctl))
        else:
            raise CliError(f"unknown operator {op!r}")
    result = None
    if series is not None:
        result = exact_fn(series)
        if args.emit_series:
            return Table([], [], params, {"series": result.to_dict()})
    rows, failures = [], 0
    for x in xs:
        ex = fa.evaluate(result, float(x), ctl) if result is not None else None
        flag = ""
        qv = None
        if not args.no_quad:
            try:
                qv = quad_fn(x)
            except PrabhakarError as e:
                flag = f"{type(e).__name__}: {e}"
                failures += 1
        dfct = None
        if ex is not None and qv is not None:
            dfct = abs(ex - qv) / (1 + max(abs(ex), abs(qv)))
        rows.append([float(x), ex, qv, dfct, flag])
    if failures == len(rows) and result is None:
        raise CliError(rows[0][4], EXIT_NUMERIC)
    meta = {"tolerance": args.tol}
    if result is not None:
        meta["series"] = result.to_dict()
    return Table(["x", "exact", "quadrature", "defect", "flag"], rows, params, meta)


def _ivp_problem(args) -> IVPProblem:
    cfg = _num(_read_json(args.config)) if args.config else {}
    spec = _spec_from_args(args, cfg)
    lam = args.lam if args.lam is not None else cfg.get("lambda")
    if lam is None:
        raise CliError("--lambda is required")
    forcing = cfg.get("forcing")
    forcing = MLSeries.from_dict(forcing) if forcing else None
    a = _floats(args.a) if args.a is not None else cfg.get("a", [])
    kind = args.initial_kind or cfg.get("initial_kind", "rl")
    xs = _grid(args)
    return IVPProblem(spec, lam, forcing, tuple(a), kind, float(np.max(xs)))


def cmd_solve_ivp(args) -> Table:
    p = _ivp_problem(args)
    xs = _grid(args)
    ctl = _control()
    sol = solve_ivp(p, args.i_max, ctl)
    rows = []
    worst = 0.0
    for x in xs:
        y = evaluate_ivp(sol, float(x), ctl)
        res = ivp_residual(sol, p, float(x), ctl)
        fx = fa.evaluate(p.forcing, float(x)) if p.forcing is not None else 0.0
        rel = res / (1 + abs(p.lam * y) + abs(fx))
        worst = max(worst, rel)
        rows.append([float(x), y, res])
    meta = {
        "c_k": list(sol.c_k),
        "i_max": sol.series_i_max,
        "tail_bound": sol.tail_bound,
        "initial_kind": p.initial_kind,
        "initial_values_recovered": ivp_initial_values(sol),
        "max_normalized_residual": worst,
        "tolerance": args.tol,
    }
    table = Table(["x", "y", "residual"], rows, p.to_dict(), meta)
    table.failed = worst > args.tol
    return table


def _heat_problem(args):
    if not args.config:
        raise CliError("solve-heat needs --config")
    cfg = _num(_read_json(args.config))
    spec = _spec_from_args(args, cfg)
    try:
        u0 = dict(cfg["u0"])
        kind = u0.pop("kind")
        params = u0.pop("params", {})
        params.update(u0)
        prob = HeatProblem.from_profile(spec, cfg["k_tilde"], cfg["L"], int(cfg["N"]), kind, **params)
        times = [float(t) for t in cfg["times"]]
    except (KeyError, TypeError) as e:
        raise CliError(f"heat config is missing or has a malformed field: {e}") from e
    return prob, times, cfg


def cmd_solve_heat(args) -> Table:
    prob, times, cfg = _heat_problem(args)
    res = solve_heat(prob, times, args.i_max, _control())
    rows = [[float(x), float(t), float(res.values[i, j])]
            for j, t in enumerate(res.times) for i, x in enumerate(res.grid)]
    meta = dict(res.metadata)
    meta.update(modes_used=res.modes_used, max_levels=res.max_levels)
    params = {k: v for k, v in cfg.items() if k != "u0"}
    params["u0_kind"] = cfg["u0"].get("kind")
    return Table(["x", "t", "u"], rows, params, meta)


def cmd_verify(args) -> Table:
    suite = run_suite(args.suite, args.seed, args.cases, args.tol)
    table = Table([], [], {"suite": suite.name, "seed": suite.corpus_seed})
    # the suite's own report is the canonical, byte-stable output
    table.text = suite.to_json() + "\n" if args.format == "json" else suite.to_csv()
    table.failed = not suite.passed
    return table


COMMANDS = {
    "eval-mlf": cmd_eval_mlf,
    "apply": cmd_apply,
    "solve-ivp": cmd_solve_ivp,
    "solve-heat": cmd_solve_heat,
    "verify": cmd_verify,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    g = common.add_argument_group("parameters")
    g.add_argument("--alpha", type=float)
    g.add_argument("--beta", type=float)
    g.add_argument("--gamma", type=float)
    g.add_argument("--delta", type=float)
    g.add_argument("--beta-i", help="comma separated level orders")
    g.add_argument("--theta-i", help="comma separated level types")
    g.add_argument("--lambda", dest="lam", type=float)
    g.add_argument("--x-from", type=float)
    g.add_argument("--x-to", type=float)
    g.add_argument("--x-steps", type=int)
    g.add_argument("--i-max", type=int, default=40)
    g.add_argument("--tol", type=float)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--format", choices=("csv", "json"), default="csv")
    g.add_argument("--out", help="output file (default stdout)")
    g.add_argument("--config", help="JSON configuration file")

    parser = argparse.ArgumentParser(prog="prabhakar", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("eval-mlf", parents=[common], help="tabulate E^gamma_{alpha,beta}(z)")
    p.add_argument("--z", help="comma separated arguments (else --x-from/--x-to/--x-steps)")

    p = sub.add_parser("apply", parents=[common], help="apply an operator on an x grid")
    p.add_argument("--op", choices=("integral", "pr-derivative", "nth-level"), required=True)
    p.add_argument("--function", required=True,
                   help="power:r=R, exp:c=C, sin:w=W, an MLSeries JSON file or inline object")
    p.add_argument("--emit-series", action="store_true", help="print the exact result series only")
    p.add_argument("--no-quad", action="store_true", help="skip the quadrature column")

    p = sub.add_parser("solve-ivp", parents=[common], help="series solution of the linear IVP")
    p.add_argument("--a", help="comma separated initial values a_0, a_1, ...")
    p.add_argument("--initial-kind", choices=("rl", "prabhakar", "constants"))

    sub.add_parser("solve-heat", parents=[common], help="time-fractional heat equation on a grid")

    p = sub.add_parser("verify", parents=[common], help="run an identity suite")
    p.add_argument("--suite", choices=SUITES, required=True)
    p.add_argument("--cases", type=int, default=25)
    return parser


_DEFAULT_TOL = {"apply": 1e-5, "solve-ivp": 1e-5}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.tol is None and args.command != "verify":
        args.tol = _DEFAULT_TOL.get(args.command, 1e-5)
    try:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("ignore")
            warnings.simplefilter("always", TruncationWarning)
            warnings.simplefilter("always", ConstraintWarning)
            table = COMMANDS[args.command](args)
        table.warnings = sorted({f"{w.category.__name__}: {w.message}" for w in caught})
        if args.command == "apply" and not args.emit_series:
            bad = [r for r in table.rows if r[3] is not None and not r[3] <= args.tol]
            table.failed = bool(bad)
        if args.command == "apply" and args.emit_series:
            out = json.dumps(table.metadata["series"]) + "\n"
        elif hasattr(table, "text"):
            out = table.text
        else:
            out = render(table, args.format, args.command)
    except CliError as e:
        print(f"error: {e}", file=sys.stderr)
        return e.code
    except InvalidParams as e:
        print(f"invalid input: {e}", file=sys.stderr)
        return EXIT_INPUT
    except PrabhakarError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERIC
    if args.out:
        with open(args.out, "w", encoding="utf-8", newline="") as fh:
            fh.write(out)
    else:
        sys.stdout.write(out)
    for w in table.warnings:
        print(f"warning: {w}", file=sys.stderr)
    return EXIT_VERIFY if getattr(table, "failed", False) else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
