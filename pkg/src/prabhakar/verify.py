"""Randomized identity suites with deterministic CSV/JSON reports.

Each suite compares two independently computed values per case and records
``defect = |lhs - rhs| / (1 + max(|lhs|, |rhs|))``.  Failures are data: a suite
never raises for a failed identity, and an exception inside a case is caught
and recorded as an infinite defect with the error text.
"""

from __future__ import annotations

import csv
import io
import json
import math
import warnings
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np
from scipy.special import gammaln, rgamma

from . import funcalg as fa
from .errors import ConstraintWarning, InvalidParams, PrabhakarError, TruncationWarning
from .funcalg import MLSeries, MLTerm
from .levels import NthLevelSpec
from .operators import (
    SampledFn, hilfer_prabhakar_metadata, inversion_residual_quad, nth_level_derivative_quad,
    theorem31_decomposition,
)
from .solvers import (
    HeatProblem, IVPProblem, hilfer_prabhakar_solution_metadata, ivp_derivative,
    ivp_initial_values, solve_heat, solve_ivp, evaluate_ivp,
)

SUITES = ("semigroup", "inversion", "thm31", "reductions", "ivp_residual", "heat_mode")
MAX_RETRIES = 1000


@dataclass
class CaseRow:
    case: int
    params: dict
    lhs: float
    rhs: float
    defect: float
    note: str = ""


@dataclass
class IdentitySuite:
    name: str
    corpus_seed: int
    cases: int
    tolerance: float
    rows: list = field(default_factory=list)

    @property
    def max_defect(self) -> float:
        return max((r.defect for r in self.rows), default=0.0)

    @property
    def failures(self) -> list:
        return [r for r in self.rows if not r.defect <= self.tolerance]

    @property
    def passed(self) -> bool:
        return not self.failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["suite", "case", "params", "lhs", "rhs", "defect", "passed", "note"])
        for r in self.rows:
            w.writerow([self.name, r.case, _dumps(r.params), _num(r.lhs), _num(r.rhs),
                        _num(r.defect), int(r.defect <= self.tolerance), r.note])
        return buf.getvalue()

    def to_dict(self) -> dict:
        return {
            "suite": self.name,
            "seed": self.corpus_seed,
            "cases": self.cases,
            "tolerance": self.tolerance,
            "max_defect": self.max_defect,
            "passed": self.passed,
            "rows": [
                {"case": r.case, "params": r.params, "lhs": r.lhs, "rhs": r.rhs,
                 "defect": r.defect, "passed": r.defect <= self.tolerance, "note": r.note}
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return _dumps(self.to_dict(), indent=2)


def _num(v: float) -> str:
    return format(v, ".17g")


def _clean(o):
    if isinstance(o, float) and not math.isfinite(o):
        return str(o)
    if isinstance(o, Fraction):
        return float(o)
    if isinstance(o, dict):
        return {k: _clean(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_clean(v) for v in o]
    if isinstance(o, np.generic):
        return o.item()
    return o


def _dumps(o, indent=None) -> str:
    return json.dumps(_clean(o), sort_keys=True, indent=indent, allow_nan=False)


def defect(lhs: float, rhs: float) -> float:
    if not (math.isfinite(lhs) and math.isfinite(rhs)):
        return math.inf
    return abs(lhs - rhs) / (1.0 + max(abs(lhs), abs(rhs)))


# ---------------------------------------------------------------- corpus

def _r3(v) -> float:
    return round(float(v), 3)


def random_spec(rng, n=None, beta_range=(0.0, 1.5), gamma_zero=False) -> NthLevelSpec:
    """Draw a valid spec; alpha in [0.2, 1.8], gamma in [-2, 2], delta in [-1, 1]."""
    for _ in range(MAX_RETRIES):
        a = _r3(rng.uniform(0.2, 1.8))
        b = _r3(rng.uniform(*beta_range))
        g = 0.0 if gamma_zero else _r3(rng.uniform(-2, 2))
        d = _r3(rng.uniform(-1, 1))
        nn = int(rng.integers(1, 4)) if n is None else n
        th = [_r3(t) for t in rng.uniform(0, 1, nn)]
        share = rng.dirichlet(np.ones(nn)) * rng.uniform(0, 1) * (nn - b)
        bi = [_r3(s) for s in share]
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", ConstraintWarning)
                return NthLevelSpec(a, b, g, d, tuple(bi), tuple(th))
        except PrabhakarError:
            continue
    raise RuntimeError("could not draw a valid spec")


def random_function(rng, spec: NthLevelSpec) -> MLSeries:
    """A function in the domain of the spec's derivative with generic initial data.

    Terms with ``mu > nu`` are smooth enough for any gamma; a term at
    ``mu = nu`` carries a nonzero leading initial value, and for A >= 2 one
    initial-value kernel ``(nu - k, gamma')`` adds a higher-order datum.
    """
    nu = spec.nu
    terms = [MLTerm(_r3(rng.uniform(-1, 1)), nu + fa.exact(_r3(rng.uniform(0.05, 2))),
                    _r3(rng.uniform(-2, 2))) for _ in range(2)]
    terms.append(MLTerm(_r3(rng.uniform(-1, 1)), nu, _r3(rng.uniform(-2, 2))))
    if spec.A >= 2:
        k = int(rng.integers(1, spec.A))
        terms.append(MLTerm(_r3(rng.uniform(-1, 1)), nu - k, spec.gamma_prime))
    return MLSeries(spec.alpha, spec.delta, terms)


def _spec_params(spec: NthLevelSpec) -> dict:
    return spec.to_dict()


# ---------------------------------------------------------------- semigroup

def _weights(g: float, delta: float, M: int) -> np.ndarray:
    # (g)_j delta^j / j! by recurrence; the closed form overflows long before the product does
    w = np.ones(M)
    for j in range(1, M):
        w[j] = w[j - 1] * (g + j - 1) * delta / j
    return w


def _power_apply(coef: np.ndarray, e0: float, alpha: float, delta: float, beta: float, g: float):
    """Apply the Prabhakar integral (beta, g) to ``sum_m coef[m] x^(e0 + alpha m)``.

    Termwise: the kernel expands into ``sum_j (g)_j delta^j / j! x^(beta+alpha j-1)/Gamma``
    and each power is integrated with the Beta integral.
    """
    M = len(coef)
    j = np.arange(M)
    w = _weights(g, delta, M)
    out = np.zeros(M)
    for m in range(M):
        if coef[m] == 0.0:
            continue
        p = e0 + alpha * m
        jj = j[: M - m]
        ratio = np.exp(gammaln(p + 1) - gammaln(p + 1 + beta + alpha * jj))
        out[m:] += coef[m] * w[: M - m] * ratio
    return out, e0 + beta


def semigroup_power_route(f: MLSeries, ops, x, M: int | None = None) -> np.ndarray:
    """Evaluate ``ops[0] ops[1] ... f`` through power series and Beta integrals only."""
    alpha, delta = float(f.alpha), f.delta
    if M is None:
        M = int(math.ceil(70.0 / alpha)) + 30
    x = np.asarray(x, dtype=float)
    total = np.zeros_like(x)
    m = np.arange(M)
    for t in f.terms:
        mu, g = float(t.mu), float(t.gamma)
        coef = t.coeff * _weights(g, delta, M) * rgamma(alpha * m + mu)
        e0 = mu - 1
        for b, gg in reversed(ops):
            coef, e0 = _power_apply(coef, e0, alpha, delta, b, gg)
        total += np.array([np.sum(coef * xx ** (e0 + alpha * m)) for xx in x])
    return total


def _suite_semigroup(rng, c):
    xs = np.linspace(0.1, 1.0, 10)
    a = _r3(rng.uniform(0.2, 1.8))
    d = _r3(rng.uniform(-1, 1))
    f = MLSeries(a, d, [MLTerm(_r3(rng.uniform(-1, 1)), _r3(rng.uniform(0.1, 3)), _r3(rng.uniform(-2, 2)))
                        for _ in range(int(rng.integers(1, 4)))])
    b1, b2 = _r3(rng.uniform(0.05, 2)), _r3(rng.uniform(0.05, 2))
    g1, g2 = _r3(rng.uniform(-2, 2)), _r3(rng.uniform(-2, 2))
    params = {"alpha": a, "delta": d, "beta1": b1, "gamma1": g1, "beta2": b2, "gamma2": g2,
              "f": f.to_dict()}
    composed = fa.prabhakar_integrate(fa.prabhakar_integrate(f, b2, g2), b1, g1)
    direct = fa.prabhakar_integrate(f, fa.exact(b1) + fa.exact(b2), fa.exact(g1) + fa.exact(g2))
    same = composed.terms == direct.terms
    params["exact_match"] = same
    lhs = semigroup_power_route(f, [(b1, g1), (b2, g2)], xs)
    rhs = fa.evaluate_array(direct, xs)
    ds = [defect(u, v) for u, v in zip(lhs, rhs)]
    i = int(np.argmax(ds))
    params["x"] = float(xs[i])
    return CaseRow(c, params, float(lhs[i]), float(rhs[i]),
                   ds[i] if same else math.inf, "" if same else "term lists differ")


# ---------------------------------------------------------------- inversion / decomposition

_X3 = (0.25, 0.5, 1.0)


def _suite_inversion(rng, c):
    spec = random_spec(rng)
    f = random_function(rng, spec)
    params = {"spec": _spec_params(spec), "f": f.to_dict()}
    xs = np.array(_X3)
    fx = fa.evaluate_array(f, xs)
    # lhs: E[D f] by quadrature plus the exact correction terms, rhs: f
    lhs = inversion_residual_quad(f, spec, xs) + fx
    ds = [defect(u, v) for u, v in zip(lhs, fx)]
    i = int(np.argmax(ds))
    params["x"] = float(xs[i])
    return CaseRow(c, params, float(lhs[i]), float(fx[i]), ds[i])


def _suite_thm31(rng, c):
    spec = random_spec(rng)
    f = random_function(rng, spec)
    params = {"spec": _spec_params(spec), "f": f.to_dict()}
    Df = fa.nth_level_derivative(f, spec)
    worst = None
    for x in _X3:
        first, second = theorem31_decomposition(f, spec, x)
        lhs = fa.evaluate(Df, x)
        row = (defect(lhs, first - second), x, lhs, first - second)
        worst = row if worst is None or row[0] > worst[0] else worst
    params["x"] = worst[1]
    return CaseRow(c, params, worst[2], worst[3], worst[0])


# ---------------------------------------------------------------- reductions

def power_rule(r: float, spec: NthLevelSpec, x: float) -> float:
    """nth-level derivative of x^r when gamma = 0 or delta = 0 (pure power kernels)."""
    q = r + 1 - float(spec.nu)
    if q <= 0 and float(q).is_integer():
        return 0.0
    return math.gamma(r + 1) / math.gamma(r + 1 - float(spec.beta)) * x ** (r - float(spec.beta))


def _metadata_mismatch(a: dict, b: dict) -> int:
    return sum(1 for k in a if a[k] != b.get(k)) + sum(1 for k in b if k not in a)


def _suite_reductions(rng, c):
    kind = ("gamma0", "delta0", "hilfer")[c % 3]
    if kind == "hilfer":
        a, b = _r3(rng.uniform(0.2, 1.8)), _r3(rng.uniform(0.05, 0.95))
        g, d, th = _r3(rng.uniform(-2, 2)), _r3(rng.uniform(-1, 1)), _r3(rng.uniform(0, 1))
        spec = NthLevelSpec.hilfer(a, b, g, d, th)
        mm = _metadata_mismatch(spec.operator_metadata(), hilfer_prabhakar_metadata(a, b, g, d, th))
        sol_meta = hilfer_prabhakar_solution_metadata(a, b, g, d, th, lam=0.5, i_max=6)
        mm += sol_meta["mismatches"]
        params = {"kind": kind, "spec": _spec_params(spec), "theta": th}
        return CaseRow(c, params, float(mm), 0.0, float(mm), "metadata mismatches")
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstraintWarning)
        if kind == "gamma0":
            spec = random_spec(rng, gamma_zero=True)
        else:
            s = random_spec(rng)
            spec = NthLevelSpec(s.alpha, s.beta, s.gamma, 0.0, s.beta_i, s.theta_i)
    r = _r3(float(spec.nu) - 1 + rng.uniform(0.2, 2.0))
    if c % 2:
        # integer powers, kept above nu - 1 so the derivative is a function
        r = float(max(1, math.ceil(float(spec.nu) - 0.8)) + int(rng.integers(0, 2)))
    sf = SampledFn(lambda t, r=r: np.asarray(t, dtype=float) ** r, T=1.0, singularity_exponent=r)
    f = fa.from_power(r, spec.alpha, spec.delta)
    params = {"kind": kind, "spec": _spec_params(spec), "r": r}
    worst = None
    for x in _X3:
        oracle = power_rule(r, spec, x)
        exact = fa.evaluate(fa.nth_level_derivative(f, spec, strict=False), x)
        quad = nth_level_derivative_quad(sf, spec, x)
        dd = max(defect(quad, oracle), defect(exact, oracle))
        row = (dd, x, quad, oracle)
        worst = row if worst is None or row[0] > worst[0] else worst
    params["x"] = worst[1]
    return CaseRow(c, params, worst[2], worst[3], worst[0])


# ---------------------------------------------------------------- ivp / heat

_XI = (0.25, 0.5, 0.9)


def _solve_any(p: IVPProblem, i_max: int):
    """Solve with the first initial-value convention under which the data are finite."""
    for kind in ("rl", "prabhakar", "constants"):
        q = IVPProblem(p.spec, p.lam, p.forcing, p.initial_values, kind, p.x_max)
        try:
            with warnings.catch_warnings():
                warnings.simplefilter("ignore", TruncationWarning)
                return solve_ivp(q, i_max)
        except InvalidParams:
            if kind == "constants":
                raise


def _ivp_case(rng):
    spec = random_spec(rng, beta_range=(0.3, 1.5))
    lam = _r3(rng.uniform(-1, 1))
    forcing = None
    if rng.uniform() < 0.5:
        forcing = MLSeries(spec.alpha, spec.delta,
                           [MLTerm(_r3(rng.uniform(-1, 1)), _r3(rng.uniform(0.5, 2)), _r3(rng.uniform(-1, 1)))])
    a = [(_r3(rng.uniform(-1, 1)) if spec.nu - k > 0 else 0.0) for k in range(spec.A)]
    return IVPProblem(spec, lam, forcing, tuple(a), "rl", 0.9)


def _suite_ivp(rng, c):
    p = _ivp_case(rng)
    sol = _solve_any(p, 40)
    p = sol.problem
    params = p.to_dict()
    Dy = ivp_derivative(sol)
    worst = None
    for x in _XI:
        lhs = fa.evaluate(Dy, x)
        y = evaluate_ivp(sol, x)
        fx = fa.evaluate(p.forcing, x) if p.forcing is not None else 0.0
        rhs = p.lam * y + fx
        dd = abs(lhs - rhs) / (1 + max(abs(lhs), abs(p.lam * y), abs(fx)))
        row = (dd, x, lhs, rhs)
        worst = row if worst is None or row[0] > worst[0] else worst
    got = ivp_initial_values(sol)
    iv_err = max((abs(g - a) / max(1.0, abs(a)) for g, a in zip(got, p.a)), default=0.0)
    params["x"] = worst[1]
    params["initial_value_error"] = iv_err
    return CaseRow(c, params, worst[2], worst[3], max(worst[0], iv_err))


def _suite_heat(rng, c):
    L, N = 20.0, 64
    times = np.array([0.25, 0.5, 1.0])
    spec = random_spec(rng, beta_range=(0.5, 1.5))
    kt = _r3(rng.uniform(0.05, 0.2))
    m = int(rng.integers(1, 8))
    prob = HeatProblem.from_profile(spec, kt, L, N, "cosine", mode=m)
    field_ = solve_heat(prob, times)
    omega = math.pi * m / L
    mp = IVPProblem(spec, -kt * omega**2, None, (1.0,), "rl", float(times[-1]))
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        sol = solve_ivp(mp, 60)
    Dy = ivp_derivative(sol)
    params = {"spec": _spec_params(spec), "k_tilde": kt, "mode": m, "L": L, "N": N}
    worst = None
    for j, t in enumerate(times):
        lhs = float(field_.values[N // 2, j])  # x = 0, where cos = 1
        rhs = evaluate_ivp(sol, float(t))
        res = abs(fa.evaluate(Dy, float(t)) - mp.lam * rhs) / (1 + abs(mp.lam * rhs))
        dd = max(defect(lhs, rhs), res)
        row = (dd, float(t), lhs, rhs)
        worst = row if worst is None or row[0] > worst[0] else worst
    params["t"] = worst[1]
    return CaseRow(c, params, worst[2], worst[3], worst[0])


_RUNNERS = {
    "semigroup": _suite_semigroup,
    "inversion": _suite_inversion,
    "thm31": _suite_thm31,
    "reductions": _suite_reductions,
    "ivp_residual": _suite_ivp,
    "heat_mode": _suite_heat,
}

DEFAULT_TOL = {
    "semigroup": 1e-10,
    "inversion": 1e-6,
    "thm31": 1e-6,
    "reductions": 1e-8,
    "ivp_residual": 1e-5,
    "heat_mode": 1e-5,
}


def run_suite(name: str, seed: int = 0, cases: int = 25, tol: float | None = None) -> IdentitySuite:
    if name not in _RUNNERS:
        raise ValueError(f"unknown suite {name!r}; choose from {', '.join(SUITES)}")
    if cases < 1:
        raise ValueError("cases must be at least 1")
    tol = DEFAULT_TOL[name] if tol is None else float(tol)
    suite = IdentitySuite(name, int(seed), int(cases), tol)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConstraintWarning)
        for c in range(cases):
            # one generator per case: a failing case cannot shift the draws of later ones
            rng = np.random.default_rng([int(seed), c])
            try:
                row = _RUNNERS[name](rng, c)
            except (PrabhakarError, ValueError, ArithmeticError) as e:
                row = CaseRow(c, {}, math.nan, math.nan, math.inf, f"{type(e).__name__}: {e}")
            suite.rows.append(row)
    return suite
