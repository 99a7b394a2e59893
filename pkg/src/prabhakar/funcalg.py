"""Finite sums of Mittag-Leffler terms and the operators that act on them exactly.

A term ``(c, mu, g)`` stands for ``c * x**(mu-1) * E^g_{alpha,mu}(delta * x**alpha)``;
a series shares ``alpha`` and ``delta`` between its terms.  Prabhakar integrals
shift ``(mu, g)`` by the operator's ``(beta, gamma)``, classical derivatives
lower ``mu``.

The parameters ``alpha``, ``mu`` and ``gamma`` are stored as exact rationals
(floats are read through their shortest decimal repr), so repeated parameters
produced by operator compositions compare equal without any epsilon and
boundary cases such as ``mu == 0`` are detected exactly.  Coefficients and
``delta`` are plain floats.

Expanding ``E^g`` into its power series, a term is a sum of *components*
``c * w_j * x**(p_j - 1) / Gamma(p_j)`` with ``p_j = mu + alpha*j`` and
``w_j = (g)_j delta**j / j!``.  Components with ``p_j <= 0`` are not functions
but formal (delta-like) elements; terms are allowed to carry them as long as
they cancel or vanish, which is what ``differentiate`` guarantees.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from decimal import Decimal
from fractions import Fraction
from typing import Iterable, Iterator

import numpy as np

from .errors import InvalidParams, LeavesAlgebra
from .mlf import SeriesControl, pochhammer, prabhakar_e, prabhakar_e_array


def exact(x) -> Fraction:
    """Exact rational for a parameter value (floats via their shortest repr)."""
    if isinstance(x, Fraction):
        return x
    if isinstance(x, bool):
        raise InvalidParams("boolean is not a parameter value")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, (Decimal, str)):
        return Fraction(x)
    v = float(x)
    if not math.isfinite(v):
        raise InvalidParams(f"non-finite parameter {x!r}")
    return Fraction(repr(v))


def _weight(g: Fraction, delta: float, j: int) -> float:
    """(g)_j delta^j / j!"""
    if j == 0:
        return 1.0
    if delta == 0.0:
        return 0.0
    return pochhammer(float(g), j) * delta**j / math.factorial(j)


@dataclass(frozen=True)
class MLTerm:
    """One term ``coeff * x**(mu-1) * E^gamma_{alpha,mu}(delta x^alpha)``."""

    coeff: float
    mu: Fraction
    gamma: Fraction

    def __post_init__(self):
        c = float(self.coeff)
        if not math.isfinite(c):
            raise InvalidParams(f"non-finite coefficient {self.coeff!r}")
        object.__setattr__(self, "coeff", c)
        object.__setattr__(self, "mu", exact(self.mu))
        object.__setattr__(self, "gamma", exact(self.gamma))

    @property
    def key(self):
        return (self.mu, self.gamma)


def _canonical(terms: Iterable[MLTerm]) -> tuple[MLTerm, ...]:
    acc: dict[tuple[Fraction, Fraction], float] = {}
    for t in terms:
        acc[t.key] = acc.get(t.key, 0.0) + t.coeff
    return tuple(MLTerm(c, mu, g) for (mu, g), c in sorted(acc.items()) if c != 0.0)


@dataclass(frozen=True)
class MLSeries:
    """Canonical finite series of ML terms sharing ``(alpha, delta)``.

    Terms are sorted by ``(mu, gamma)``, merged on exact parameter equality and
    zero coefficients are dropped, so ``==`` compares term lists exactly.
    """

    alpha: Fraction
    delta: float
    terms: tuple[MLTerm, ...] = field(default=())

    def __post_init__(self):
        a = exact(self.alpha)
        if a <= 0:
            raise InvalidParams(f"alpha must be positive, got {self.alpha}")
        d = float(self.delta)
        if not math.isfinite(d):
            raise InvalidParams("delta must be finite")
        terms = [t if isinstance(t, MLTerm) else MLTerm(*t) for t in self.terms]
        object.__setattr__(self, "alpha", a)
        object.__setattr__(self, "delta", d)
        object.__setattr__(self, "terms", _canonical(terms))

    # construction helpers
    def with_terms(self, terms: Iterable[MLTerm]) -> "MLSeries":
        return MLSeries(self.alpha, self.delta, tuple(terms))

    def zero(self) -> "MLSeries":
        return MLSeries(self.alpha, self.delta, ())

    def _check_compatible(self, other: "MLSeries"):
        if self.alpha != other.alpha or self.delta != other.delta:
            raise InvalidParams(
                f"series with (alpha, delta)=({self.alpha}, {self.delta}) and "
                f"({other.alpha}, {other.delta}) cannot be combined"
            )

    def __add__(self, other: "MLSeries") -> "MLSeries":
        self._check_compatible(other)
        return self.with_terms(self.terms + other.terms)

    def __neg__(self) -> "MLSeries":
        return self.scale(-1.0)

    def __sub__(self, other: "MLSeries") -> "MLSeries":
        return self + (-other)

    def scale(self, s: float) -> "MLSeries":
        return self.with_terms(MLTerm(s * t.coeff, t.mu, t.gamma) for t in self.terms)

    def __mul__(self, s):
        if isinstance(s, MLSeries):
            return NotImplemented
        return self.scale(float(s))

    __rmul__ = __mul__

    def __len__(self):
        return len(self.terms)

    def __iter__(self) -> Iterator[MLTerm]:
        return iter(self.terms)

    def __call__(self, x, ctl: SeriesControl | None = None):
        if np.ndim(x) == 0:
            return evaluate(self, float(x), ctl)
        return evaluate_array(self, x, ctl)

    def is_zero(self) -> bool:
        return not self.terms

    def min_mu(self) -> Fraction | None:
        return min((t.mu for t in self.terms), default=None)

    def leading_exponent(self) -> float:
        """Smallest power ``p - 1`` among nonvanishing function components.

        Used as the singularity exponent when the series is handed to the
        quadrature path.  Formal components are ignored.
        """
        best = math.inf
        for t in self.terms:
            for j in range(64):
                p = t.mu + self.alpha * j
                if p <= 0 and p.denominator == 1:
                    continue
                if _weight(t.gamma, self.delta, j) != 0.0:
                    best = min(best, float(p) - 1.0)
                    break
        return best if best != math.inf else 0.0

    # serialization
    def to_dict(self) -> dict:
        return {
            "alpha": _param_out(self.alpha),
            "delta": self.delta,
            "terms": [
                {"coeff": t.coeff, "mu": _param_out(t.mu), "gamma": _param_out(t.gamma)}
                for t in self.terms
            ],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "MLSeries":
        try:
            terms = [
                MLTerm(float(t["coeff"]), _param_in(t["mu"]), _param_in(t.get("gamma", 0)))
                for t in d["terms"]
            ]
            return cls(_param_in(d["alpha"]), float(d["delta"]), tuple(terms))
        except (KeyError, TypeError, ValueError, ZeroDivisionError) as e:
            if isinstance(e, InvalidParams):
                raise
            raise InvalidParams(f"malformed MLSeries object: {e}") from e

    def to_json(self, **kw) -> str:
        return json.dumps(self.to_dict(), **kw)

    @classmethod
    def from_json(cls, text: str) -> "MLSeries":
        return cls.from_dict(loads_exact(text))


def _param_out(v: Fraction):
    """JSON value for an exact parameter: a float when that round-trips, else a string."""
    f = float(v)
    if Fraction(repr(f)) == v:
        return f
    if v.denominator == 1:
        return str(v.numerator)
    return f"{v.numerator}/{v.denominator}"


def _param_in(v) -> Fraction:
    if isinstance(v, float):
        return exact(v)
    if isinstance(v, (int, Decimal)) and not isinstance(v, bool):
        return Fraction(v)
    if isinstance(v, str):
        return Fraction(v)
    raise InvalidParams(f"bad parameter value {v!r}")


def loads_exact(text: str):
    """``json.loads`` that keeps decimal literals exact (as Decimal)."""
    return json.loads(text, parse_float=Decimal)


# ---------------------------------------------------------------- constructors

def from_power(r, alpha, delta=0.0) -> MLSeries:
    """x**r as the single term (Gamma(r+1), r+1, 0)."""
    r = exact(r)
    if r <= -1:
        raise InvalidParams(f"power must exceed -1, got {r}")
    return MLSeries(alpha, delta, (MLTerm(math.gamma(float(r) + 1.0), r + 1, 0),))


def kernel_term(alpha, delta, mu, gamma, coeff=1.0) -> MLSeries:
    """Single-term series ``coeff * x**(mu-1) E^gamma_{alpha,mu}(delta x^alpha)``."""
    return MLSeries(alpha, delta, (MLTerm(coeff, mu, gamma),))


# ---------------------------------------------------------------- evaluation

def evaluate(f: MLSeries, x: float, ctl: SeriesControl | None = None) -> float:
    """Pointwise value at ``x > 0``."""
    if not x > 0:
        raise InvalidParams(f"evaluation point must be positive, got {x}")
    a = float(f.alpha)
    z = f.delta * x**a
    out = 0.0
    for t in f.terms:
        mu = float(t.mu)
        out += t.coeff * x ** (mu - 1.0) * prabhakar_e(a, mu, t.gamma, z, ctl)
    return out


def evaluate_array(f: MLSeries, x, ctl: SeriesControl | None = None) -> np.ndarray:
    """Vectorized evaluation over an array of positive points."""
    x = np.asarray(x, dtype=float)
    if np.any(x <= 0):
        raise InvalidParams("evaluation points must be positive")
    a = float(f.alpha)
    z = f.delta * x**a
    out = np.zeros_like(x)
    for t in f.terms:
        mu = float(t.mu)
        out += t.coeff * x ** (mu - 1.0) * prabhakar_e_array(a, mu, t.gamma, z, ctl)
    return out


# ---------------------------------------------------------------- operators

def prabhakar_integrate(f: MLSeries, beta, gamma_op) -> MLSeries:
    """Left Prabhakar integral with kernel ``x^(beta-1) E^gamma_op_{alpha,beta}(delta x^alpha)``.

    Shifts every term ``(mu, g) -> (mu + beta, g + gamma_op)``.  ``beta == 0``
    is the order-zero limit (identity when ``gamma_op == 0``).
    """
    beta, gamma_op = exact(beta), exact(gamma_op)
    if beta < 0:
        raise InvalidParams(f"integral order must be nonnegative, got {beta}")
    return f.with_terms(MLTerm(t.coeff, t.mu + beta, t.gamma + gamma_op) for t in f.terms)


def components(f: MLSeries, p_max) -> Iterator[tuple[Fraction, float]]:
    """Yield ``(p, weight)`` for all components with ``p <= p_max``.

    The component is ``weight * x**(p-1) / Gamma(p)``.
    """
    p_max = exact(p_max)
    for t in f.terms:
        j = 0
        while True:
            p = t.mu + f.alpha * j
            if p > p_max:
                break
            w = _weight(t.gamma, f.delta, j)
            if w != 0.0:
                yield p, t.coeff * w
            elif j > 0 and (f.delta == 0.0 or _weight(t.gamma, 1.0, j) == 0.0):
                break  # the series has terminated
            j += 1


def differentiate(f: MLSeries, n: int = 1, strict: bool = True) -> MLSeries:
    """Classical n-th derivative.

    Each term is shifted ``mu -> mu - n``.  Components that the shift pushes
    onto nonpositive integers would be delta-like boundary contributions; a
    correction term cancels them so the result is the pointwise derivative.
    Components pushed to non-integrable, non-integer exponents leave the
    algebra: ``LeavesAlgebra`` is raised unless ``strict=False``, in which case
    the formal (finite-part) shift is kept.
    """
    if int(n) != n or n < 0:
        raise InvalidParams("derivative order must be a nonnegative integer")
    if n == 0:
        return f
    out = [MLTerm(t.coeff, t.mu - n, t.gamma) for t in f.terms]
    for p, w in components(f, n):
        q = p - n
        if q.denominator == 1:
            out.append(MLTerm(-w, q, 0))
        elif strict:
            raise LeavesAlgebra(
                f"derivative of order {n} produces the non-integrable power x^{float(q) - 1:.6g}"
            )
    return f.with_terms(out)


def rl_differintegral(f: MLSeries, q, strict: bool = True) -> MLSeries:
    """Riemann-Liouville integral (q <= 0) or derivative (q > 0) of order |q|."""
    q = exact(q)
    if q <= 0:
        return prabhakar_integrate(f, -q, 0)
    m = math.floor(q) + 1
    return differentiate(prabhakar_integrate(f, m - q, 0), m, strict)


def pr_derivative(f: MLSeries, beta, gamma, strict: bool = True) -> MLSeries:
    """Riemann-Liouville type Prabhakar derivative of order ``beta``.

    ``d^m`` applied to the Prabhakar integral of order ``m - beta`` with upper
    parameter ``-gamma`` (kernel ``(alpha, delta)`` taken from ``f``).
    """
    beta, gamma = exact(beta), exact(gamma)
    if beta < 0:
        raise InvalidParams("derivative order must be nonnegative")
    m = math.floor(beta) + 1
    return differentiate(prabhakar_integrate(f, m - beta, -gamma), m, strict)


def rl_initial_value(f: MLSeries, q) -> float:
    """Limit x -> 0+ of the Riemann-Liouville differintegral of order ``q``.

    Only components with ``p - q == 1`` contribute a finite nonzero limit;
    components with smaller exponent make the limit infinite unless they carry
    a vanishing reciprocal Gamma factor.  Components are merged across terms
    first so that exactly cancelling formal pieces drop out.
    """
    q = exact(q)
    acc: dict[Fraction, float] = {}
    for p, w in components(f, q + 1):
        acc[p] = acc.get(p, 0.0) + w
    out = 0.0
    for p, w in acc.items():
        e = p - q  # the component becomes x^(e-1) / Gamma(e)
        if e == 1:
            out += w
        elif w != 0.0 and not (e <= 0 and e.denominator == 1):
            # the limit is infinite unless the coefficient is rounding noise
            scale = max(abs(v) for v in acc.values())
            if abs(w) > 1e-13 * scale:
                raise LeavesAlgebra(
                    f"RL differintegral of order {float(q):.6g} is unbounded at 0 "
                    f"(component x^{float(e) - 1:.6g})"
                )
    return out


def nth_level_derivative(f: MLSeries, spec, strict: bool = True) -> MLSeries:
    """nth-level Prabhakar derivative of ``f`` described by ``spec``.

    Outer integral ``(s_n, -gamma Theta_n)`` after ``d^n`` after the inner
    integral ``(n - beta - s_n, -gamma (n - Theta_n))``.
    """
    spec.check_series(f)
    inner = prabhakar_integrate(f, spec.inner_order, spec.inner_gamma)
    d = differentiate(inner, spec.n, strict)
    return prabhakar_integrate(d, spec.outer_order, spec.outer_gamma)
