"""Operators on sampled functions by quadrature, plus the exact-path identities.

The quadrature routines here never look at ML-term structure; they are the
brute-force counterpart of :mod:`prabhakar.funcalg` and the two are used to
check each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from . import funcalg as fa
from ._quad import QUAD_CTL, Kernel, PanelGrid, convolve, convolve_panels
from .errors import InsufficientSmoothness, InvalidParams, LeavesAlgebra, NonConvergence
from .funcalg import MLSeries
from .levels import NthLevelSpec
from .mlf import default_control, PrabhakarParams, SeriesControl, pochhammer, prabhakar_e

__all__ = [
    "NthLevelSpec",
    "SampledFn",
    "rl_integral",
    "prabhakar_integral_quad",
    "pr_derivative_series",
    "nth_level_derivative_quad",
    "inversion_constants",
    "inversion_residual",
    "inversion_residual_quad",
    "theorem31_decomposition",
    "first_level_power_derivative",
    "hilfer_prabhakar_metadata",
]


@dataclass(frozen=True)
class SampledFn:
    """A real function on (0, T] given by a callable.

    ``func`` must accept numpy arrays.  ``singularity_exponent`` is the power p
    with ``f(x) x^(-p)`` bounded near 0 (p > -1).  ``derivatives`` optionally
    lists callables for f', f'', ..., which must also be finite at 0; they are
    only needed for derivative orders that cannot be reached by integration.
    """

    func: Callable
    T: float = 1.0
    singularity_exponent: float = 0.0
    derivatives: Sequence[Callable] = field(default=())

    def __post_init__(self):
        if not self.T > 0:
            raise InvalidParams("T must be positive")
        if not self.singularity_exponent > -1:
            raise InvalidParams("singularity exponent must exceed -1")

    def __call__(self, x):
        return np.asarray(self.func(np.asarray(x, dtype=float)), dtype=float)

    def derivative(self, i: int) -> Callable:
        if i == 0:
            return self.func
        if i > len(self.derivatives):
            raise InsufficientSmoothness(f"derivative of order {i} was not supplied")
        return self.derivatives[i - 1]

    @classmethod
    def from_series(cls, f: MLSeries, T: float = 1.0, max_derivatives: int = 3) -> "SampledFn":
        """Wrap an ML-term series; its classical derivatives come from the algebra."""
        ders = []
        for i in range(1, max_derivatives + 1):
            try:
                di = fa.differentiate(f, i)
            except LeavesAlgebra:
                break
            if di.leading_exponent() < 0 and not di.is_zero():
                break
            ders.append(_series_callable(di))
        return cls(_series_callable(f), T, f.leading_exponent(), tuple(ders))


def _series_callable(f: MLSeries):
    def fn(x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        pos = x > 0
        out[pos] = fa.evaluate_array(f, x[pos], QUAD_CTL)
        if np.any(~pos):
            # value at 0 for series that are continuous there
            out[~pos] = fa.rl_initial_value(f, 0) if f.leading_exponent() >= 0 else np.inf
        return out

    return fn


def _as_sampled(f) -> SampledFn:
    if isinstance(f, SampledFn):
        return f
    if isinstance(f, MLSeries):
        return SampledFn.from_series(f)
    raise InvalidParams("expected a SampledFn or MLSeries")


def _points(x, T):
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    if np.any(xs <= 0) or np.any(xs > T * (1 + 1e-12)):
        raise InvalidParams(f"evaluation points must lie in (0, {T}]")
    return xs


def _unwrap(x, out):
    return float(out[0]) if np.ndim(x) == 0 else out


def rl_integral(f: SampledFn, order: float, x):
    """Riemann-Liouville integral ``(1/Gamma(order)) int_0^x (x-t)^(order-1) f(t) dt``."""
    f = _as_sampled(f)
    if not order > 0:
        raise InvalidParams("order must be positive")
    xs = _points(x, f.T)
    k = Kernel(1.0, order, 0.0, 0.0)
    return _unwrap(x, convolve(k, f, f.singularity_exponent, xs))


def prabhakar_integral_quad(f: SampledFn, p: PrabhakarParams, x):
    """Left Prabhakar integral ``int_0^x (x-t)^(b-1) E^g_{a,b}(d (x-t)^a) f(t) dt``.

    With ``gamma == 0`` the kernel is ``(x-t)^(b-1)/Gamma(b)``, so the result
    coincides with :func:`rl_integral` of the same order.
    """
    f = _as_sampled(f)
    if not p.beta >= 0:
        raise InvalidParams("integral order must be nonnegative")
    xs = _points(x, f.T)
    k = Kernel(p.alpha, p.beta, p.gamma, p.delta, float(np.max(xs)))
    return _unwrap(x, convolve(k, f, f.singularity_exponent, xs))


def _rl_derivative_sampled(f: SampledFn, q: float, x: float) -> float:
    """RL derivative of order q > 0 from supplied classical derivatives.

    ``D^q f = sum_{i<m} f^(i)(0) x^(i-q)/Gamma(i-q+1) + I^(m-q) f^(m)`` with
    m = ceil(q); for integer q this is just ``f^(q)(x)``.
    """
    if float(q).is_integer():
        return float(f.derivative(int(q))(np.array([x]))[0])
    m = math.floor(q) + 1
    if f.singularity_exponent < 0:
        raise InsufficientSmoothness("RL derivative from classical data needs f bounded at 0")
    out = 0.0
    for i in range(m):
        fi0 = float(f.derivative(i)(np.array([0.0]))[0])
        if not math.isfinite(fi0):
            raise InsufficientSmoothness(f"f^({i})(0) is not finite")
        out += fi0 * x ** (i - q) / math.gamma(i - q + 1)
    dm = SampledFn(f.derivative(m), f.T, 0.0)
    out += rl_integral(dm, m - q, x)
    return out


def pr_derivative_series(f, p: PrabhakarParams, x: float, ctl: SeriesControl | None = None) -> float:
    """Riemann-Liouville type Prabhakar derivative through its RL series.

    ``sum_k ((-gamma)_k delta^k / k!) I^(alpha k - beta) f(x)``; negative orders
    are RL derivatives.  An :class:`MLSeries` input uses the exact algebra for
    each RL differintegral, a :class:`SampledFn` uses quadrature.
    """
    ctl = ctl or default_control()
    if not p.beta >= 0:
        raise InvalidParams("derivative order must be nonnegative")
    if not x > 0:
        raise InvalidParams("x must be positive")
    exact_path = isinstance(f, MLSeries)
    if not exact_path:
        f = _as_sampled(f)
    total, below = 0.0, 0
    tol = max(ctl.abs_tol, 1e-15)
    for k in range(min(ctl.max_terms, 500)):
        w = pochhammer(-p.gamma, k) * p.delta**k / math.factorial(k) if k else 1.0
        if w == 0.0:
            if k == 0 or p.delta == 0.0 or pochhammer(-p.gamma, k) == 0.0:
                break
            continue
        order = p.alpha * k - p.beta
        if exact_path:
            q = fa.exact(p.beta) - fa.exact(p.alpha) * k
            try:
                piece = fa.evaluate(fa.rl_differintegral(f, q), x)
            except LeavesAlgebra as e:
                raise InsufficientSmoothness(str(e)) from e
        elif order > 0:
            piece = rl_integral(f, order, x)
        elif order == 0:
            piece = float(f(np.array([x]))[0])
        else:
            piece = _rl_derivative_sampled(f, -order, x)
        term = w * piece
        total += term
        if abs(term) <= max(tol, ctl.rel_tol * abs(total)) and order > 0:
            below += 1
            if below >= 2:
                return total
        else:
            below = 0
    else:
        raise NonConvergence("Prabhakar derivative series did not converge")
    return total


def nth_level_derivative_quad(f, spec: NthLevelSpec, x: float, nodes: int = 16) -> float:
    """nth-level derivative at ``x`` by quadrature and piecewise Chebyshev differentiation.

    The inner integral is sampled on geometrically graded panels of (0, x],
    interpolated panel-wise, differentiated n times and fed to the outer
    integral (Gauss-Legendre on interior panels, a singularity-removing
    substitution on the top panel, a fitted power law below the last panel).
    """
    f = _as_sampled(f)
    if not 0 < x <= f.T * (1 + 1e-12):
        raise InvalidParams(f"x must lie in (0, {f.T}]")
    a, d = float(spec.alpha), spec.delta
    grid = PanelGrid(x, nodes=nodes)
    inner = Kernel(a, float(spec.inner_order), float(spec.inner_gamma), d, x)
    vals = convolve(inner, f, f.singularity_exponent, grid.points.ravel())
    P = grid.fit(vals).check()
    outer = Kernel(a, float(spec.outer_order), float(spec.outer_gamma), d, x)
    return convolve_panels(outer, P.deriv(spec.n), x)


# ---------------------------------------------------------------- exact-path identities

def inversion_constants(f: MLSeries, spec: NthLevelSpec, method: str = "combined") -> list[float]:
    """Coefficients C_k, k < A, of the inversion correction kernels.

    ``C_k = sum_{j<=B_k} ((-gamma')_j delta^j / j!) (D^(nu-k-1-alpha j) f)(0+)``
    with RL differintegrals and ``gamma' = gamma (n - Theta_n)``.

    ``method="series"`` evaluates that sum term by term.  Individual RL initial
    values can be infinite while the weighted sum is finite (the divergent
    parts cancel between j's), so the default ``"combined"`` evaluates the sum
    in closed form as ``d^(n-1-k) E(n - nu, -gamma') f`` at 0+.
    """
    spec.check_series(f)
    if method == "combined":
        g = fa.prabhakar_integrate(f, spec.inner_order, spec.inner_gamma)
        return [fa.rl_initial_value(g, spec.n - 1 - k) for k in range(spec.A)]
    if method != "series":
        raise InvalidParams(f"unknown method {method!r}")
    out = []
    for k in range(spec.A):
        ck = 0.0
        for j in range(spec.B(k) + 1):
            w = spec.weight(j)
            if w != 0.0:
                ck += w * fa.rl_initial_value(f, spec.nu - k - 1 - spec.alpha * j)
        out.append(ck)
    return out


def inversion_correction(f: MLSeries, spec: NthLevelSpec) -> MLSeries:
    """``sum_k C_k x^(nu-k-1) E^gamma'_{alpha,nu-k}(delta x^alpha)`` as a series."""
    terms = [fa.MLTerm(c, spec.nu - k, spec.gamma_prime)
             for k, c in enumerate(inversion_constants(f, spec))]
    return f.with_terms(terms)


def inversion_residual(f: MLSeries, spec: NthLevelSpec, x: float) -> float:
    """Defect of the inversion identity at ``x``, all pieces in the exact algebra.

    ``E(beta, n gamma)[D f] - f + correction``; the Prabhakar integral with
    upper parameter ``n gamma`` is the left inverse of the derivative.
    """
    Df = fa.nth_level_derivative(f, spec)
    lhs = fa.prabhakar_integrate(Df, spec.beta, spec.inverse_gamma)
    return fa.evaluate(lhs - f + inversion_correction(f, spec), x)


def inversion_residual_quad(f: MLSeries, spec: NthLevelSpec, x):
    """Same defect with the outer Prabhakar integral done by quadrature (x scalar or array)."""
    Df = fa.nth_level_derivative(f, spec)
    xs = np.atleast_1d(np.asarray(x, dtype=float))
    sf = SampledFn.from_series(Df, T=float(np.max(xs)), max_derivatives=0)
    p = PrabhakarParams(float(spec.alpha), float(spec.beta), float(spec.inverse_gamma), spec.delta)
    lhs = prabhakar_integral_quad(sf, p, xs)
    out = lhs - fa.evaluate_array(f, xs) + fa.evaluate_array(inversion_correction(f, spec), xs)
    return _unwrap(x, out)


def theorem31_decomposition(f: MLSeries, spec: NthLevelSpec, x: float,
                            method: str = "combined") -> tuple[float, float]:
    """``(first, second)`` with ``D f (x) = first - second``.

    ``first`` is the RL-type Prabhakar derivative of order beta and upper
    parameter ``n gamma``; ``second`` collects the initial-value kernels
    ``x^(s_n-k-1) E^(-gamma Theta_n)_{alpha,s_n-k}`` weighted by RL initial
    values of f over the index set ``alpha j + k <= nu``, grouped by k into
    the constants of :func:`inversion_constants`.
    """
    spec.check_series(f)
    first = fa.evaluate(fa.pr_derivative(f, spec.beta, spec.inverse_gamma, strict=False), x)
    second = 0.0
    for k, c in enumerate(inversion_constants(f, spec, method)):
        if c != 0.0:
            kern = fa.kernel_term(spec.alpha, spec.delta, spec.s_n - k, spec.outer_gamma)
            second += c * fa.evaluate(kern, x)
    return first, second


def first_level_power_derivative(r, spec: NthLevelSpec, x: float,
                                 ctl: SeriesControl | None = None) -> float:
    """First-level derivative of ``x**r`` as a series over the outer kernel.

    ``Gamma(r+1) sum_k ((-gamma theta_1)_k delta^k / k!) x^(r-beta+alpha k)
    E^(-gamma(1-theta_1))_{alpha, r+1-beta+alpha k}(delta x^alpha)``: expanding the
    outer kernel ``E(s_1, -gamma theta_1)`` termwise and applying it to the
    single-term derivative of the inner composition.  Requires ``n == 1`` and
    ``r + 1 > beta + s_1``.
    """
    ctl = ctl or default_control()
    if spec.n != 1:
        raise InvalidParams("first-level closed form needs n == 1")
    r = fa.exact(r)
    if not r + 1 > spec.nu:
        raise InvalidParams("closed form needs r + 1 > beta + s_1")
    a, b, d = float(spec.alpha), float(spec.beta), spec.delta
    g_out = float(spec.outer_gamma)
    g_in = float(spec.inner_gamma)
    rf = float(r)
    z = d * x**a
    total, below = 0.0, 0
    for k in range(ctl.max_terms):
        w = pochhammer(g_out, k) * d**k / math.factorial(k) if k else 1.0
        if w == 0.0 and k > 0:
            break
        mu = rf + 1 - b + a * k
        term = w * x ** (mu - 1) * prabhakar_e(a, mu, g_in, z, ctl)
        total += term
        if abs(term) <= ctl.tol(total) + 1e-300:
            below += 1
            if below >= 2:
                break
        else:
            below = 0
    return math.gamma(rf + 1) * total


def hilfer_prabhakar_metadata(alpha, beta, gamma, delta, theta) -> dict:
    """Kernel parameters of the Hilfer-Prabhakar derivative of order beta and type theta.

    Written from its usual definition ``E(theta(1-beta), -gamma theta) d
    E((1-theta)(1-beta), -gamma(1-theta))``, independently of NthLevelSpec, so
    the two can be compared.
    """
    b, t, g = fa.exact(beta), fa.exact(theta), fa.exact(gamma)
    return {
        "n": 1,
        "inner": ((1 - t) * (1 - b), -g * (1 - t)),
        "outer": (t * (1 - b), -g * t),
        "alpha": fa.exact(alpha),
        "delta": float(delta),
    }
