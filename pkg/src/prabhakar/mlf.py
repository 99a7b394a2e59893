"""Three-parameter (Prabhakar) Mittag-Leffler function and the bivariate E2.

.. math::

    E^{\\gamma}_{\\alpha,\\beta}(z) = \\sum_{k\\ge 0}
        \\frac{(\\gamma)_k z^k}{k!\\,\\Gamma(\\alpha k + \\beta)}

The reciprocal Gamma function is treated as entire, so terms whose
``alpha*k + beta`` is a nonpositive integer vanish instead of raising.
Summation runs in binary64; when the running sum shows heavy cancellation the
same series is re-summed with enough extra binary digits to return a correctly
accurate double (see ``_resum_extended``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .errors import InvalidParams, NonConvergence

EPS = np.finfo(float).eps

# cancellation ratio sum|t_k| / |sum t_k| above which we re-sum
_CANCEL_LIMIT = 64.0
# beyond these sizes the direct product form risks overflow/underflow
_DIRECT_MAX_ARG = 160.0
_DIRECT_MAX_COEF = 1e280
_MAX_EXTRA_DIGITS = 4000


@dataclass(frozen=True)
class SeriesControl:
    """Truncation control for every series in the package."""

    abs_tol: float = 0.0
    rel_tol: float = EPS / 2
    max_terms: int = 10_000

    def __post_init__(self):
        if not (self.abs_tol >= 0 and self.rel_tol >= 0):
            raise InvalidParams("tolerances must be nonnegative")
        if not (self.abs_tol > 0 or self.rel_tol > 0):
            raise InvalidParams("at least one of abs_tol, rel_tol must be positive")
        if int(self.max_terms) != self.max_terms or self.max_terms < 1:
            raise InvalidParams("max_terms must be a positive integer")

    def tol(self, value):
        return max(self.abs_tol, self.rel_tol * abs(value))


DEFAULT_CONTROL = SeriesControl()


def default_control() -> SeriesControl:
    return DEFAULT_CONTROL


def set_default_control(ctl: SeriesControl) -> SeriesControl:
    """Replace the package-wide default; returns the previous one."""
    global DEFAULT_CONTROL
    if not isinstance(ctl, SeriesControl):
        raise InvalidParams("expected a SeriesControl")
    old, DEFAULT_CONTROL = DEFAULT_CONTROL, ctl
    return old


@dataclass(frozen=True)
class PrabhakarParams:
    """Kernel parameters (alpha, beta, gamma, delta)."""

    alpha: float
    beta: float
    gamma: float
    delta: float = 0.0

    def __post_init__(self):
        vals = [float(v) for v in (self.alpha, self.beta, self.gamma, self.delta)]
        if not all(math.isfinite(v) for v in vals):
            raise InvalidParams("parameters must be finite")
        if vals[0] <= 0:
            raise InvalidParams(f"alpha must be positive, got {self.alpha}")


@dataclass(frozen=True)
class E2Params:
    """Parameters of the bivariate Mittag-Leffler-type double series.

    Zero exponents are accepted: the matching Pochhammer or Gamma factor is then
    constant along that index.
    """

    gamma1: float
    gamma2: float
    delta1: float
    delta2: float
    delta3: float
    alpha1: float
    alpha2: float
    alpha3: float
    alpha4: float
    beta1: float
    beta2: float
    beta3: float

    def __post_init__(self):
        for name in ("gamma1", "gamma2", "delta1", "delta2", "delta3"):
            if not math.isfinite(float(getattr(self, name))):
                raise InvalidParams(f"{name} must be finite")
        for name in ("alpha1", "alpha2", "alpha3", "alpha4", "beta1", "beta2", "beta3"):
            v = float(getattr(self, name))
            if not (math.isfinite(v) and v >= 0):
                raise InvalidParams(f"{name} must be finite and nonnegative, got {v}")


def _is_nonpos_int(x) -> bool:
    return x <= 0 and float(x).is_integer()


def rgamma(x):
    """Reciprocal Gamma as an entire function (zero at 0, -1, -2, ...)."""
    return special.rgamma(x)


def pochhammer(gamma, k: int) -> float:
    """Rising factorial (gamma)_k as an explicit product."""
    if k < 0:
        raise InvalidParams("pochhammer index must be nonnegative")
    g = float(gamma)
    out = 1.0
    for i in range(int(k)):
        out *= g + i
        if out == 0.0:
            break
    return out


def poch(gamma, s) -> float:
    """Generalized Pochhammer Gamma(gamma+s)/Gamma(gamma) for real s >= 0.

    Integer indices use the product form; real indices use log-Gamma with sign
    tracking. A nonpositive-integer ``gamma`` with non-integer ``s`` gives 0.
    """
    g, s = float(gamma), float(s)
    if s == 0.0:
        return 1.0
    if s.is_integer() and s > 0:
        return pochhammer(g, int(s))
    if _is_nonpos_int(g):
        # finite / infinite, unless gamma+s is itself a pole (impossible for s non-integer)
        return 0.0
    if _is_nonpos_int(g + s):
        raise InvalidParams(f"Pochhammer ({g})_{s} is infinite")
    lg = special.gammaln(g + s) - special.gammaln(g)
    return float(special.gammasgn(g + s) * special.gammasgn(g) * math.exp(lg))


def _coefficients(alpha, beta, gamma):
    """Yield (k, a_k) with a_k = (gamma)_k / (k! Gamma(alpha k + beta)).

    Product form while that is safe, logarithms afterwards.
    """
    g = float(gamma)
    c = 1.0  # (gamma)_k / k!
    logc, sgn, direct = 0.0, 1.0, True
    k = 0
    while True:
        a = alpha * k + beta
        if direct and (a > _DIRECT_MAX_ARG or abs(c) > _DIRECT_MAX_COEF):
            direct = False
            if c != 0.0:
                logc, sgn = math.log(abs(c)), math.copysign(1.0, c)
            else:
                sgn = 0.0
        if direct:
            yield k, c * float(rgamma(a))
        elif sgn == 0.0:
            yield k, 0.0
        elif _is_nonpos_int(a):
            yield k, 0.0
        else:
            yield k, sgn * float(special.gammasgn(a)) * math.exp(logc - special.gammaln(a))
        f = (g + k) / (k + 1)
        if direct:
            c *= f
        elif f == 0.0:
            sgn = 0.0
        else:
            logc += math.log(abs(f))
            sgn *= math.copysign(1.0, f)
        k += 1


def _series_terms(alpha, beta, gamma, z):
    """Yield (k, t_k) for the Prabhakar series in a form safe from overflow."""
    g = float(gamma)
    if z == 0.0:
        yield 0, float(rgamma(beta))
        return
    c = 1.0  # (gamma)_k z^k / k!
    logc, sgn, direct = 0.0, 1.0, True
    lz = math.log(abs(z))
    sz = math.copysign(1.0, z)
    k = 0
    while True:
        a = alpha * k + beta
        if direct and (a > _DIRECT_MAX_ARG or abs(c) > _DIRECT_MAX_COEF):
            direct = False
            if c != 0.0:
                logc, sgn = math.log(abs(c)), math.copysign(1.0, c)
            else:
                sgn = 0.0
        if direct:
            yield k, c * float(rgamma(a))
        elif sgn == 0.0 or _is_nonpos_int(a):
            yield k, 0.0
        else:
            lt = logc - special.gammaln(a)
            yield k, sgn * float(special.gammasgn(a)) * (math.exp(lt) if lt < 709.0 else math.inf)
        f = (g + k) / (k + 1)
        if direct:
            c *= f * z
        elif f == 0.0:
            sgn = 0.0
        else:
            logc += math.log(abs(f)) + lz
            sgn *= math.copysign(1.0, f) * sz
        k += 1


def _resum_extended(alpha, beta, gamma, z, ctl, digits):
    """Re-sum the series with ``digits`` extra decimal digits of working precision.

    Returns ``(value, terms_used, digits_lost)`` where ``digits_lost`` is the
    cancellation actually observed, so the caller can retry with more digits.
    """
    import mpmath

    with mpmath.workdps(17 + digits):
        a, b, g, zz = (mpmath.mpf(float(v)) for v in (alpha, beta, gamma, z))
        k_peak = abs(float(z)) ** (1.0 / float(alpha)) / float(alpha)
        tol = mpmath.mpf(ctl.rel_tol) / 4
        c = mpmath.mpf(1)
        s = mpmath.mpf(0)
        big = mpmath.mpf(0)
        below = 0
        k = 0
        for k in range(ctl.max_terms):
            t = c * mpmath.rgamma(a * k + b)
            s += t
            big = max(big, abs(t))
            c *= (g + k) * zz / (k + 1)
            if c == 0:
                break
            if k >= k_peak and abs(t) <= max(ctl.abs_tol, tol * abs(s)):
                below += 1
                if below >= 2:
                    break
            else:
                below = 0
        else:
            raise NonConvergence(f"Prabhakar series not converged after {ctl.max_terms} terms")
        lost = float(mpmath.log10(big / abs(s))) if s != 0 else float(17 + digits)
        return float(s), k + 1, lost


def prabhakar_e_info(alpha, beta, gamma, z, ctl: SeriesControl | None = None):
    """Evaluate the Prabhakar function; return ``(value, terms_used, extended)``.

    ``extended`` tells whether the cancellation guard triggered re-summation
    in extended precision.
    """
    ctl = ctl or DEFAULT_CONTROL
    alpha, beta, z = float(alpha), float(beta), float(z)
    g = float(gamma)
    if not (alpha > 0 and math.isfinite(alpha)):
        raise InvalidParams(f"alpha must be positive, got {alpha}")
    if not (math.isfinite(beta) and math.isfinite(g) and math.isfinite(z)):
        raise InvalidParams("beta, gamma and z must be finite")
    if z == 0.0 or g == 0.0:
        return float(rgamma(beta)), 1, False

    stop_at = int(-g) if _is_nonpos_int(g) else None
    # the terms grow until roughly alpha k ~ |z|^(1/alpha); don't stop before
    k_peak = abs(z) ** (1.0 / alpha) / alpha if abs(z) > 1 else 0.0

    s = comp = 0.0  # Neumaier compensated sum
    abs_sum = 0.0
    below = 0
    prev = math.inf
    k = -1
    converged = False
    for k, t in _series_terms(alpha, beta, g, z):
        if not math.isfinite(t):
            raise NonConvergence(f"term {k} overflows for z={z}, alpha={alpha}")
        u = s + t
        comp += (s - u) + t if abs(s) >= abs(t) else (t - u) + s
        s = u
        abs_sum += abs(t)
        if stop_at is not None and k >= stop_at:
            converged = True
            break
        if abs(t) <= ctl.tol(s + comp) and alpha * k + beta > 0 and k >= k_peak:
            below += 1
            if below >= 2:
                converged = True
                break
        else:
            below = 0
        if k + 1 >= ctl.max_terms:
            break
        prev = abs(t)
    value = s + comp
    nterms = k + 1
    if not converged:
        if not abs(t) < prev:
            raise NonConvergence(
                f"Prabhakar series not converged after {nterms} terms "
                f"(alpha={alpha}, beta={beta}, gamma={g}, z={z})"
            )
    ratio = abs_sum / abs(value) if value != 0.0 else math.inf
    if ratio > _CANCEL_LIMIT and abs_sum * EPS * nterms > ctl.abs_tol:
        digits = 8 + int(math.log10(abs_sum / abs(value))) if value != 0.0 else 40
        while True:
            value, nterms, lost = _resum_extended(alpha, beta, g, z, ctl, digits)
            if lost + 3 <= digits:
                return value, nterms, True
            if digits > _MAX_EXTRA_DIGITS:
                raise NonConvergence(f"cancellation exceeds {digits} digits at z={z}")
            digits = int(lost) + 8
    return value, nterms, False


def prabhakar_e(alpha, beta, gamma, z, ctl: SeriesControl | None = None) -> float:
    """E^gamma_{alpha,beta}(z) for real arguments."""
    return prabhakar_e_info(alpha, beta, gamma, z, ctl)[0]


def prabhakar_e_array(alpha, beta, gamma, z, ctl: SeriesControl | None = None) -> np.ndarray:
    """Vectorized E^gamma_{alpha,beta}(z) over an array of arguments.

    Power-series form with shared coefficients; entries that cancel badly or
    have large argument fall back to the scalar routine.
    """
    ctl = ctl or DEFAULT_CONTROL
    z = np.asarray(z, dtype=float)
    shape = z.shape
    z = z.ravel()
    alpha, beta, g = float(alpha), float(beta), float(gamma)
    if alpha <= 0:
        raise InvalidParams(f"alpha must be positive, got {alpha}")
    if z.size == 0:
        return z.reshape(shape)
    if g == 0.0:
        return np.full(shape, float(rgamma(beta)))
    zmax = float(np.max(np.abs(z)))
    if zmax > 8.0:
        out = np.array([prabhakar_e(alpha, beta, g, v, ctl) for v in z])
        return out.reshape(shape)
    stop_at = int(-g) if _is_nonpos_int(g) else None
    k_peak = zmax ** (1.0 / alpha) / alpha if zmax > 1 else 0.0
    s = np.zeros_like(z)
    abs_sum = np.zeros_like(z)
    zp = np.ones_like(z)
    below = 0
    converged = False
    for k, a in _coefficients(alpha, beta, g):
        t = a * zp
        s += t
        abs_sum += np.abs(t)
        if stop_at is not None and k >= stop_at:
            converged = True
            break
        bound = abs(a) * zmax**k
        if alpha * k + beta > 0 and k >= k_peak and bound <= max(ctl.abs_tol, ctl.rel_tol * float(np.min(np.abs(s)))):
            below += 1
            if below >= 2:
                converged = True
                break
        else:
            below = 0
        if k + 1 >= ctl.max_terms:
            break
        zp = zp * z
    if not converged:
        raise NonConvergence("vectorized Prabhakar series did not converge")
    with np.errstate(divide="ignore", invalid="ignore"):
        bad = (abs_sum > _CANCEL_LIMIT * np.abs(s)) & (abs_sum * EPS * 64 > ctl.abs_tol)
    for i in np.flatnonzero(bad):
        s[i] = prabhakar_e(alpha, beta, g, z[i], ctl)
    return s.reshape(shape)


def _e2_term(p: E2Params, m: int, n: int, lx: float, sx: float, ly: float, sy: float) -> float:
    """Single (m, n) term of the bivariate double series."""
    r = float(rgamma(p.delta1 + p.alpha3 * m + p.beta2 * n))
    r *= float(rgamma(p.delta2 + p.alpha4 * m))
    r *= float(rgamma(p.delta3 + p.beta3 * n))
    if r == 0.0:
        return 0.0
    r *= poch(p.gamma1, p.alpha1 * m + p.beta1 * n)
    if r == 0.0:
        return 0.0
    r *= poch(p.gamma2, p.alpha2 * m)
    if r == 0.0:
        return 0.0
    if (m and sx == 0.0) or (n and sy == 0.0):
        return 0.0
    lp = m * lx + n * ly
    if lp > 709.0:
        return math.inf
    sign = (sx**m if m else 1.0) * (sy**n if n else 1.0)
    return r * sign * math.exp(lp)


def bivariate_e2_info(p: E2Params, x, y, ctl: SeriesControl | None = None):
    """Evaluate the bivariate series; return ``(value, (M, N))``.

    Rectangular truncation [0, M) x [0, N): a side is enlarged (doubled) while
    its last two boundary lines still carry terms above tolerance.
    """
    ctl = ctl or DEFAULT_CONTROL
    x, y = float(x), float(y)
    lx = math.log(abs(x)) if x != 0.0 else 0.0
    ly = math.log(abs(y)) if y != 0.0 else 0.0
    sx = math.copysign(1.0, x) if x != 0.0 else 0.0
    sy = math.copysign(1.0, y) if y != 0.0 else 0.0
    cache: dict[tuple[int, int], float] = {}

    def term(m, n):
        key = (m, n)
        if key not in cache:
            cache[key] = _e2_term(p, m, n, lx, sx, ly, sy)
        return cache[key]

    M = 1 if x == 0.0 else 8
    N = 1 if y == 0.0 else 8
    while True:
        grid = np.array([[term(m, n) for n in range(N)] for m in range(M)])
        if not np.all(np.isfinite(grid)):
            raise NonConvergence("bivariate E2 term overflow")
        total = math.fsum(grid.ravel())
        tol = ctl.tol(total)
        row_tail = float(np.max(np.abs(grid[-2:, :]))) if M > 1 else 0.0
        col_tail = float(np.max(np.abs(grid[:, -2:]))) if N > 1 else 0.0
        grow_m = M > 1 and row_tail > tol
        grow_n = N > 1 and col_tail > tol
        if not (grow_m or grow_n):
            return total, (M, N)
        if grow_m:
            M *= 2
        if grow_n:
            N *= 2
        if M > ctl.max_terms or N > ctl.max_terms or M * N > 4 * ctl.max_terms**1.5:
            raise NonConvergence(f"bivariate E2 not converged at x={x}, y={y}")


def bivariate_e2(p: E2Params, x, y, ctl: SeriesControl | None = None) -> float:
    """Bivariate Mittag-Leffler-type function E2 at (x, y)."""
    return bivariate_e2_info(p, x, y, ctl)[0]
