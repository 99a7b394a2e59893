"""Series solutions of the linear nth-level IVP and the time-fractional heat equation.

IVP:  ``D y = lam * y + f`` on (0, X] with initial data at 0+.  In the
operational form the derivative acts on ML terms as the shift
``(mu, g) -> (mu - beta, g - n gamma)`` plus initial-value kernels, so

    y = sum_k c_k sum_i lam^i T(nu - k + i beta, gamma' + i n gamma)
        + sum_i lam^i E((i+1) beta, (i+1) n gamma) f

with ``T(mu, g) = x^(mu-1) E^g_{alpha,mu}(delta x^alpha)``, ``nu = beta + s_n``
and ``gamma' = gamma (n - Theta_n)``.  Heat: the same series per Fourier mode
with ``lam = -k_tilde omega^2``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field

import numpy as np

from . import funcalg as fa
from ._quad import Kernel, PanelGrid, convolve
from .errors import (
    InvalidParams, LeavesAlgebra, ModeDivergence, TruncationWarning,
)
from .funcalg import MLSeries, MLTerm
from .levels import NthLevelSpec
from .mlf import default_control, E2Params, SeriesControl, bivariate_e2, prabhakar_e, prabhakar_e_array

INITIAL_KINDS = ("rl", "prabhakar", "constants")


@dataclass(frozen=True)
class IVPProblem:
    """``D y = lam y + forcing`` with initial data ``initial_values`` (a_0 .. a_{A-1}).

    ``initial_kind="rl"``: ``a_k`` is the Riemann-Liouville initial value
    ``(D^(nu-k-1) y)(0+)``.  ``initial_kind="prabhakar"``: ``a_k`` is
    ``(d^(n-1-k) E(n-nu, -gamma') y)(0+)``, i.e. the RL values already combined
    with the kernel weights; this form stays finite in cases where single RL
    values diverge.  ``initial_kind="constants"``: ``a_k`` is the coefficient
    c_k of the kernel ``x^(nu-k-1) E^gamma'_{alpha,nu-k}`` itself.  When
    ``beta < 1`` and some ``a_k`` with ``k >= 1`` is nonzero, the higher outer
    levels of that kernel make the lower initial values of y unbounded in
    both other conventions, and only this form poses the problem.

    Fewer than A values are padded with zeros.  ``x_max`` is the right end of
    the interval used for truncation diagnostics.
    """

    spec: NthLevelSpec
    lam: float
    forcing: MLSeries | None = None
    initial_values: tuple = ()
    initial_kind: str = "rl"
    x_max: float = 1.0

    def __post_init__(self):
        object.__setattr__(self, "lam", float(self.lam))
        object.__setattr__(self, "initial_values", tuple(float(a) for a in self.initial_values))
        if not math.isfinite(self.lam):
            raise InvalidParams("lambda must be finite")
        if self.initial_kind not in INITIAL_KINDS:
            raise InvalidParams(f"initial_kind must be one of {INITIAL_KINDS}")
        A = self.spec.A
        if len(self.initial_values) > A:
            raise InvalidParams(
                f"{len(self.initial_values)} initial values given but only A={A} are admissible"
            )
        for k, a in enumerate(self.initial_values):
            if not math.isfinite(a):
                raise InvalidParams("initial values must be finite")
            if a != 0.0 and self.spec.nu - k <= 0:
                raise InvalidParams(f"a_{k} must vanish: its kernel x^(nu-k-1) is not a function")
        if self.forcing is not None:
            self.spec.check_series(self.forcing)
        if not self.x_max > 0:
            raise InvalidParams("x_max must be positive")

    @property
    def a(self) -> list[float]:
        return list(self.initial_values) + [0.0] * (self.spec.A - len(self.initial_values))

    def to_dict(self) -> dict:
        d = self.spec.to_dict()
        d.update({
            "lambda": self.lam,
            "forcing": None if self.forcing is None else self.forcing.to_dict(),
            "a": list(self.initial_values),
            "initial_kind": self.initial_kind,
            "x_max": self.x_max,
        })
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "IVPProblem":
        spec = NthLevelSpec.from_dict(d)
        forcing = d.get("forcing")
        forcing = None if forcing is None else MLSeries.from_dict(forcing)
        try:
            return cls(spec, float(d["lambda"]), forcing, tuple(float(a) for a in d.get("a", ())),
                       d.get("initial_kind", "rl"), float(d.get("x_max", 1.0)))
        except KeyError as e:
            raise InvalidParams(f"missing field {e}") from e


@dataclass(frozen=True)
class IVPSolution:
    """Truncated double series; ``homogeneous + sum(particular)`` is the solution."""

    problem: IVPProblem
    series_i_max: int
    homogeneous: MLSeries
    particular: tuple
    c_k: tuple
    tail_bound: float = 0.0
    notes: tuple = field(default=())

    def total(self) -> MLSeries:
        out = self.homogeneous
        for p in self.particular:
            out = out + p
        return out

    def __call__(self, x):
        return evaluate_ivp(self, x)


def initial_kernel(spec: NthLevelSpec, k: int, i: int) -> tuple:
    """``(mu, gamma)`` of the level-i kernel attached to initial value k."""
    return spec.nu - k + i * spec.beta, spec.gamma_prime + i * spec.inverse_gamma


def _basis(spec: NthLevelSpec, lam: float, k: int, i_max: int) -> MLSeries:
    terms = []
    for i in range(i_max + 1):
        mu, g = initial_kernel(spec, k, i)
        terms.append(MLTerm(lam**i, mu, g))
    return MLSeries(spec.alpha, spec.delta, tuple(terms))


def _particular(spec: NthLevelSpec, lam: float, f: MLSeries, i_max: int) -> list[MLSeries]:
    out = []
    for i in range(i_max + 1):
        part = fa.prabhakar_integrate(f, (i + 1) * spec.beta, (i + 1) * spec.inverse_gamma)
        out.append(part.scale(lam**i))
    return out


def initial_value(y: MLSeries, spec: NthLevelSpec, kind: str, k: int) -> float:
    """Initial datum a_k of ``y`` in the given convention."""
    if kind == "rl":
        return fa.rl_initial_value(y, spec.nu - k - 1)
    if kind == "prabhakar":
        g = fa.prabhakar_integrate(y, spec.inner_order, spec.inner_gamma)
        return fa.rl_initial_value(g, spec.n - 1 - k)
    raise InvalidParams(f"no initial-value functional for kind {kind!r}")


def initial_data(y: MLSeries, spec: NthLevelSpec, kind: str = "rl") -> list[float]:
    """Initial values a_0 .. a_{A-1} of ``y`` in the given convention."""
    return [initial_value(y, spec, kind, k) for k in range(spec.A)]


def _fit_constants(p: IVPProblem, basis, part_sum: MLSeries) -> np.ndarray:
    a = np.array(p.a, dtype=float)
    if p.initial_kind == "constants":
        return a
    spec, kind = p.spec, p.initial_kind
    A = spec.A
    c = np.zeros(A)
    try:
        for k in reversed(range(A)):
            r = a[k]
            if not part_sum.is_zero():
                r -= initial_value(part_sum, spec, kind, k)
            for m in range(k + 1, A):
                if c[m] != 0.0:
                    r -= c[m] * initial_value(basis[m], spec, kind, k)
            c[k] = r / initial_value(basis[k], spec, kind, k)
    except LeavesAlgebra as e:
        raise InvalidParams(
            f"initial values of kind {kind!r} are unbounded for this solution ({e}); "
            "prescribe the kernel constants with initial_kind='constants'"
        ) from e
    return c


def solve_ivp(p: IVPProblem, i_max: int = 40, ctl: SeriesControl | None = None) -> IVPSolution:
    """Assemble the truncated series solution and fit its constants to the data.

    The constants c_k make the initial values of the assembled series equal
    to ``p.a``.  The kernel k only reaches initial values of index <= k, with
    unit diagonal, so the system is solved by back substitution; entries are
    computed only where they multiply a nonzero constant, so data with
    unbounded off-diagonal entries is still accepted when those entries drop
    out.
    """
    ctl = ctl or default_control()
    if int(i_max) != i_max or i_max < 1:
        raise InvalidParams("i_max must be a positive integer")
    spec, lam = p.spec, p.lam
    A = spec.A
    basis = [_basis(spec, lam, k, i_max) for k in range(A)]
    particular = _particular(spec, lam, p.forcing, i_max) if p.forcing is not None else []
    part_sum = MLSeries(spec.alpha, spec.delta)
    for q in particular:
        part_sum = part_sum + q
    c = _fit_constants(p, basis, part_sum)
    homogeneous = MLSeries(spec.alpha, spec.delta)
    for ck, b in zip(c, basis):
        homogeneous = homogeneous + b.scale(float(ck))

    # size of the last outer level at x_max, as the tail estimate
    x = p.x_max
    last = 0.0
    for k, ck in enumerate(c):
        mu, g = initial_kernel(spec, k, i_max)
        last += ck * lam**i_max * x ** (float(mu) - 1) * prabhakar_e(
            float(spec.alpha), float(mu), g, spec.delta * x ** float(spec.alpha), ctl)
    if particular:
        last += fa.evaluate(particular[-1], x, ctl)
    sol = IVPSolution(p, i_max, homogeneous, tuple(particular), tuple(float(v) for v in c), abs(last))
    scale = abs(evaluate_ivp(sol, x)) + 1.0
    if abs(last) > 1e-12 * scale:
        warnings.warn(
            TruncationWarning(
                f"last outer term at x={x} is {abs(last):.3g}; increase i_max", abs(last)
            ),
            stacklevel=2,
        )
    return sol


def evaluate_ivp(sol: IVPSolution, x, ctl: SeriesControl | None = None):
    """Pointwise value of the truncated solution."""
    if np.ndim(x) == 0:
        out = fa.evaluate(sol.homogeneous, float(x), ctl)
        return out + sum(fa.evaluate(q, float(x), ctl) for q in sol.particular)
    x = np.asarray(x, dtype=float)
    out = fa.evaluate_array(sol.homogeneous, x, ctl)
    for q in sol.particular:
        out = out + fa.evaluate_array(q, x, ctl)
    return out


def ivp_derivative(sol: IVPSolution) -> MLSeries:
    """Exact nth-level derivative of the truncated solution.

    When some pieces of ``D y`` are not locally integrable (possible for A >= 2
    with nonzero higher data) the formal image is returned; its pointwise
    values are still those of the derivative away from 0.
    """
    y = sol.total()
    try:
        return fa.nth_level_derivative(y, sol.problem.spec)
    except LeavesAlgebra:
        return fa.nth_level_derivative(y, sol.problem.spec, strict=False)


def ivp_residual(sol: IVPSolution, p: IVPProblem, x: float, ctl: SeriesControl | None = None) -> float:
    """``|D y(x) - lam y(x) - f(x)|`` with D y from the exact algebra."""
    Dy = ivp_derivative(sol)
    f = fa.evaluate(p.forcing, x, ctl) if p.forcing is not None else 0.0
    return abs(fa.evaluate(Dy, x, ctl) - p.lam * evaluate_ivp(sol, x, ctl) - f)


def ivp_initial_values(sol: IVPSolution) -> list[float]:
    """Initial data reconstructed from the solution, in the problem's convention.

    For ``initial_kind="constants"`` these are the kernel coefficients read
    back from the homogeneous series.
    """
    p = sol.problem
    if p.initial_kind == "constants":
        spec = p.spec
        out = []
        for k in range(spec.A):
            mu, g = initial_kernel(spec, k, 0)
            out.append(sum(t.coeff for t in sol.homogeneous.terms if t.mu == mu and t.gamma == g))
        return out
    return initial_data(sol.total(), p.spec, p.initial_kind)


# ---------------------------------------------------------------- E2 cross-check

def e2_params_initial(spec: NthLevelSpec, k: int) -> E2Params:
    """Bivariate parameters for ``sum_i lam^i T(nu-k+i beta, gamma' + i n gamma)``.

    With x = lam t^beta and y = delta t^alpha the sum equals
    ``Gamma(gamma') t^(nu-k-1) E2(x, y)``; valid when gamma' and n gamma are
    positive so that no parameter depends on the summation index.
    """
    gp, ng = float(spec.gamma_prime), float(spec.inverse_gamma)
    return E2Params(gamma1=gp, gamma2=1.0, delta1=float(spec.nu) - k, delta2=gp, delta3=1.0,
                    alpha1=ng, alpha2=0.0, alpha3=float(spec.beta), alpha4=ng,
                    beta1=1.0, beta2=float(spec.alpha), beta3=1.0)


def e2_params_forcing(spec: NthLevelSpec) -> E2Params:
    """Bivariate parameters for the resolvent kernel ``sum_i lam^i T((i+1)beta, (i+1) n gamma)``.

    The kernel is ``Gamma(n gamma) w^(beta-1) E2(lam w^beta, delta w^alpha)``.
    """
    ng = float(spec.inverse_gamma)
    b = float(spec.beta)
    return E2Params(gamma1=ng, gamma2=1.0, delta1=b, delta2=ng, delta3=1.0,
                    alpha1=ng, alpha2=0.0, alpha3=b, alpha4=ng,
                    beta1=1.0, beta2=float(spec.alpha), beta3=1.0)


class _E2Kernel:
    identity = False

    def __init__(self, spec: NthLevelSpec, lam: float, ctl: SeriesControl):
        self.p = e2_params_forcing(spec)
        self.lead = float(spec.beta)
        self.lam, self.a, self.d = lam, float(spec.alpha), spec.delta
        self.pref = math.gamma(float(spec.inverse_gamma))
        self.ctl = ctl

    def reg(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        return np.array([
            self.pref * bivariate_e2(self.p, self.lam * v**self.lead, self.d * v**self.a, self.ctl)
            for v in w
        ])

    def __call__(self, w):
        w = np.atleast_1d(np.asarray(w, dtype=float))
        return w ** (self.lead - 1.0) * self.reg(w)


def evaluate_ivp_e2(sol: IVPSolution, x: float, ctl: SeriesControl | None = None) -> float:
    """Solution value with the outer sum collapsed into bivariate E2 functions.

    The homogeneous part is summed in closed E2 form, the forcing part by
    quadrature against the E2 resolvent kernel.  Independent of the truncation
    ``i_max``.  Needs gamma' > 0 and n gamma > 0.
    """
    ctl = ctl or SeriesControl(rel_tol=1e-15)
    p = sol.problem
    spec = p.spec
    gp, ng = spec.gamma_prime, spec.inverse_gamma
    if not (gp > 0 and ng > 0):
        raise InvalidParams("the E2 form needs gamma (n - Theta_n) > 0 and n gamma > 0")
    a, b, d = float(spec.alpha), float(spec.beta), spec.delta
    out = 0.0
    for k, ck in enumerate(sol.c_k):
        if ck == 0.0:
            continue
        e2 = bivariate_e2(e2_params_initial(spec, k), p.lam * x**b, d * x**a, ctl)
        out += ck * math.gamma(float(gp)) * x ** (float(spec.nu) - k - 1) * e2
    if p.forcing is not None and not p.forcing.is_zero():
        f = p.forcing
        out += float(convolve(_E2Kernel(spec, p.lam, ctl), lambda t: fa.evaluate_array(f, t),
                              f.leading_exponent(), np.array([x]))[0])
    return out


# ---------------------------------------------------------------- Picard oracle

def picard_ivp(sol: IVPSolution, xs, iterations: int = 10, nodes: int = 12, depth: float = 1e-9):
    """Brute-force fixed-point iteration of the integral form of the IVP.

    ``y = y0 + lam E(beta, n gamma) y + E(beta, n gamma) f`` with ``y0`` the
    initial-value kernels weighted by the solution's constants.  Every Prabhakar
    integral is done by quadrature on a graded panel grid, so this does not use
    the term algebra.  ``iterations`` steps reproduce the outer series through
    level ``iterations`` (both the initial-value and the forcing parts).
    """
    p = sol.problem
    spec = p.spec
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    X = float(np.max(xs))
    a, d = float(spec.alpha), spec.delta
    grid = PanelGrid(X, depth=depth, nodes=nodes)
    pts = np.concatenate([grid.points.ravel(), xs])
    npts = grid.points.size
    kern = Kernel(a, float(spec.beta), float(spec.inverse_gamma), d, X)

    def y0(t):
        t = np.asarray(t, dtype=float)
        out = np.zeros_like(t)
        for k, ck in enumerate(sol.c_k):
            if ck:
                mu, g = initial_kernel(spec, k, 0)
                out += ck * t ** (float(mu) - 1) * prabhakar_e_array(a, float(mu), g, d * t**a)
        return out

    p0 = min([float(spec.nu) - k - 1 for k, ck in enumerate(sol.c_k) if ck] + [0.0])
    if p.forcing is not None and not p.forcing.is_zero():
        f = p.forcing
        F = convolve(kern, lambda t: fa.evaluate_array(f, t), f.leading_exponent(), pts)
        p0 = min(p0, f.leading_exponent() + float(spec.beta))
    else:
        F = np.zeros_like(pts)
    z = F.copy()  # y_m - y0 on the grid and at xs
    for _ in range(iterations):
        P = grid.fit(z[:npts])

        def ym(t, P=P):
            return y0(t) + P(t)

        z = p.lam * convolve(kern, ym, p0, pts) + F
    return y0(xs) + z[npts:]


# ---------------------------------------------------------------- heat equation

@dataclass(frozen=True)
class HeatProblem:
    """``D_t u = k_tilde u_xx`` on a periodic grid of [-L, L) approximating the line.

    ``u0`` holds the initial profile samples on the grid
    ``x_j = -L + 2 L j / N``; it is read as the k = 0 initial datum of every
    Fourier mode (all other initial data vanish).
    """

    spec: NthLevelSpec
    k_tilde: float
    L: float
    N: int
    u0: np.ndarray
    check_decay: bool = True

    def __post_init__(self):
        if not self.k_tilde > 0:
            raise InvalidParams("k_tilde must be positive")
        if not self.L > 0:
            raise InvalidParams("L must be positive")
        if self.N < 2 or (self.N & (self.N - 1)):
            raise InvalidParams("N must be a power of two")
        u0 = np.asarray(self.u0, dtype=float)
        if u0.shape != (self.N,):
            raise InvalidParams(f"u0 must have {self.N} samples")
        if not np.all(np.isfinite(u0)):
            raise InvalidParams("u0 must be finite")
        if self.check_decay:
            peak = float(np.max(np.abs(u0))) if u0.size else 0.0
            edge = max(abs(u0[0]), abs(u0[-1]))
            if peak > 0 and edge > 1e-10 * peak:
                raise InvalidParams(f"u0 does not decay at +-L (edge/peak = {edge / peak:.2g})")
        object.__setattr__(self, "u0", u0)

    @property
    def grid(self) -> np.ndarray:
        return -self.L + 2 * self.L * np.arange(self.N) / self.N

    @property
    def omega(self) -> np.ndarray:
        return 2 * np.pi * np.fft.rfftfreq(self.N, d=2 * self.L / self.N)

    @classmethod
    def from_profile(cls, spec, k_tilde, L, N, kind: str, **params) -> "HeatProblem":
        x = -L + 2 * L * np.arange(N) / N
        if kind == "gaussian":
            amp = float(params.get("amplitude", 1.0))
            s = float(params.get("sigma", 1.0))
            c = float(params.get("center", 0.0))
            return cls(spec, k_tilde, L, N, amp * np.exp(-((x - c) ** 2) / (2 * s * s)))
        if kind == "cosine":
            amp = float(params.get("amplitude", 1.0))
            m = int(params.get("mode", 1))
            return cls(spec, k_tilde, L, N, amp * np.cos(np.pi * m * x / L), check_decay=False)
        if kind == "samples":
            return cls(spec, k_tilde, L, N, np.asarray(params["values"], dtype=float))
        raise InvalidParams(f"unknown initial profile kind {kind!r}")


@dataclass(frozen=True)
class HeatField:
    times: np.ndarray
    grid: np.ndarray
    values: np.ndarray  # shape (len(grid), len(times))
    cutoff_frequency: float
    modes_used: int
    max_levels: int
    metadata: dict = field(default_factory=dict)


def mode_series_functions(spec: NthLevelSpec, times, levels: int, ctl: SeriesControl | None = None):
    """``F_i(t) = t^(i beta + nu - 1) E^(gamma' + i n gamma)_{alpha, i beta + nu}(delta t^alpha)``.

    Returns an array of shape (levels + 1, len(times)).
    """
    t = np.asarray(times, dtype=float)
    a, d = float(spec.alpha), spec.delta
    out = np.empty((levels + 1, t.size))
    for i in range(levels + 1):
        mu, g = initial_kernel(spec, 0, i)
        out[i] = t ** (float(mu) - 1) * np.array(
            [prabhakar_e(a, float(mu), g, d * tt**a, ctl) for tt in t])
    return out


def solve_heat(p: HeatProblem, times, i_max: int = 40, ctl: SeriesControl | None = None,
               mode_floor: float = 1e-15, tol: float = 1e-13, negligible: float = 1e-12) -> HeatField:
    """Spectral solution: FFT of u0, per-mode outer series, inverse FFT per time.

    Modes with relative amplitude below ``mode_floor`` are dropped; the highest
    kept frequency is the reported cutoff.  Each kept mode sums
    ``sum_i lam^i F_i(t)`` with ``lam = -k_tilde omega^2`` until two
    consecutive terms fall below ``tol`` relative to the partial sum, using up
    to ``4 * i_max`` levels.  A mode that fails is kept if its estimated error
    is below ``negligible`` times the peak mode amplitude, dropped if its own
    amplitude is, and otherwise ``ModeDivergence`` is raised; kept and dropped
    modes are summarized in one ``TruncationWarning`` each.  The reported cutoff is the highest
    frequency up to which every kept mode met the relative test.
    """
    ctl = ctl or default_control()
    times = np.atleast_1d(np.asarray(times, dtype=float))
    if np.any(times <= 0):
        raise InvalidParams("times must be positive")
    spec = p.spec
    a0 = np.fft.rfft(p.u0)
    omega = p.omega
    lam = -p.k_tilde * omega**2
    amp = np.abs(a0)
    peak = float(np.max(amp)) if amp.size else 0.0
    if peak == 0.0:
        return HeatField(times, p.grid, np.zeros((p.N, times.size)), 0.0, 0, 0,
                         _heat_metadata(spec, 0.0))
    keep = amp > mode_floor * peak
    levels = 4 * i_max
    F = mode_series_functions(spec, times, levels, ctl)
    uhat = np.zeros((omega.size, times.size), dtype=complex)
    used = 0
    cutoff = 0.0
    clean = True  # every kept mode so far met the relative test
    unresolved, dropped = [], []
    for m in np.flatnonzero(keep):
        lm = lam[m]
        terms = (lm ** np.arange(levels + 1))[:, None] * F  # (levels+1, times)
        done = False
        for top in (i_max, 2 * i_max, 3 * i_max, 4 * i_max):
            part = terms[: top + 1]
            s = part.sum(axis=0)
            last2 = np.max(np.abs(part[-2:]), axis=0)
            big = np.max(np.abs(part), axis=0)
            ok = np.all(last2 <= tol * np.maximum(np.abs(s), 1e-300)) or np.all(last2 == 0)
            # rounding from cancellation among large terms must stay below tolerance
            ok = ok and np.all(big * 1e-16 * top <= 1e-7 * np.maximum(np.abs(s), 1e-30 * big.max()))
            if ok:
                done = True
                used = max(used, top)
                break
        if not done:
            # a mode this small cannot move the field above rounding: keep or drop it, warn
            err = amp[m] * float(np.max(last2 + big * 1e-16 * top))
            if np.isfinite(err) and err <= negligible * peak:
                unresolved.append(float(omega[m]))
            elif amp[m] <= negligible * peak:
                dropped.append(float(omega[m]))
                s = 0.0
            else:
                raise ModeDivergence(
                    f"outer series for omega={omega[m]:.6g} did not converge within {levels} levels "
                    f"(largest summable frequency {cutoff:.6g})",
                    cutoff=cutoff, omega=float(omega[m]),
                )
            clean = False
            used = levels
        elif clean:
            cutoff = float(omega[m])
        uhat[m] = a0[m] * s
    if unresolved:
        warnings.warn(f"{len(unresolved)} modes in [{min(unresolved):.6g}, {max(unresolved):.6g}] "
                      f"kept below relative accuracy (error under {negligible:g} of the peak mode)",
                      TruncationWarning, stacklevel=2)
    if dropped:
        warnings.warn(f"{len(dropped)} modes in [{min(dropped):.6g}, {max(dropped):.6g}] dropped: "
                      f"series not summable and amplitude under {negligible:g} of the peak mode",
                      TruncationWarning, stacklevel=2)
    values = np.fft.irfft(uhat, n=p.N, axis=0)
    return HeatField(times, p.grid, values, cutoff, int(np.sum(keep)), used,
                     _heat_metadata(spec, cutoff))


def _heat_metadata(spec: NthLevelSpec, cutoff: float) -> dict:
    return {
        "sign_convention": "(-k_tilde omega^2)^i",
        "exponent_convention": "gamma (n - Theta_n) + i n gamma",
        "fourier_convention": "u = sum_omega u_hat(omega) e^{i omega x} (numpy FFT)",
        "initial_data": "u0 is the k=0 initial datum of each mode; other data vanish",
        "cutoff_frequency": cutoff,
    }


def heat_mode_problem(spec: NthLevelSpec, k_tilde: float, omega: float, amplitude: float = 1.0,
                      x_max: float = 1.0) -> IVPProblem:
    """The per-mode IVP in time solved inside :func:`solve_heat`."""
    return IVPProblem(spec, -k_tilde * omega**2, None, (amplitude,), "rl", x_max)


def hilfer_prabhakar_solution_metadata(alpha, beta, gamma, delta, theta, lam: float = 1.0,
                                       i_max: int = 5) -> dict:
    """Compare solver terms with the Hilfer-Prabhakar relaxation solution.

    For ``D y = lam y`` with the Hilfer-Prabhakar derivative of type theta the
    Laplace transform gives ``y = a_0 sum_i lam^i x^(mu_i - 1) E^(g_i)_{alpha,mu_i}``
    with ``mu_i = (i+1) beta + theta (1 - beta)`` and
    ``g_i = i gamma + gamma (1 - theta)``.  The solver's homogeneous basis for
    the matching NthLevelSpec is compared term by term.
    """
    spec = NthLevelSpec.hilfer(alpha, beta, gamma, delta, theta)
    b, t, g = fa.exact(beta), fa.exact(theta), fa.exact(gamma)
    lam = float(lam)
    ref = [MLTerm(lam**i, (i + 1) * b + t * (1 - b), i * g + g * (1 - t)) for i in range(i_max + 1)]
    ref = MLSeries(spec.alpha, spec.delta, tuple(ref))
    got = _basis(spec, lam, 0, i_max)
    mism = sum(1 for u, v in zip(got.terms, ref.terms) if u != v) + abs(len(got) - len(ref))
    return {"solver_terms": got.to_dict(), "reference_terms": ref.to_dict(), "mismatches": mism}
