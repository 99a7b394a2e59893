"""Quadrature machinery for weakly singular convolutions on (0, x]."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from numpy.polynomial import chebyshev as C
from numpy.polynomial import legendre
from scipy import integrate

from .errors import InterpolationFailure, QuadratureFailure
from .mlf import SeriesControl, _coefficients, prabhakar_e_array

# normalized integrands are O(1); this is effectively a relative tolerance
QUAD_TOL = 1e-12
QUAD_LIMIT = 4000
# integrands only need absolute accuracy; this skips extended resummation near sign changes
QUAD_CTL = SeriesControl(abs_tol=1e-13)


class Kernel:
    """Convolution kernel ``w^(b-1) E^g_{alpha,b}(delta w^alpha)``.

    Written as ``w^(lead-1) * reg(w)`` with ``reg`` bounded at 0.  For ``b == 0``
    the kernel is the identity plus ``w^(-1) E^g_{alpha,0}(delta w^alpha)``,
    whose series starts at ``w^(alpha-1)``; ``identity`` is then True and
    ``lead`` is None when the convolution part vanishes.
    """

    def __init__(self, alpha: float, b: float, g: float, delta: float, wmax: float = 1.0):
        self.alpha, self.b, self.g, self.delta = float(alpha), float(b), float(g), float(delta)
        self.identity = self.b == 0.0
        if self.b > 0:
            self.lead = self.b
        elif self.g == 0.0 or self.delta == 0.0:
            self.lead = None
        else:
            self.lead = self.alpha
            # reg(w) = delta * sum_{k>=1} a_k u^(k-1), u = delta w^alpha
            umax = abs(self.delta) * wmax**self.alpha
            coefs = []
            small = 0
            for k, a in _coefficients(self.alpha, 0.0, self.g):
                if k == 0:
                    continue
                coefs.append(a)
                if abs(a) * max(umax, 1e-300) ** (k - 1) < 1e-18 * max(abs(c) for c in coefs):
                    small += 1
                    if small >= 2:
                        break
                else:
                    small = 0
                if k > 500:
                    raise QuadratureFailure("order-zero kernel series too long")
            self._zero_coefs = np.array(coefs)

    def reg(self, w):
        w = np.asarray(w, dtype=float)
        if self.b > 0:
            return prabhakar_e_array(self.alpha, self.b, self.g, self.delta * w**self.alpha, QUAD_CTL)
        u = self.delta * w**self.alpha
        return self.delta * np.polynomial.polynomial.polyval(u, self._zero_coefs)

    def __call__(self, w):
        w = np.asarray(w, dtype=float)
        return w ** (self.lead - 1.0) * self.reg(w)


def convolve(kernel: Kernel, f, p: float, xs) -> np.ndarray:
    """``int_0^x K(x-t) f(t) dt`` for each x in ``xs`` (identity part included).

    ``f`` is vectorized and behaves like ``t**p`` near 0 (p > -1).  The interval
    is split at x/2: on the left ``t = (x/2) u^(1/(1+p))`` removes the endpoint
    singularity of f, on the right ``x - t = (x/2) v^(1/lead)`` removes the
    kernel singularity.  All x are integrated together with ``quad_vec``.
    """
    xs = np.atleast_1d(np.asarray(xs, dtype=float))
    if np.any(xs <= 0):
        raise ValueError("convolution points must be positive")
    out = np.zeros_like(xs)
    if kernel.identity:
        out += f(xs)
    if kernel.lead is None:
        return out
    if not p > -1:
        raise QuadratureFailure(f"singularity exponent {p} is not integrable")
    b = kernel.lead
    h = xs / 2
    scale = xs ** (b + p)
    ea = 1.0 / (1.0 + p)
    eb = 1.0 / b
    # below this t the bounded factor f(t) t^(-p) is taken as constant; for p
    # close to -1, t = h u^ea underflows on a sizable part of the u range
    tiny = 1e-300 ** (1.0 / max(1.0, 1.0 + p))

    def left(u):
        if u == 0.0:
            return np.zeros_like(xs)
        t = h * u**ea
        tt = np.maximum(t, tiny)
        # f(t) dt = (f(t) t^(-p)) h^(1+p) ea du exactly
        return kernel(xs - t) * f(tt) * tt ** (-p) * (h ** (1.0 + p) * ea) / scale

    def right(v):
        if v == 0.0:
            return np.zeros_like(xs)
        w = h * v**eb
        return kernel.reg(w) * f(xs - w) * (h**b * eb) / scale

    total = np.zeros_like(xs)
    for part in (left, right):
        res, err, info = integrate.quad_vec(
            part, 0.0, 1.0, epsabs=QUAD_TOL, epsrel=QUAD_TOL, norm="max",
            limit=QUAD_LIMIT, full_output=True,
        )
        if info.status != 0 and err > 1e-9 * max(1.0, float(np.max(np.abs(res)))):
            raise QuadratureFailure(f"adaptive quadrature did not converge (error estimate {err:.3g})")
        total += res
    return out + total * scale


@dataclass
class PanelGrid:
    """Geometrically graded panels ``[x r^(k+1), x r^k]`` with Chebyshev nodes.

    Resolves functions with algebraic behaviour at 0: on every panel such a
    function is analytic with the same relative accuracy, so a fixed degree
    suffices down to the smallest panel.
    """

    x: float
    ratio: float = 2.0 / 3.0
    depth: float = 1e-13
    nodes: int = 16

    def __post_init__(self):
        K = int(math.ceil(math.log(self.depth) / math.log(self.ratio)))
        self.edges = self.x * self.ratio ** np.arange(K + 1)  # decreasing
        tau = np.cos(np.pi * (np.arange(self.nodes) + 0.5) / self.nodes)
        self.tau = tau
        lo, hi = self.edges[1:], self.edges[:-1]
        self.points = (0.5 * (hi + lo)[:, None] + 0.5 * (hi - lo)[:, None] * tau[None, :])

    @property
    def bottom(self) -> float:
        return float(self.edges[-1])

    def fit(self, values) -> "PanelInterpolant":
        values = np.asarray(values, dtype=float).reshape(self.points.shape)
        coefs = np.array([C.chebfit(self.tau, v, self.nodes - 1) for v in values])
        return PanelInterpolant(self, coefs)


@dataclass
class PanelInterpolant:
    grid: PanelGrid
    coefs: np.ndarray  # (panels, nodes), Chebyshev coefficients in tau

    def check(self, tol: float = 1e-8):
        """Raise InterpolationFailure when trailing coefficients are not negligible."""
        head = np.max(np.abs(self.coefs), axis=1)
        tail = np.max(np.abs(self.coefs[:, -3:]), axis=1)
        bad = tail > tol * np.maximum(head, 1e-300)
        if np.any(bad & (head > 0)):
            k = int(np.flatnonzero(bad)[0])
            raise InterpolationFailure(
                f"panel [{self.grid.edges[k + 1]:.3g}, {self.grid.edges[k]:.3g}] unresolved "
                f"(trailing/leading coefficient ratio {tail[k] / head[k]:.2g})"
            )
        return self

    def deriv(self, n: int) -> "PanelInterpolant":
        if n == 0:
            return self
        lo, hi = self.grid.edges[1:], self.grid.edges[:-1]
        half = 0.5 * (hi - lo)
        out = []
        for c, hw in zip(self.coefs, half):
            d = C.chebder(c, n) / hw**n
            out.append(np.concatenate([d, np.zeros(len(c) - len(d))]))
        return PanelInterpolant(self.grid, np.array(out))

    def panel_eval(self, k: int, y):
        lo, hi = self.grid.edges[k + 1], self.grid.edges[k]
        tau = (2.0 * np.asarray(y) - (hi + lo)) / (hi - lo)
        return C.chebval(tau, self.coefs[k])

    def __call__(self, y):
        """Evaluate at points inside (0, x]; points below the grid use a power-law fit."""
        y = np.atleast_1d(np.asarray(y, dtype=float))
        edges = self.grid.edges
        k = np.floor(np.log(y / self.grid.x) / math.log(self.grid.ratio)).astype(int)
        k = np.clip(k, 0, len(edges) - 2)
        lo, hi = edges[k + 1], edges[k]
        tau = (2.0 * y - (hi + lo)) / (hi - lo)
        # Clenshaw recurrence, vectorized over points with per-point coefficient rows
        c = self.coefs[k]
        b1 = np.zeros_like(y)
        b2 = np.zeros_like(y)
        for j in range(c.shape[1] - 1, 0, -1):
            b1, b2 = 2.0 * tau * b1 - b2 + c[:, j], b1
        out = tau * b1 - b2 + c[:, 0]
        below = y < self.grid.bottom
        if np.any(below):
            q, v0 = self.tail_power()
            out[below] = v0 * (y[below] / self.grid.bottom) ** q
        return out

    def tail_power(self):
        """Exponent q and value at the bottom edge of a power law fitted to the last panel."""
        kb = len(self.grid.edges) - 2
        v0 = float(self.panel_eval(kb, self.grid.edges[-1]))
        v1 = float(self.panel_eval(kb, self.grid.edges[-2]))
        if v0 == 0.0 or v1 == 0.0 or (v0 > 0) != (v1 > 0):
            return 0.0, 0.0
        q = math.log(abs(v1 / v0)) / math.log(1.0 / self.grid.ratio)
        return q, v0


def gauss_legendre(n: int):
    return legendre.leggauss(n)


def convolve_panels(kernel: Kernel, P: PanelInterpolant, x: float, gl_nodes: int = 24) -> float:
    """``int_0^x K(x-y) P(y) dy`` for a panel interpolant P on the grid of x."""
    g = P.grid
    out = float(P.panel_eval(0, x)) if kernel.identity else 0.0
    if kernel.lead is None:
        return out
    t, wts = gauss_legendre(gl_nodes)
    b = kernel.lead
    # top panel: kernel singular at y = x
    lo = g.edges[1]
    L = x - lo

    def top(v):
        if v == 0.0:
            return 0.0
        w = L * v ** (1.0 / b)
        return float(kernel.reg(w)) * float(P.panel_eval(0, x - w))

    val, err = integrate.quad(top, 0.0, 1.0, epsabs=0.0, epsrel=1e-13, limit=400)
    total = val * L**b / b
    # remaining panels: smooth integrands
    for k in range(1, len(g.edges) - 1):
        a, c = g.edges[k + 1], g.edges[k]
        y = 0.5 * (a + c) + 0.5 * (c - a) * t
        total += 0.5 * (c - a) * float(np.sum(wts * kernel(x - y) * P.panel_eval(k, y)))
    # power-law tail on [0, bottom]
    q, v0 = P.tail_power()
    if v0 != 0.0:
        if q <= -1.0 + 1e-6:
            raise QuadratureFailure(f"integrand behaves like y^{q:.3g} at 0 and is not integrable")
        ybot = g.bottom
        total += float(kernel(x - ybot / 2)) * v0 * ybot / (q + 1.0)
    return out + total
