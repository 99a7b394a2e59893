"""Independent reference implementations used only by the tests."""

import math

import mpmath


def mp_prabhakar(alpha, beta, gamma, z, digits=30):
    """E^gamma_{alpha,beta}(z) by direct mpmath summation with adaptive precision.

    Inputs are taken as exact binary values.  The working precision is raised
    until the digits lost to cancellation still leave ``digits`` correct ones.
    """
    dps = 40
    while True:
        with mpmath.workdps(dps):
            a, b, g, x = (mpmath.mpf(v) for v in (alpha, beta, gamma, z))
            s = mpmath.mpf(0)
            c = mpmath.mpf(1)
            big = mpmath.mpf(0)
            k_peak = float(abs(x)) ** (1 / float(a)) / float(a) + 10
            eps = mpmath.mpf(10) ** (-dps)
            for k in range(200000):
                t = c * mpmath.rgamma(a * k + b)
                s += t
                big = max(big, abs(t))
                if c == 0:
                    break
                if k > k_peak and abs(t) <= eps * abs(s):
                    break
                c *= (g + k) * x / (k + 1)
            loss = float(mpmath.log10(big / abs(s))) if s != 0 else dps
            if dps - loss >= digits + 5:
                return +s
            dps = int(loss) + digits + 15


def mp_ml(alpha, beta, z):
    """Two-parameter Mittag-Leffler E_{alpha,beta}(z)."""
    return mp_prabhakar(alpha, beta, 1.0, z)


def rel(a, b):
    a, b = float(a), float(b)
    return abs(a - b) / max(abs(b), 1e-300)


def power_rule(r, order, x):
    """RL differintegral of x^r of the given (possibly negative) order."""
    q = r + 1 + order
    if q <= 0 and float(q).is_integer():
        return 0.0
    return math.gamma(r + 1) / math.gamma(q) * x ** (r + order)


def mp_quad_rl(f, order, x, dps=30):
    """(1/Gamma(order)) int_0^x (x-t)^(order-1) f(t) dt with tanh-sinh quadrature."""
    with mpmath.workdps(dps):
        o = mpmath.mpf(order)
        val = mpmath.quad(lambda t: (x - t) ** (o - 1) * f(t), [0, x / 2, x])
        return val / mpmath.gamma(o)
