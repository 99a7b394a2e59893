"""Parameter set of the nth-level Prabhakar derivative."""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction

from .errors import ConstraintWarning, InvalidParams
from .funcalg import MLSeries, exact
from .mlf import pochhammer


@dataclass(frozen=True)
class NthLevelSpec:
    """Order ``beta`` plus level vectors ``beta_i`` and ``theta_i``.

    The derivative is ``E(s_n, -gamma Theta_n) d^n E(n - beta - s_n, -gamma (n - Theta_n))``
    where ``E(b, g)`` is the Prabhakar integral of order ``b`` and upper
    parameter ``g`` with the shared ``(alpha, delta)``, ``s_n = sum(beta_i)`` and
    ``Theta_n = sum(theta_i)``.

    Both kernel orders must be nonnegative; an order of zero is the limiting
    operator (the identity when its upper parameter vanishes), which is what
    the Riemann-Liouville (``s_n = 0``) and Caputo (``n - beta - s_n = 0``) ends
    of the Hilfer family need.  Every ``theta_i`` must lie in [0, 1].  The soft
    constraints ``0 <= beta + s_n <= 1`` and ``Theta_n <= 1`` only warn.
    """

    alpha: Fraction
    beta: Fraction
    gamma: Fraction
    delta: float
    beta_i: tuple
    theta_i: tuple

    def __post_init__(self):
        set_ = object.__setattr__
        set_(self, "alpha", exact(self.alpha))
        set_(self, "beta", exact(self.beta))
        set_(self, "gamma", exact(self.gamma))
        set_(self, "delta", float(self.delta))
        set_(self, "beta_i", tuple(exact(b) for b in self.beta_i))
        set_(self, "theta_i", tuple(exact(t) for t in self.theta_i))
        if not math.isfinite(self.delta):
            raise InvalidParams("delta must be finite")
        if self.alpha <= 0:
            raise InvalidParams(f"alpha must be positive, got {self.alpha}")
        if self.beta < 0:
            raise InvalidParams(f"derivative order must be nonnegative, got {self.beta}")
        if len(self.beta_i) < 1 or len(self.beta_i) != len(self.theta_i):
            raise InvalidParams("beta_i and theta_i must be non-empty and of equal length")
        for t in self.theta_i:
            if not 0 <= t <= 1:
                raise InvalidParams(f"each theta_i must lie in [0, 1], got {t}")
        if self.s_n < 0:
            raise InvalidParams(f"s_n = sum(beta_i) must be nonnegative, got {self.s_n}")
        if self.inner_order < 0:
            raise InvalidParams(
                f"n - beta - s_n must be nonnegative, got {self.inner_order} "
                f"(n={self.n}, beta={self.beta}, s_n={self.s_n})"
            )
        for msg in self.soft_violations():
            warnings.warn(msg, ConstraintWarning, stacklevel=3)

    # ------------------------------------------------------------ factories
    @classmethod
    def hilfer(cls, alpha, beta, gamma, delta, theta) -> "NthLevelSpec":
        """First-level spec with ``s_1 = theta (1 - beta)`` (Hilfer-Prabhakar type)."""
        beta, theta = exact(beta), exact(theta)
        if not 0 <= beta <= 1:
            raise InvalidParams("the Hilfer form needs 0 <= beta <= 1")
        return cls(alpha, beta, gamma, delta, (theta * (1 - beta),), (theta,))

    # ------------------------------------------------------------ derived quantities
    @property
    def n(self) -> int:
        return len(self.beta_i)

    @property
    def s_n(self) -> Fraction:
        return sum(self.beta_i, Fraction(0))

    @property
    def theta_n(self) -> Fraction:
        return sum(self.theta_i, Fraction(0))

    @property
    def nu(self) -> Fraction:
        """beta + s_n, the order of the Riemann-Liouville type initial data."""
        return self.beta + self.s_n

    @property
    def gamma_prime(self) -> Fraction:
        """gamma (n - Theta_n), upper parameter of the initial-value kernels."""
        return self.gamma * (self.n - self.theta_n)

    @property
    def inner_order(self) -> Fraction:
        return self.n - self.nu

    @property
    def inner_gamma(self) -> Fraction:
        return -self.gamma_prime

    @property
    def outer_order(self) -> Fraction:
        return self.s_n

    @property
    def outer_gamma(self) -> Fraction:
        return -self.gamma * self.theta_n

    @property
    def inverse_gamma(self) -> Fraction:
        """Upper parameter of the Prabhakar integral that inverts the derivative.

        The derivative lowers ``(mu, g)`` of every term by ``(beta, n gamma)``,
        so its left inverse is the integral ``(beta, n gamma)``.
        """
        return self.n * self.gamma

    @property
    def A(self) -> int:
        return math.floor(self.nu) + 1

    def B(self, k: int) -> int:
        return math.floor((self.nu - k) / self.alpha)

    @property
    def N(self) -> int:
        return math.floor(self.nu / self.alpha)

    def M(self, j: int) -> int:
        return math.floor(self.nu - self.alpha * j) + 1

    def weight(self, j: int) -> float:
        """((-gamma')_j delta^j / j!) with gamma' = gamma (n - Theta_n)."""
        if j == 0:
            return 1.0
        return pochhammer(float(-self.gamma_prime), j) * self.delta**j / math.factorial(j)

    # ------------------------------------------------------------ checks
    def soft_violations(self) -> list[str]:
        out = []
        if not 0 <= self.nu <= 1:
            out.append(f"beta + s_n = {float(self.nu):.6g} lies outside [0, 1]")
        if self.theta_n > 1:
            out.append(f"Theta_n = {float(self.theta_n):.6g} exceeds 1")
        return out

    def check_series(self, f: MLSeries):
        if f.alpha != self.alpha or f.delta != self.delta:
            raise InvalidParams(
                f"function has (alpha, delta)=({f.alpha}, {f.delta}) but the operator "
                f"uses ({self.alpha}, {self.delta})"
            )

    def operator_metadata(self) -> dict:
        """Kernel parameters of the composed operator, as exact rationals."""
        return {
            "n": self.n,
            "inner": (self.inner_order, self.inner_gamma),
            "outer": (self.outer_order, self.outer_gamma),
            "alpha": self.alpha,
            "delta": self.delta,
        }

    def to_dict(self) -> dict:
        return {
            "alpha": float(self.alpha),
            "beta": float(self.beta),
            "gamma": float(self.gamma),
            "delta": self.delta,
            "beta_i": [float(b) for b in self.beta_i],
            "theta_i": [float(t) for t in self.theta_i],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NthLevelSpec":
        try:
            return cls(d["alpha"], d["beta"], d.get("gamma", 0), d.get("delta", 0.0),
                       tuple(d["beta_i"]), tuple(d["theta_i"]))
        except KeyError as e:
            raise InvalidParams(f"missing field {e}") from e
