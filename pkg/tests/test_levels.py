from fractions import Fraction

import pytest

from prabhakar.errors import ConstraintWarning, InvalidParams
from prabhakar.funcalg import from_power
from prabhakar.levels import NthLevelSpec


def test_derived_quantities():
    s = NthLevelSpec(0.5, 0.4, 0.3, 0.2, (0.1, 0.2), (0.25, 0.5))
    assert s.n == 2
    assert s.s_n == Fraction(3, 10)
    assert s.theta_n == Fraction(3, 4)
    assert s.nu == Fraction(7, 10)
    assert s.gamma_prime == Fraction(3, 10) * Fraction(5, 4)
    assert s.inner_order == 2 - Fraction(7, 10)
    assert s.outer_gamma == -Fraction(3, 10) * Fraction(3, 4)
    assert s.inverse_gamma == Fraction(6, 10)
    assert s.A == 1
    assert s.N == 1
    assert s.B(0) == 1
    assert s.M(1) == 1


def test_hilfer_factory():
    s = NthLevelSpec.hilfer(0.5, 0.4, 0.3, 0.2, 0.5)
    assert s.s_n == Fraction(3, 10)
    assert s.nu == Fraction(7, 10)


@pytest.mark.parametrize("kw", [
    dict(alpha=0),
    dict(beta=-0.1),
    dict(beta_i=(), theta_i=()),
    dict(theta_i=(1.5,)),
    dict(beta_i=(-0.2,)),
    dict(beta=0.9, beta_i=(0.3,)),  # n - beta - s_n < 0
    dict(delta=float("inf")),
])
def test_validation(kw):
    args = dict(alpha=0.5, beta=0.4, gamma=0.3, delta=0.2, beta_i=(0.3,), theta_i=(0.5,))
    args.update(kw)
    with pytest.raises(InvalidParams):
        NthLevelSpec(**args)


def test_order_zero_limits_allowed():
    # RL end (s_n = 0) and Caputo end (n - beta - s_n = 0)
    NthLevelSpec(1, 0.6, 0, 0, (0,), (0,))
    NthLevelSpec(1, 0.6, 0, 0, (0.4,), (1,))


def test_soft_constraint_warns():
    with pytest.warns(ConstraintWarning):
        NthLevelSpec(1, 1.2, 0, 0, (0.3, 0.2), (0.8, 0.6))


def test_check_series():
    s = NthLevelSpec(0.5, 0.4, 0.3, 0.2, (0.3,), (0.5,))
    s.check_series(from_power(1, 0.5, 0.2))
    with pytest.raises(InvalidParams):
        s.check_series(from_power(1, 0.5, 0.1))


def test_dict_round_trip():
    s = NthLevelSpec(0.5, 0.4, 0.3, 0.2, (0.1, 0.2), (0.25, 0.5))
    assert NthLevelSpec.from_dict(s.to_dict()) == s
    with pytest.raises(InvalidParams):
        NthLevelSpec.from_dict({"alpha": 1})


def test_weights():
    s = NthLevelSpec(0.5, 0.4, 0.3, 0.2, (0.3,), (0.5,))
    gp = float(s.gamma_prime)
    assert s.weight(0) == 1.0
    assert s.weight(2) == pytest.approx((-gp) * (1 - gp) * 0.2**2 / 2)
