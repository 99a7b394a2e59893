import math

import numpy as np
import pytest

from prabhakar import funcalg as fa
from prabhakar import operators as op
from prabhakar.errors import InsufficientSmoothness, InvalidParams
from prabhakar.levels import NthLevelSpec
from prabhakar.mlf import PrabhakarParams

from oracles import mp_quad_rl, power_rule, rel

XS = (0.25, 0.5, 1.0)


def power_fn(r, T=1.0):
    return op.SampledFn(lambda t: np.power(t, r), T, r)


# RL integral against mpmath quadrature

@pytest.mark.parametrize("order", [0.3, 1.0, 1.7])
def test_rl_integral_of_one(order):
    one = op.SampledFn(lambda t: np.ones_like(t))
    assert rel(op.rl_integral(one, order, 0.7), power_rule(0, order, 0.7)) < 1e-12


@pytest.mark.parametrize("r,order", [(0.5, 0.4), (-0.3, 1.2), (2.0, 0.8)])
def test_rl_integral_power(r, order):
    v = op.rl_integral(power_fn(r), order, np.array(XS))
    for x, vi in zip(XS, v):
        assert rel(vi, power_rule(r, order, x)) < 1e-11


def test_rl_integral_sin_vs_mpmath():
    import mpmath
    f = op.SampledFn(np.sin)
    assert rel(op.rl_integral(f, 0.6, 0.9), mp_quad_rl(mpmath.sin, 0.6, 0.9)) < 1e-11


def test_rl_integral_rejects_bad_input():
    with pytest.raises(InvalidParams):
        op.rl_integral(power_fn(1), 0.0, 0.5)
    with pytest.raises(InvalidParams):
        op.rl_integral(power_fn(1), 0.5, 1.5)


def test_prabhakar_gamma_zero_is_rl():
    f = power_fn(0.7)
    a = op.prabhakar_integral_quad(f, PrabhakarParams(0.6, 1.3, 0.0, 2.0), 0.8)
    assert rel(a, op.rl_integral(f, 1.3, 0.8)) < 1e-12


@pytest.mark.parametrize("seed", range(4))
def test_quadrature_matches_algebra(seed):
    rng = np.random.default_rng(seed)
    a, d = rng.uniform(0.3, 1.5), rng.uniform(-1.5, 1.5)
    terms = [fa.MLTerm(rng.normal(), rng.uniform(0.3, 2.5), rng.uniform(-1.5, 1.5)) for _ in range(3)]
    f = fa.MLSeries(a, d, terms)
    b, g = rng.uniform(0.2, 1.8), rng.uniform(-1.5, 1.5)
    p = PrabhakarParams(a, b, g, d)
    quad = op.prabhakar_integral_quad(op.SampledFn.from_series(f), p, np.array(XS))
    exact = fa.evaluate_array(fa.prabhakar_integrate(f, b, g), np.array(XS))
    scale = 1 + np.abs(exact)
    assert np.all(np.abs(quad - exact) <= 1e-9 * scale)


# derivatives

def test_pr_derivative_series_both_routes():
    f = fa.from_power(2.0, 0.5, 0.4)
    p = PrabhakarParams(0.5, 0.6, 0.7, 0.4)
    exact = fa.evaluate(fa.pr_derivative(f, 0.6, 0.7), 0.6)
    assert rel(op.pr_derivative_series(f, p, 0.6), exact) < 1e-10
    sampled = op.SampledFn(lambda t: t**2, 1.0, 2.0,
                           (lambda t: 2 * t, lambda t: 2 * np.ones_like(t)))
    assert rel(op.pr_derivative_series(sampled, p, 0.6), exact) < 1e-8


def test_sampled_derivative_needs_data():
    f = op.SampledFn(lambda t: t**2, 1.0, 2.0)
    with pytest.raises(InsufficientSmoothness):
        op.pr_derivative_series(f, PrabhakarParams(0.5, 0.6, 0.0, 0.0), 0.5)


def test_caputo_of_square():
    # Caputo derivative of order 0.5 of x^2 is 2 x^1.5 / Gamma(2.5)
    spec = NthLevelSpec(0.5, 0.5, 0, 0, (0.5,), (1,))
    want = 2 * 0.6**1.5 / math.gamma(2.5)
    f = fa.from_power(2, 0.5)
    assert rel(fa.evaluate(fa.nth_level_derivative(f, spec), 0.6), want) < 1e-13
    assert rel(op.nth_level_derivative_quad(f, spec, 0.6), want) < 1e-7


@pytest.mark.parametrize("n", [1, 2])
def test_nth_level_quad_matches_exact(n):
    bi = (0.2,) * n
    ti = (0.4,) * n
    spec = NthLevelSpec(0.7, 0.5 + (n - 1) * 0.6, 0.6, -0.4, bi, ti)
    f = fa.from_power(2.5, 0.7, -0.4) + fa.kernel_term(0.7, -0.4, 3.2, 0.3)
    for x in (0.4, 1.0):
        exact = fa.evaluate(fa.nth_level_derivative(f, spec), x)
        assert abs(op.nth_level_derivative_quad(f, spec, x) - exact) <= 1e-6 * (1 + abs(exact))


# first-level closed form

@pytest.mark.parametrize("r", [0.5, 1, 2])
def test_first_level_power_closed_form(r):
    spec = NthLevelSpec(0.5, 0.4, 0.8, 0.7, (0.3,), (0.6,))
    f = fa.from_power(r, 0.5, 0.7)
    D = fa.nth_level_derivative(f, spec)
    for x in XS:
        closed = op.first_level_power_derivative(r, spec, x)
        assert abs(closed - fa.evaluate(D, x)) <= 1e-8 * (1 + abs(closed))
        assert abs(closed - op.nth_level_derivative_quad(f, spec, x)) <= 1e-5 * (1 + abs(closed))


def test_first_level_closed_form_domain():
    with pytest.raises(InvalidParams):
        op.first_level_power_derivative(-0.05, NthLevelSpec(0.5, 0.9, 0.8, 0.7, (0.1,), (0.5,)), 0.5)


# inversion and decomposition

def _spec(n):
    return NthLevelSpec(0.6, 0.3 + 0.9 * (n - 1), 0.7, 0.5, (0.15,) * n, (0.5,) * n)


def _domain_fn(spec):
    # one smooth term plus one carrying the leading initial value
    nu = spec.nu
    return fa.MLSeries(spec.alpha, spec.delta, [fa.MLTerm(0.8, nu + fa.exact(0.7), 1.3),
                                                 fa.MLTerm(-0.6, nu, -0.4)])


@pytest.mark.parametrize("n", [1, 2, 3])
def test_inversion_residual(n):
    spec = _spec(n)
    f = _domain_fn(spec)
    for x in XS:
        scale = 1 + abs(fa.evaluate(f, x))
        assert abs(op.inversion_residual(f, spec, x)) <= 1e-10 * scale
    quad = op.inversion_residual_quad(f, spec, np.array(XS))
    assert np.all(np.abs(quad) <= 1e-6 * (1 + np.abs(fa.evaluate_array(f, np.array(XS)))))


def test_inversion_constants_methods_agree_when_finite():
    spec = _spec(1)
    f = fa.from_power(2, 0.6, 0.5) + fa.kernel_term(0.6, 0.5, 1.2, 0.3)
    a = op.inversion_constants(f, spec, "combined")
    b = op.inversion_constants(f, spec, "series")
    assert a == pytest.approx(b, rel=1e-12, abs=1e-14)


@pytest.mark.parametrize("n", [1, 2, 3])
def test_decomposition(n):
    spec = _spec(n)
    f = _domain_fn(spec)
    D = fa.nth_level_derivative(f, spec, strict=False)
    for x in XS:
        first, second = op.theorem31_decomposition(f, spec, x)
        Df = fa.evaluate(D, x)
        assert abs(first - second - Df) <= 1e-6 * (1 + abs(Df))


# reductions

def test_hilfer_metadata_matches_spec():
    a, b, g, d, t = 0.5, 0.4, 0.3, 0.2, 0.6
    spec = NthLevelSpec(a, b, g, d, (t * (1 - fa.exact(b)),), (t,))
    assert spec.operator_metadata() == op.hilfer_prabhakar_metadata(a, b, g, d, t)


@pytest.mark.parametrize("theta", [0, 0.5, 1])
def test_gamma_zero_is_hilfer_power_rule(theta):
    # Hilfer derivative of x^r: I^(theta(1-beta)) D I^((1-theta)(1-beta)) x^r
    b, r, x = 0.6, 1.5, 0.7
    spec = NthLevelSpec.hilfer(0.5, b, 0, 0.9, theta)
    got = fa.evaluate(fa.nth_level_derivative(fa.from_power(r, 0.5, 0.9), spec), x)
    assert rel(got, power_rule(r, -b, x)) < 1e-12


def test_rl_integral_nearly_nonintegrable():
    # t = h u^250 underflows on part of the substituted range
    r = -0.996
    assert rel(op.rl_integral(power_fn(r), 0.5, 0.3), power_rule(r, 0.5, 0.3)) < 1e-10
