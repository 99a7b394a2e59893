import math
import warnings

import numpy as np
import pytest

from prabhakar import funcalg as fa
from prabhakar.errors import InvalidParams, ModeDivergence, TruncationWarning
from prabhakar.levels import NthLevelSpec
from prabhakar.solvers import (
    HeatProblem, IVPProblem, evaluate_ivp, evaluate_ivp_e2, heat_mode_problem,
    hilfer_prabhakar_solution_metadata, ivp_derivative, ivp_initial_values, ivp_residual,
    picard_ivp, solve_heat, solve_ivp,
)

from oracles import mp_ml, mp_prabhakar, rel

XS10 = np.linspace(0.1, 1.0, 10)


def generic_spec():
    return NthLevelSpec(0.7, 0.6, 0.5, -0.4, (0.25,), (0.5,))


# IVP

def test_lambda_zero_is_initial_kernel():
    spec = generic_spec()
    sol = solve_ivp(IVPProblem(spec, 0.0, None, (1.5,)))
    nu = float(spec.nu)
    x = 0.6
    want = 1.5 * x ** (nu - 1) * float(mp_prabhakar(0.7, nu, float(spec.gamma_prime), -0.4 * x**0.7))
    assert rel(evaluate_ivp(sol, x), want) < 1e-13


@pytest.mark.parametrize("beta,lam", [(0.6, -1.0), (0.9, 2.0), (0.4, -1.0)])
def test_classical_ml_reduction(beta, lam):
    # RL relaxation: y = a0 x^(beta-1) E_{beta,beta}(lam x^beta)
    spec = NthLevelSpec(0.5, beta, 0, 0, (0,), (0,))
    sol = solve_ivp(IVPProblem(spec, lam, None, (1.3,)), i_max=200)
    for x in XS10:
        want = 1.3 * x ** (beta - 1) * float(mp_prabhakar(beta, beta, 1, lam * x**beta))
        assert rel(evaluate_ivp(sol, x), want) < 1e-8


@pytest.mark.parametrize("kind", ["rl", "prabhakar", "constants"])
def test_generic_residual_and_initial_values(kind):
    spec = generic_spec()
    f = fa.from_power(1.0, 0.7, -0.4)
    p = IVPProblem(spec, -1.2, f, (0.8,), kind)
    sol = solve_ivp(p)
    for x in XS10:
        assert ivp_residual(sol, p, x) <= 1e-10
    assert ivp_initial_values(sol) == pytest.approx([0.8], rel=1e-12)


def test_forcing_only():
    spec = generic_spec()
    p = IVPProblem(spec, 0.5, fa.from_power(2.0, 0.7, -0.4), ())
    sol = solve_ivp(p)
    assert sol.c_k[0] == pytest.approx(0.0, abs=1e-14)
    assert max(ivp_residual(sol, p, x) for x in XS10) <= 1e-10


@pytest.mark.filterwarnings("ignore::prabhakar.errors.TruncationWarning")
def test_i_max_doubling_converges():
    spec = generic_spec()
    p = IVPProblem(spec, -2.0, None, (1.0,))
    a = solve_ivp(p, 40)
    b = solve_ivp(p, 80)
    assert abs(evaluate_ivp(a, 1.0) - evaluate_ivp(b, 1.0)) < 1e-12


def test_truncation_warning():
    p = IVPProblem(generic_spec(), -30.0, None, (1.0,))
    with pytest.warns(TruncationWarning):
        solve_ivp(p, 3)


def test_second_level_problem():
    spec = NthLevelSpec(0.8, 1.4, 0.3, 0.5, (0.1, 0.2), (0.3, 0.7))
    p = IVPProblem(spec, -0.7, fa.from_power(1.0, 0.8, 0.5), (0.5, -0.2), "constants")
    sol = solve_ivp(p)
    assert max(ivp_residual(sol, p, x) for x in XS10) <= 1e-10
    assert ivp_initial_values(sol) == pytest.approx([0.5, -0.2], rel=1e-12)


def test_e2_form_agrees():
    spec = NthLevelSpec(0.7, 0.6, 0.5, -0.4, (0.25,), (0.5,))
    p = IVPProblem(spec, -1.2, fa.from_power(1.0, 0.7, -0.4), (0.8,))
    sol = solve_ivp(p)
    for x in (0.25, 0.5, 1.0):
        y = evaluate_ivp(sol, x)
        assert abs(evaluate_ivp_e2(sol, x) - y) <= 1e-6 * (1 + abs(y))


def test_e2_form_needs_positive_exponents():
    spec = NthLevelSpec(0.7, 0.6, 0.0, -0.4, (0.25,), (0.5,))
    sol = solve_ivp(IVPProblem(spec, -1.2, None, (0.8,)))
    with pytest.raises(InvalidParams):
        evaluate_ivp_e2(sol, 0.5)


def test_picard_oracle():
    spec = generic_spec()
    p = IVPProblem(spec, -1.2, fa.from_power(1.0, 0.7, -0.4), (0.8,))
    sol = solve_ivp(p)
    xs = np.array([0.25, 0.5, 1.0])
    pic = picard_ivp(sol, xs, iterations=10)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", TruncationWarning)
        trunc = solve_ivp(p, 10)
    want = evaluate_ivp(trunc, xs)
    assert np.all(np.abs(pic - want) <= 1e-5 * (1 + np.abs(want)))


def test_picard_converged_for_small_lambda():
    # ten steps are enough once |lam| x^beta is small
    p = IVPProblem(generic_spec(), -0.3, fa.from_power(1.0, 0.7, -0.4), (0.8,))
    sol = solve_ivp(p)
    xs = np.array([0.25, 0.5, 1.0])
    full = evaluate_ivp(sol, xs)
    assert np.all(np.abs(picard_ivp(sol, xs) - full) <= 1e-5 * (1 + np.abs(full)))


def test_ivp_validation():
    spec = generic_spec()
    with pytest.raises(InvalidParams):
        IVPProblem(spec, math.inf)
    with pytest.raises(InvalidParams):
        IVPProblem(spec, 1.0, initial_kind="bogus")
    with pytest.raises(InvalidParams):
        IVPProblem(spec, 1.0, initial_values=(1.0, 2.0))
    with pytest.raises(InvalidParams):
        solve_ivp(IVPProblem(spec, 1.0), 0)


def test_ivp_dict_round_trip():
    p = IVPProblem(generic_spec(), -1.2, fa.from_power(1.0, 0.7, -0.4), (0.8,), "prabhakar", 2.0)
    q = IVPProblem.from_dict(p.to_dict())
    assert q.to_dict() == p.to_dict()


def test_derivative_is_rhs():
    spec = generic_spec()
    p = IVPProblem(spec, 0.9, None, (1.0,))
    sol = solve_ivp(p)
    Dy = ivp_derivative(sol)
    assert fa.evaluate(Dy, 0.7) == pytest.approx(0.9 * evaluate_ivp(sol, 0.7), rel=1e-10)


def test_hilfer_solution_metadata():
    assert hilfer_prabhakar_solution_metadata(0.5, 0.6, 0.7, 0.3, 0.4)["mismatches"] == 0


# heat

def caputo_spec(beta=0.8, gamma=0.0):
    return NthLevelSpec(0.5, beta, gamma, 0.0, (1 - beta,), (1,))


def test_zero_profile():
    p = HeatProblem(caputo_spec(), 0.1, 10.0, 32, np.zeros(32))
    field = solve_heat(p, [0.5])
    assert np.all(field.values == 0) and field.modes_used == 0


def test_gamma_zero_mode_matches_ml():
    # Caputo case: u = cos(omega x) E_beta(-k omega^2 t^beta)
    beta, kt, L, m = 0.8, 0.1, 20.0, 5
    p = HeatProblem.from_profile(caputo_spec(beta), kt, L, 64, "cosine", mode=m)
    times = np.array([0.25, 0.5, 1.0, 2.0])
    field = solve_heat(p, times)
    w = math.pi * m / L
    assert field.cutoff_frequency == pytest.approx(w)
    for j, t in enumerate(times):
        want = np.cos(w * p.grid) * float(mp_ml(beta, 1, -kt * w * w * t**beta))
        assert np.max(np.abs(field.values[:, j] - want)) < 1e-6


def test_gaussian_classical_diffusion():
    # beta = 1: Caputo of order one is d/dt and the Gaussian spreads exactly
    spec = NthLevelSpec(0.5, 1.0, 0.0, 0.0, (0.0,), (1,))
    kt, s = 0.1, 1.0
    p = HeatProblem.from_profile(spec, kt, 20.0, 128, "gaussian", sigma=s)
    t = 1.0
    field = solve_heat(p, [t])
    var = s * s + 2 * kt * t
    want = s / math.sqrt(var) * np.exp(-p.grid**2 / (2 * var))
    assert np.max(np.abs(field.values[:, 0] - want)) < 1e-10


def test_mode_residual():
    spec = NthLevelSpec(0.6, 0.7, 0.4, -0.3, (0.2,), (0.5,))
    mp = heat_mode_problem(spec, 0.1, 0.8)
    sol = solve_ivp(mp)
    for t in (0.25, 0.5, 1.0):
        assert ivp_residual(sol, mp, t) <= 1e-5


def test_grid_doubling():
    spec = NthLevelSpec(0.6, 0.7, 0.4, -0.3, (0.2,), (0.5,))
    times = [0.5, 1.0]
    a = solve_heat(HeatProblem.from_profile(spec, 0.1, 20.0, 128, "gaussian"), times)
    b = solve_heat(HeatProblem.from_profile(spec, 0.1, 20.0, 256, "gaussian"), times)
    interior = np.abs(a.grid) < 10
    diff = np.abs(a.values - b.values[::2])[interior]
    assert diff.max() <= 1e-5


def test_mode_divergence():
    p = HeatProblem.from_profile(caputo_spec(0.5), 50.0, 1.0, 64, "cosine", mode=20)
    with pytest.raises(ModeDivergence) as e:
        solve_heat(p, [5.0], i_max=10)
    assert e.value.omega > 0


@pytest.mark.parametrize("kw", [dict(k_tilde=0), dict(L=-1), dict(N=48), dict(u0=np.ones(32))])
def test_heat_validation(kw):
    args = dict(spec=caputo_spec(), k_tilde=0.1, L=10.0, N=32,
                u0=np.exp(-np.linspace(-10, 10, 32, endpoint=False) ** 2))
    args.update(kw)
    if "N" in kw:
        args["u0"] = np.zeros(kw["N"])
    with pytest.raises(InvalidParams):
        HeatProblem(**args)
