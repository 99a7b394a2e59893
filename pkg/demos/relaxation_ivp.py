"""
A fractional relaxation problem
===============================

Solve D y = lam y + f for an nth-level Prabhakar derivative D, as a series in
lam, and check it three ways: the residual, a brute-force fixed-point
iteration, and the closed form through a bivariate Mittag-Leffler function.
"""

import numpy as np

from prabhakar import funcalg as fa
from prabhakar.levels import NthLevelSpec
from prabhakar.solvers import (
    IVPProblem, evaluate_ivp, evaluate_ivp_e2, ivp_initial_values, ivp_residual, picard_ivp, solve_ivp,
)

spec = NthLevelSpec(0.7, 0.6, 0.5, -0.4, (0.25,), (0.5,))
forcing = fa.from_power(1.0, spec.alpha, spec.delta)  # f(x) = x
p = IVPProblem(spec, lam=-0.3, forcing=forcing, initial_values=(0.8,))
sol = solve_ivp(p)
print("levels used:", sol.series_i_max, " initial value recovered:", ivp_initial_values(sol))

xs = np.array([0.25, 0.5, 1.0])
y = evaluate_ivp(sol, xs)
print("y        ", y)
print("residual ", [ivp_residual(sol, p, x) for x in xs])

# %%
# Ten fixed-point steps of y = y0 + lam E y + E f, every integral by quadrature
print("Picard   ", picard_ivp(sol, xs, iterations=10))

# %%
# The same solution summed in the other order, through E2 (slow, quadrature based)
print("E2 form  ", [evaluate_ivp_e2(sol, x) for x in xs])

# %%
# Classical limit: RL relaxation y = x^(b-1) E_{b,b}(lam x^b)
rl = NthLevelSpec(0.5, 0.8, 0, 0, (0,), (0,))
print("RL relaxation at x=1:", evaluate_ivp(solve_ivp(IVPProblem(rl, -1.0, None, (1.0,))), 1.0))
