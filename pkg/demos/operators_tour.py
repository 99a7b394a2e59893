"""
Prabhakar operators on ML-term series
=====================================

Functions of the form sum c x^(mu-1) E^g_{a,mu}(d x^a) are closed under
Prabhakar integrals and nth-level derivatives, so those operators act on
exact term lists.  The quadrature routines compute the same things without
looking at that structure.
"""

import numpy as np

from prabhakar import funcalg as fa
from prabhakar.levels import NthLevelSpec
from prabhakar.mlf import PrabhakarParams
from prabhakar.operators import (
    SampledFn, first_level_power_derivative, inversion_residual, nth_level_derivative_quad,
    prabhakar_integral_quad, theorem31_decomposition,
)

alpha, delta = 0.5, 0.7
f = fa.from_power(2, alpha, delta)  # x^2 written as a single term
print("x^2 as a series:", f.to_json())

# %%
# One Prabhakar integral, exactly and by quadrature
g = fa.prabhakar_integrate(f, 0.8, 0.3)
xs = np.array([0.25, 0.5, 1.0])
quad = prabhakar_integral_quad(SampledFn.from_series(f), PrabhakarParams(alpha, 0.8, 0.3, delta), xs)
print("exact     ", fa.evaluate_array(g, xs))
print("quadrature", quad)

# %%
# Integrals compose by adding orders and upper parameters
twice = fa.prabhakar_integrate(fa.prabhakar_integrate(f, 0.3, 1.0), 0.5, -0.7)
print("same term list:", twice == fa.prabhakar_integrate(f, fa.exact(0.8), fa.exact(0.3)))

# %%
# A first-level derivative of x^r in three ways
spec = NthLevelSpec(alpha, 0.4, 0.8, delta, (0.3,), (0.6,))
D = fa.nth_level_derivative(f, spec)
for x in xs:
    print(f"x={x:4.2f}  closed form {first_level_power_derivative(2, spec, x): .12f}"
          f"  algebra {fa.evaluate(D, x): .12f}  quadrature {nth_level_derivative_quad(f, spec, x): .12f}")

# %%
# A second-level operator: the inverse integral recovers f up to initial-value kernels,
# and the derivative splits into an RL-type part minus those kernels
spec2 = NthLevelSpec(alpha, 1.2, 0.8, delta, (0.2, 0.3), (0.5, 0.7))
h = fa.MLSeries(alpha, delta, [fa.MLTerm(1.0, spec2.nu, 0.4), fa.MLTerm(0.5, spec2.nu + 1, -1.0)])
for x in xs:
    first, second = theorem31_decomposition(h, spec2, x)
    print(f"x={x:4.2f}  inversion residual {inversion_residual(h, spec2, x): .1e}"
          f"  D h = {first - second: .12f}")
