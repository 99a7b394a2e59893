"""
Evaluating three-parameter Mittag-Leffler functions
===================================================

The series sum_k (g)_k z^k / (k! Gamma(a k + b)) converges everywhere, but
on the negative axis the terms grow before they shrink and most digits cancel.
"""

import math

import numpy as np

from prabhakar.mlf import prabhakar_e, prabhakar_e_array, prabhakar_e_info

# a few familiar special cases
print("E_{1,1}(2)    =", prabhakar_e(1, 1, 1, 2.0), " exp(2) =", math.exp(2.0))
print("E_{2,1}(4)    =", prabhakar_e(2, 1, 1, 4.0), " cosh(2) =", math.cosh(2.0))
print("E_{1/2,1}(-1) =", prabhakar_e(0.5, 1, 1, -1.0), " e*erfc(1) =", math.e * math.erfc(1.0))

# %%
# Cancellation.  ``prabhakar_e_info`` also reports the number of terms and
# whether the sum had to be redone in extended precision.
for z in (-2.0, -10.0, -25.0):
    v, n, extended = prabhakar_e_info(0.9, 1.2, 1.5, z)
    print(f"z={z:6.1f}  value={v: .16e}  terms={n:3d}  extended={extended}")

# %%
# Vectorized evaluation over a grid, e.g. a relaxation curve t^(b-1) E_{a,b}(-t^a)
t = np.linspace(0.01, 5, 6)
a = 0.7
print(np.column_stack([t, t ** (a - 1) * prabhakar_e_array(a, a, 1.0, -t**a)]))

# %%
# A nonpositive integer upper parameter truncates the series to a polynomial
v, n, _ = prabhakar_e_info(0.6, 1.4, -2, 1.7)
print("terms used with gamma=-2:", n)
