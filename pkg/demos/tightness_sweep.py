"""
How tight are the redundancy bounds?
====================================

Fit targets with a growing number of encoding slots and record the best
max-abs residual.  The output is plot-ready CSV.
"""

import sys

import numpy as np

from qredundancy import fourier_rank, projection_distance, tightness_sweep
from qredundancy.fitting import bound_linear, write_sweep_csv

cos2 = lambda x: np.cos(2 * np.pi * x) ** 2
interval = (-0.5, 0.5)

# cos^2 has frequencies {0, +-2}: Fourier rank 1, so one slot with a = 2
# suffices.  With a = 1 the least-squares distance certifies failure.
r = fourier_rank(cos2).fourier_rank
print("Fourier rank", r, "-> bounds", [b.lower_bound_int for b in bound_linear(r)])
print("certified residual for a = (1):", projection_distance(cos2, interval, "linear", [1.0]))

rows, _ = tightness_sweep(cos2, interval, [1, 2, 3], "linear")
write_sweep_csv(rows, sys.stdout, timing=False)

# Capping frequencies below 2 forces two slots.
rows, _ = tightness_sweep(cos2, interval, [1, 2, 3], "linear", freq_cap=1.5)
write_sweep_csv(rows, sys.stdout, timing=False)

# %%
# The degree bound says a cubic needs three arcsine slots for an exact fit.
# Two slots already approximate it very closely: square-root factors near
# their branch points mimic the missing power with huge coefficients.
cubic = lambda x: x**3 - x
rows, fits = tightness_sweep(cubic, interval, [1, 2, 3], "arcsine")
write_sweep_csv(rows, sys.stdout, timing=False)
two = fits[1]
held_out = np.linspace(-0.49, 0.49, 101)
print("n=2 held-out error:", np.max(np.abs(two.predict(held_out) - cubic(held_out))))
print("n=2 largest coefficient:", max(abs(v) for v in two.coeffs.values()))
