"""
Arcsine encoding and sc-monomials
=================================

With eta_j = arcsin(a_j x + b_j) / (2 pi) the circuit output becomes a linear
combination of products of s_j = a_j x + b_j and c_j = sqrt(1 - s_j^2).  The
dictionary has 3^n members but its span is smaller: all s_j are affine in x,
so products of s-factors only reach polynomials.
"""

import numpy as np

from qredundancy import ScDictionary, sc_dimension, sc_project
from qredundancy.arcsine import polynomial_degree
from qredundancy.fitting import bound_degree

d = ScDictionary([1.0, np.sqrt(2)], [0.1, -0.2])
print("monomials:", d.monomials)
print("valid on", d.common_interval)
print("numerical dimension:", sc_dimension(d, 0.0, 0.4), "of", 3**d.n)

# Equal slots collapse much further: 2n + 1.
for n in (2, 3):
    print(f"equal slots n={n}:", sc_dimension(ScDictionary(np.ones(n), np.zeros(n)), 0.0, 0.5))

# %%
# Projection onto a single slot: x and sqrt(1 - x^2) lie in the span, sin(4x)
# does not.
one = ScDictionary([1.0], [0.0])
for name, h in [("x", lambda x: x), ("sqrt(1-x^2)", lambda x: np.sqrt(1 - x**2)), ("sin 4x", lambda x: np.sin(4 * x))]:
    print(f"{name:12s} residual {sc_project(h, one, 0.0, 0.5).residual:.2e}")

# %%
# An analytic target that is exactly representable must be a polynomial, and
# its degree bounds the number of slots from below.
cubic = lambda x: x**3 - x
deg = polynomial_degree(cubic)
print("x^3 - x: degree", deg, "-> at least", bound_degree(deg).lower_bound_int, "slots for an exact fit")
print("sin: polynomial degree", polynomial_degree(np.sin))
