"""
Fourier spectrum of a small circuit
===================================

Every input rotation generated by a Pauli string over two contributes the
frequencies -1, 0, +1, so the expectation value is a trigonometric polynomial
whose spectrum sits on the 3^n grid.
"""

import numpy as np

from qredundancy import extract_spectrum, frequency_set, project_univariate, to_trig_form
from qredundancy.pqc import Encoding, evaluate, evaluate_encoded, random_circuit

# Two input slots on two qubits, interleaved with Haar-random two-qubit gates.
circuit = random_circuit(np.random.default_rng(7), n_qubits=2, n_inputs=2)

spec = extract_spectrum(circuit)
print("nonzero coefficients:")
for w, c in spec.items():
    if abs(c) > 1e-10:
        print(f"  w={tuple(int(v) for v in w)}  {c.real:+.4f}{c.imag:+.4f}i")

# The same function written in cos/sin monomials.
for key, v in to_trig_form(spec).items():
    if abs(v) > 1e-10:
        print(" * ".join(key), f"{v:+.4f}")

# Reconstruction from 9 grid samples is exact everywhere.
eta = np.array([0.123, -0.456])
print("grid reconstruction error:", abs(spec(eta) - evaluate(circuit, eta)))

# %%
# Encoding a single input x along the line eta = a x + b merges frequencies
# w.a that coincide.  With a = (1, 1) the nine points collapse to five.
a, b = [1, 1], [0.0, 0.1]
fs = frequency_set(a)
print("K_a =", fs.values, "spread", fs.spread)

h = project_univariate(spec, a, b)
print("univariate |alpha_k|:", {k: round(abs(v), 4) for k, v in h.terms.items()})
x = 0.37
print("projection error:", abs(h(x) - evaluate_encoded(circuit, Encoding("identity", a, b), [], x)))

# A generic direction keeps all nine frequencies apart.
print("spread of (1, sqrt 2):", frequency_set([1.0, np.sqrt(2)]).spread)
