"""
Estimating the Fourier rank from samples
========================================

The Hankel matrix built from 2N + 1 equispaced samples has rank equal to the
number of exponentials in the signal.  A rank certificate also requires that the
recovered nodes form a genuine Fourier sum, which rules out polynomials.
"""

import numpy as np

from qredundancy import fourier_rank
from qredundancy.fitting import bound_linear

targets = {
    "constant": lambda x: 0 * x + 1.5,
    "cos(2 pi 3 x + 0.5)": lambda x: np.cos(2 * np.pi * 3 * x + 0.5),
    "cos^2(2 pi x)": lambda x: np.cos(2 * np.pi * x) ** 2,
    "x": lambda x: x,
    "exp(x)": np.exp,
}

for name, h in targets.items():
    rep = fourier_rank(h, x0=0.0, eps=0.5)
    if rep.exceeded:
        print(f"{name:22s} exceeded (Hankel rank {rep.hankel_rank}, not a Fourier sum)")
    else:
        lo, sharp = bound_linear(rep.fourier_rank)
        print(f"{name:22s} rank {rep.fourier_rank}  frequencies {np.round(rep.frequencies, 6)}"
              f"  redundancy >= {lo.lower_bound_int} (sharp {sharp.lower_bound_int})")

# %%
# |sin(pi x)| is a pure cosine away from its kinks but not across them:
# the rank is a local quantity.
h = lambda x: np.abs(np.sin(np.pi * x))
print("|sin pi x| at 0.5:", fourier_rank(h, 0.5, 0.3).fourier_rank)
print("|sin pi x| at 0.0:", "exceeded" if fourier_rank(h, 0.0, 0.3).exceeded else "finite")

# %%
# Singular values make the cut visible: a trig polynomial of degree 3 has
# seven significant values, the identity keeps decaying to round-off.
for name, h in [("degree 3", lambda x: sum(np.cos(2 * x + 0.3) ** j for j in range(1, 4))), ("x", lambda x: x)]:
    sv = fourier_rank(h, 0.0, 3.0).singular_values
    print(name, np.array2string(sv[:9] / sv[0], precision=1))
