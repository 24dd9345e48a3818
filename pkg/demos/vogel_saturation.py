"""
Vogel's criterion and its large-amplitude limit
===============================================

The normally ordered characteristic function of a classical state never
exceeds 1.  For the cat it does, on a band of u values that closes at tau_V.
Bigger cats keep the band open longer, up to the Wigner time.
"""

import numpy as np

from catlab import CatState, ThermalChannel, coefficients, char_normal
from catlab import criteria
from catlab.cli import contour_points

bath = ThermalChannel(100.0)
cat = CatState(2.0)

# Phi_t(u, 0) along the real axis at a few times
u = np.linspace(0, 12, 7)
for tau in (0.0005, 0.0015, 0.0030):
    vals = char_normal(cat, coefficients(bath, tau), u)
    print(f"tau={tau:.4f}", np.round(vals, 4))

# the band where Phi > 1, as (tau, u, branch) rows
for row in contour_points(cat, bath, np.linspace(0.0004, 0.0022, 4)):
    print("contour", row)

# tau_V grows with alpha and saturates at the Wigner threshold
tau_w = criteria.tau_wigner_negativity(bath)
for alpha in (1, 2, 4, 10):
    tau_v = criteria.tau_vogel(CatState(float(alpha)), bath).tau_star
    print(f"alpha={alpha:2d}  tau_V={tau_v:.6f}  tau_V/tau_W={tau_v / tau_w:.4f}")

# second order keeps witnessing a little longer than first order
print("second order:", criteria.tau_vogel_second_order(cat, bath).tau_star)
