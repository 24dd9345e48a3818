"""
Cross-checking against the master equation
===========================================

The analytic results come from a closed-form characteristic function.  Here
the same evolution is done the slow way: a truncated density matrix stepped
through the thermal master equation.
"""

import numpy as np

from catlab import CatState, ThermalChannel, coefficients, char_normal, photon_probs
from catlab import fock

cat, bath, tau = CatState(2.0), ThermalChannel(10.0), 0.01

dim = fock.cutoff_for(cat.alpha, bath.nbar, tau)
rho = fock.evolve(fock.cat_density_matrix(cat, dim), bath, tau)
print(f"basis size {dim}, trace lost {1 - rho.trace:.1e}, smallest eigenvalue {rho.min_eigenvalue():.1e}")

co = coefficients(bath, tau)
dp = np.abs(fock.oracle_photon_probs(rho) - photon_probs(cat, co, dim - 1)).max()
print(f"largest photon-probability difference {dp:.1e}")

for xi in (0.5, 1.0, 0.5 + 0.5j):
    print(xi, fock.oracle_char_normal(rho, xi).real, char_normal(cat, co, xi))

# the exact propagator agrees with Runge-Kutta
exact = fock.evolve(fock.cat_density_matrix(cat, dim), bath, tau, method="expm")
print("rk4 vs expm:", np.abs(exact.elements - rho.elements).max())
