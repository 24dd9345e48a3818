"""
Photon statistics and Klyshko's criterion
=========================================

Only even photon numbers are populated at first, so B(1) = 3 p1 p3 - 2 p2^2
starts at -2 p2^2 < 0.  The bath fills in the odd numbers and B(1) turns positive.
"""

import numpy as np

from catlab import CatState, ThermalChannel, coefficients, photon_distribution
from catlab import criteria

cat = CatState(2.0)

p = photon_distribution(cat, coefficients(ThermalChannel(100.0), 0.0))
print("p(n) at tau=0:", np.round(p[:8], 5))
p = photon_distribution(cat, coefficients(ThermalChannel(100.0), 0.002))
print("p(n) at tau=0.002:", np.round(p[:8], 5))

# a hotter bath destroys the signature sooner
for nbar in (1.0, 10.0, 100.0):
    print(f"nbar={nbar:5.0f}  tau_K={criteria.tau_klyshko(cat, ThermalChannel(nbar)).tau_star:.5f}")

# there is a best cat size for this witness
for alpha in (0.5, 1.0, 1.5, 2.0, 2.5, 3.0, 4.0):
    print(f"alpha={alpha}  tau_K={criteria.tau_klyshko(CatState(alpha), ThermalChannel(100.0)).tau_star:.5f}")

# higher-order B(n) never outlast B(1)
report = criteria.klyshko_subsumption_check(cat, ThermalChannel(100.0))
print({n: round(r.tau_star, 6) for n, r in report.thresholds.items()}, "holds:", report.holds)
