"""
Quasi-periodic coefficients
===========================

Every rate in the model is a constant plus a finite sum of sines and cosines.
Bounds over all time follow from the amplitude sums.
"""

# %%
# Build the growth rate of the first species in patch 1.
import math

import numpy as np

from lvpatch import QuasiPeriodicCoefficient as QPC
from lvpatch.coeffs import empirical_extrema, inf_bound, sup_bound

r1 = QPC.paired(5.0, 0.5, "sin")
print(r1)
print("r1(0) =", r1(0.0), " r1(pi/2) =", r1(math.pi / 2))

# %%
# The analytic infimum and supremum are the constant minus and plus the
# amplitude sum. A long dense sample comes close without crossing them.
lo, hi = empirical_extrema(r1, horizon=2000.0, step=0.01)
print(f"analytic [{inf_bound(r1)}, {sup_bound(r1)}]   sampled [{lo:.5f}, {hi:.5f}]")

# %%
# Coefficients round-trip through plain dictionaries, which is how scenario
# files store them. The token "sqrt2" stands for the irrational frequency.
entry = {"constant": 1.0, "terms": [{"amplitude": 0.2, "frequency": "sqrt2", "kind": "sin"},
                                   {"amplitude": 0.2, "frequency": 1, "kind": "sin"}]}
D2 = QPC.from_dict(entry)
t = np.linspace(0.0, 10.0, 5)
print("D2 on a grid:", np.round(D2(t), 4))
print("nonnegative for all t:", D2.is_nonnegative())
