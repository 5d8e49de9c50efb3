"""
Almost periods of the limit solution
====================================

With frequencies 1 and sqrt(2) nothing repeats exactly, but shifts of
``2 pi q`` nearly do whenever ``p/q`` approximates sqrt(2) well.
"""

# %%
import math

from lvpatch import almost_period_scan, example51_params, integrate
from lvpatch.almostperiod import convergents, predicted_shifts

print("convergents of sqrt(2):", [str(f) for f in convergents(math.sqrt(2), 6)])
print("predicted shifts in [150, 200]:",
      [(round(T, 3), round(d, 4)) for T, d in predicted_shifts(1.0, math.sqrt(2), (150, 200))])

# %%
# Integrate past the transient and scan shifts in [150, 200].
traj = integrate(example51_params(), [1, 1, 1, 1], 0.0, 350.0)
cands = almost_period_scan(traj, window=(100, 150), T_range=(150, 200), T_step=0.01, epsilon=0.2)
for c in cands[:3]:
    print(f"T = {c.shift:.2f}  defect = {c.defect:.4f}  accepted = {c.accepted}")
print(f"58 pi = {58 * math.pi:.2f}")
