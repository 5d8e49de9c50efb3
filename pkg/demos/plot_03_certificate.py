"""
Checking the sufficient conditions
==================================

Two tiers. The dispersal bound compares diffusion with growth. The contraction
margins need a positive lower corner of the attracting region, which is
estimated from an ensemble of long runs.
"""

# %%
from lvpatch import RegionEstimate, check_contraction, check_dispersal_bound
from lvpatch import estimate_ultimate_bounds, example51_params

params = example51_params()
disp = check_dispersal_bound(params)
for q in disp.inequalities:
    print(f"{q.name:10s} lhs={q.lhs:.3f} rhs={q.rhs:.3f} margin={q.margin:.3f}")

# %%
# With the box [1, 2]^4 the margins are exact numbers.
unit = check_contraction(params, RegionEstimate.uniform(1.0, 2.0))
print("unit box:", [round(p, 12) for p in unit.margins], "eta =", unit.eta, "c =", unit.c)

# %%
# The empirical region: 16 seeded starting states, burn-in 100, observe to 300,
# widen by 5 percent.
region = estimate_ultimate_bounds(params, seed=42)
print("lower corner", region.lower.round(4), "upper corner", region.upper.round(4))
cond = check_contraction(params, region)
print("holds:", cond.holds, " eta =", round(cond.eta, 4), " c =", round(cond.c, 4))
