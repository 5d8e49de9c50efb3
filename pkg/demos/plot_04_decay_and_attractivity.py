"""
Lyapunov decay and global attractivity
======================================

Solutions from different starting states merge. The log-distance ``V``
between two solutions shrinks exponentially. Its measured rate is compared
with the certified rate ``c``.
"""

# %%
from lvpatch import (attractivity_experiment, check_contraction, estimate_ultimate_bounds,
                     example51_params, verify_decay)

params = example51_params()
rep = attractivity_experiment(params, [(1, 1, 1, 1), (3, 2, 0.5, 1.5), (0.2, 0.4, 2, 3)],
                              t_end=300.0, eps=1e-3)
for p in rep.pairs:
    print(f"pair {p.i}-{p.j}: below 1e-3 from t = {p.time:.2f}, final gap {p.final:.1e}")

# %%
# Certified rate from the empirical region, then the envelope test on [100, 200].
c = check_contraction(params, estimate_ultimate_bounds(params, seed=42)).c
decay = verify_decay(params, (1, 1, 1, 1), (2, 0.5, 1.5, 0.8), 100.0, 200.0, c)
print(f"certified c = {c:.4f}")
print(f"fitted rate = {decay.rate:.4f}, envelope violations = {decay.violations}/{len(decay.t)}")
print(f"largest rate the samples actually support = {decay.max_envelope_rate():.4f}")

# %%
# The measured contraction is real but slower than certified, so the
# envelope is violated at this ``c``. Tightening ``c`` below the supported
# rate clears every violation.
safe = verify_decay(params, (1, 1, 1, 1), (2, 0.5, 1.5, 0.8), 100.0, 200.0, 0.09)
print("violations at c = 0.09:", safe.violations)
