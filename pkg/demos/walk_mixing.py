"""
Random walks started on an event
================================

Start a lazy walk uniformly on an event and watch the distance to uniform
decay.  Noise-sensitive events mix in o(n) steps.
"""

from noisesens import walk as wk
from noisesens.families import dictator, majority, parity

# %%
# Distance curve for three events on 11 bits.
for name, A in [("dictator", dictator(11)), ("majority", majority(11)), ("parity", parity(11))]:
    curve = wk.tv_curve(A, range(0, 41, 8))
    print(f"{name:9s}", " ".join(f"{v:.3f}" for v in curve))

# %%
# Mixing time W(A, 0.1) and the step count given by the L2 bound.
for name, A in [("dictator", dictator(11)), ("majority", majority(11)), ("parity", parity(11))]:
    res = wk.mixing_time(A, 0.1)
    print(f"{name:9s} W={res.t:3d}  L2 bound reaches 0.1 at t={res.l2_bound_t}")

# %%
# The squared distance never exceeds ||f_t - 1||_2^2.
print("(dist^2, L2^2) at t=5:", wk.l2_chain(majority(9), 5))
