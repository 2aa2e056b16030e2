"""
Fourier-Walsh coefficients and influences
=========================================

Build a few small Boolean functions, look at their spectra and check the
influence identities by hand.
"""

import numpy as np

from noisesens import influence_profile, monotonize, shift, transform
from noisesens.families import majority, parity, tribes

# %%
# Majority of three: weight 1/2 on the empty set, -1/4 on each singleton
# and 1/4 on the top set.
f = majority(3)
s = transform(f)
for mask, c in enumerate(s.coeffs):
    print(f"S={mask:03b}  coeff={c:+.3f}")

# %%
# Level weights add up to E[f^2] (Parseval).
print("level weights", s.level_weights(), "sum", s.level_weights().sum(), "E f^2", np.mean(f.table**2))

# %%
# Influences: every variable of maj3 is pivotal half the time.
prof = influence_profile(f)
print("I_k", prof.per_var, "I", prof.total_I, "II", prof.total_II)

# for an indicator, I_k = 4 * (weight of sets containing k)
k_in = (np.arange(8) & 1) == 1
print("4 * sum_{S ni 1} f(S)^2 =", 4 * np.sum(s.coeffs[k_in] ** 2))

# %%
# Tribes with two tribes of two: each variable has influence 3/8.
print("tribes(2,2) I_k", influence_profile(tribes(2, 2)).per_var)

# %%
# Shifting pushes a function towards monotone without raising influences.
g = parity(3)
h = monotonize(g)
print("parity I", influence_profile(g).total_I, "after monotonize", influence_profile(h).total_I)
print("shift on x_1:", shift(g, 1).table)
