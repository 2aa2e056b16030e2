"""
Noise operator, VAR and the sensitivity gauge
==============================================

How much does knowing x tell us about f at a noisy copy of x?
"""

import numpy as np

from noisesens import noise as nz
from noisesens import transform
from noisesens.families import dictator, majority, parity, tribes, tribes_params

# %%
# VAR(f, eps) shrinks level k by (1 - 2 eps)^(2k).  Parity lives on the top
# level, so it loses everything fastest.
eps_grid = np.linspace(0, 0.5, 6)
for name, f in [("dictator", dictator(7)), ("majority", majority(7)), ("parity", parity(7))]:
    s = transform(f)
    print(f"{name:9s}", " ".join(f"{nz.var_noise(s, e):.4f}" for e in eps_grid))

# %%
# The gauge phi sits between VAR/2 and VAR^(1/3); for a dictator it is 1/2 - eps.
for eps in (0.05, 0.2, 0.4):
    g = nz.gauge_phi(dictator(4), eps)
    print(f"eps={eps}: phi={g.phi:.4f}  VAR/2={g.var_noise / 2:.4f}  VAR^(1/3)={g.var_noise ** (1 / 3):.4f}")

n = 12
t, s = tribes_params(n)
g = nz.gauge_phi(tribes(t, s, n), 0.1)
print(f"tribes n={n}: phi={g.phi:.4f} VAR={g.var_noise:.4f}")

# %%
# Flipping exactly q bits instead: parity stays perfectly predictable,
# VAR~ = 1/4 for every q.
sp = transform(parity(8))
print("parity fixed-size VAR:", [nz.var_fixed(sp, q) for q in range(0, 9, 2)])
print("c(10,1,k) =", [round(nz.fixed_noise_coeff(10, 1, k), 3) for k in range(11)])

# %%
# Two-stage noise with the three-point first stage.
z = nz.z_general(transform(majority(5)), nz.three_point_zetas(5, 0.2))
print("Z(maj5, three-point 0.2) =", z)
