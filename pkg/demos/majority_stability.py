"""
Majorities: correlation and noise stability
===========================================

Majority is the most noise-stable monotone event.  Here we measure how
often a weighted majority changes its mind under noise.
"""

import numpy as np

from noisesens import majority as mj
from noisesens.families import majority, tribes

# %%
# Correlation with sub-majorities, and the maximal correlation Lambda.
f = majority(5)
print("E(f M_[5]) =", mj.correlation_with_majority(f, 0b11111).value)
print("Lambda(maj5) =", mj.lambda_(f))
print("Lambda(tribes 3x3) =", mj.lambda_(tribes(3, 3)))

# %%
# Stability deficit P[M xor N_eps M] for uniform weights.  For large n it
# scales like sqrt(eps).
eps_grid = np.array([1e-4, 1e-3, 1e-2, 0.1])
wm = mj.WeightedMajority.uniform(10001)
vals = [mj.stability_deficit(wm, eps=e, samples=100_000, seed=1).value for e in eps_grid]
for e, v in zip(eps_grid, vals):
    print(f"eps={e:g}  deficit={v:.4f}  deficit/sqrt(eps)={v / np.sqrt(e):.3f}")
slope = np.polyfit(np.log(eps_grid), np.log(vals), 1)[0]
print("log-log slope:", round(slope, 3))

# %%
# The inner product of w with the influence vector of sign(w . x) is 2 E|w . x|.
w = np.random.default_rng(0).random(10)
w /= np.linalg.norm(w)
print("(<w, I^w>, E|f|) =", mj.influence_inner_product(w))
print("(E f^4, 3|w|_2^4 - 2|w|_4^4) =", mj.moment_check(w))
