"""
A gallery of families
=====================

Tribes, recursive majority of three and runs, with their influences.
"""

import math

from noisesens import influence_profile
from noisesens import families as fam
from noisesens.majority import exact_deficit

# %%
# Tribes: the parameters are chosen so that P[f = 1] is close to 1/2.
for n in (8, 12, 16, 20):
    t, s = fam.tribes_params(n)
    f = fam.tribes(t, s, n)
    print(f"n={n:2d} t={t} s={s} P[f=1]={f.mean():.3f} I_k={fam.tribes_influence(t, s):.4f} "
          f"II={influence_profile(f).total_II:.4f}")

# %%
# Recursive majority: each leaf is pivotal with probability 2^-depth,
# which is n^(-log 2 / log 3).
for depth in range(1, 7):
    n = 3**depth
    ik = fam.recursive_majority3_influence(depth)
    print(f"depth={depth} n={n:4d} I_k={ik:.5f} I_k n^(log2/log3)={ik * n ** (math.log(2) / math.log(3)):.3f}")

# %%
# A single leaf flip at rate p switches maj3 with probability about 3p/2.
for p in (1e-2, 1e-3, 1e-4):
    print(f"p={p:g}  P[switch]/p = {exact_deficit(fam.majority(3), p) / p:.5f}")

# %%
# Runs: the event "more runs than the median" is a majority of the
# boundary bits x_i xor x_(i+1).
n = 9
thr = fam.runs_median_threshold(n)
f = fam.runs(n)
print(f"runs n={n}: threshold={thr} P={f.mean():.4f} I={influence_profile(f).total_I:.4f}")
