"""
Crossing a square of bond percolation
=====================================

Critical bond percolation on the (m+1) x m rectangle crosses with
probability exactly 1/2, and the crossing event forgets itself under a
little noise once m is large.
"""

import numpy as np

from noisesens import percolation as pc

# %%
# Crossing probability.
print("m=1 exact:", pc.estimate_crossing(pc.build_grid(1), exact=True).value)
for m in (8, 16, 32):
    est = pc.estimate_crossing(pc.build_grid(m), 40_000, seed=m)
    print(f"m={m:2d} P[C] = {est.value:.4f} +- {est.stderr:.4f}")

# %%
# Covariance of the crossing at x and at a noisy copy: it shrinks with m.
for m in (8, 16, 32):
    rep = pc.estimate_noise_sensitivity(pc.build_grid(m), 0.2, outer=20_000, seed=m)
    print(f"m={m:2d} cov = {rep.covariance:.4f} +- {rep.covariance_stderr:.4f}")

# %%
# The exploration only looks at a shrinking fraction of the right half.
for m in (8, 16, 32):
    v = pc.visited_fraction(pc.build_grid(m), samples=2000, seed=m)
    print(f"m={m:2d} |K & VISITED| / |K| = {v.value:.3f}")

# %%
# Dynamical percolation: each edge rerandomises at rate 1; the crossing
# state switches more and more often in [0, 1] as m grows.
for m in (8, 16, 32):
    counts = pc.dynamical_counts(pc.build_grid(m), 100, seed=m)
    print(f"m={m:2d} mean switches = {counts.mean():.2f}")

# %%
# A configuration can be stored as hex and read back.
g = pc.build_grid(3)
cfg = np.random.default_rng(3).random(g.edge_count) < 0.5
text = pc.config_to_hex(g, cfg)
print(text, "crossing:", pc.has_crossing(*pc.config_from_hex(text)))
