"""
Low-variance resampling
=======================

A single random offset drives an evenly spaced comb over the cumulative
weights, so copy counts never stray more than one from ``n * w``.
"""

# %%
import numpy as np

from se3pf.particle_filter import ParticleSet, comb_indices, effective_sample_size, low_variance_resample

w = np.array([0.05, 0.4, 0.15, 0.3, 0.1])
print("ESS:", effective_sample_size(w))

# %%
# Sweep the offset and tally copies per particle.
n = len(w)
offsets = (np.arange(100) + 0.5) / (100 * n)
counts = np.stack([np.bincount(row, minlength=n) for row in comb_indices(w, offsets)])
print("n * w:    ", n * w)
print("min count:", counts.min(axis=0))
print("max count:", counts.max(axis=0))

# %%
# The resampler itself copies poses and resets weights to uniform.
rng = np.random.default_rng(0)
ps = ParticleSet(np.repeat(np.eye(3)[None], n, 0), np.arange(n * 3.0).reshape(n, 3), w)
out = low_variance_resample(ps, rng)
print(out.translations[:, 0] / 3, out.weights)
