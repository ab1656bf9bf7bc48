"""Partition one day into buckets, then perturb the bucket means.

Bins with similar values share a bucket; sharp jumps isolate their
endpoints. The thresholds themselves are noisy, paid for from a q share of
the day's budget, and the rest of the budget perturbs the bucket means.
"""

import numpy as np

from redpoctor import NoiseSource, PartitionThresholds, bucket_layout, noisy_thresholds, partition_bounds, perturb_means
from redpoctor.perturbation import DEFAULT_ALPHA

day = np.array([62, 63, 61, 64, 95, 97, 96, 70, 71, 69, 70, 72], dtype=float)
rng = NoiseSource(3)
eps_i, q = 40.0, 0.2  # a generous budget keeps the noisy thresholds readable

t_d, t_r = noisy_thresholds(PartitionThresholds(t_d=30.0, t_r=15.0, t_s=4), q * eps_i, DEFAULT_ALPHA, rng)
print(f"noisy thresholds: t_d={t_d:.2f} t_r={t_r:.2f}")

exact = partition_bounds(day.tolist(), 30.0, 15.0, 4)
print(f"buckets with exact thresholds: {exact}")

bounds = partition_bounds(day.tolist(), t_d, t_r, 4)
sizes, means = bucket_layout(day, bounds)
print(f"buckets with noisy thresholds: {bounds}")
released = perturb_means(sizes, means, DEFAULT_ALPHA, (1 - q) * eps_i, rng, day=1, bin_width_minutes=10)
print("raw      ", day.tolist())
print("released ", np.round(released.bins, 1).tolist())
