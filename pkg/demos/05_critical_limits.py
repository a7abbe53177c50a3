"""Critical limit laws: Yaglom's exponential and the Harris decomposition.

Conditioned on survival, Z_n/n approaches an exponential law with mean
sigma^2/2.  Under the size-biased measure, Z_n/n approaches the sum of two
such exponentials, and the proof's bookkeeping identifies them as the
normalized counts left and right of the spine -- which is directly
observable in the simulator.
"""

import numpy as np

import bplab as bp
from bplab import stats

rng = np.random.default_rng(11)

print("-- Yaglom's law on a lattice-free critical law ---------------------")
geo = bp.make_geometric(0.5)          # sigma^2 = 2, limit Exp(mean 1)
n = 100
values, attempts = bp.sample_conditioned_batch(geo, n, 5000, rng)
scaled = values / n
sample = stats.EmpiricalSample.from_values(scaled, sort=True)
ks = stats.ks_statistic(sample, stats.exponential_cdf(geo.variance / 2))
print(f"{len(values)} survivors from {attempts} attempts "
      f"(rate ~ {len(values)/attempts:.4f})")
print(f"mean Z_n/n = {scaled.mean():.4f}  (limit {geo.variance / 2:.1f})")
print(f"KS vs Exp(mean 1) = {ks:.4f}")

print()
print("-- Harris decomposition along the spine ----------------------------")
crit = bp.make_finite([0.5, 0.0, 0.5])   # sigma^2 = 1
n, reps = 500, 5000
batch = bp.simulate_spines(crit, n, reps, rng)
theta = crit.variance / 2
for label, arr, ref in (
    ("z/n vs Gamma(2)", batch.z[:, n] / n, stats.gamma2_cdf(theta)),
    ("left/n vs Exp", batch.left[:, n] / n, stats.exponential_cdf(theta)),
    ("right/n vs Exp", batch.right[:, n] / n, stats.exponential_cdf(theta)),
):
    s = stats.EmpiricalSample.from_values(arr, sort=True)
    print(f"{label:18s} mean={arr.mean():.4f}  KS={stats.ks_statistic(s, ref):.4f}")
