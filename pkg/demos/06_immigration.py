"""Immigration processes and the E[log+ Y] dichotomies.

With bounded immigration, a supercritical process settles onto Z_n ~ W m^n
and a subcritical one converges in distribution.  The log-pareto family
P[Y >= k] = 1/(1 + log k) has E[log+ Y] = infinity, and the same processes
then outgrow every exponential or diverge in probability.
"""

import numpy as np

import bplab as bp

rng = np.random.default_rng(3)

sup = bp.make_finite([0.25, 0.0, 0.75])
sub = bp.make_finite([0.75, 0.0, 0.25])
bounded = bp.make_truncated_poisson(1.0, 8)
heavy = bp.heavy_immigration_sampler("log-pareto")

print("-- the log-pareto immigration law ----------------------------------")
draws = heavy.sample(rng, 10**5)
print(f"P[Y = 1] ~ {np.mean(draws == 1):.4f}  "
      f"(exact {1 - 1/(1 + np.log(2)):.4f})")
print(f"P[Y >= 100] ~ {np.mean(draws >= 100):.4f}  "
      f"(exact {1/(1 + np.log(100)):.4f})")
print(f"largest draw: {draws.max():.3e}")

print()
print("-- supercritical + bounded immigration: W settles ------------------")
batch = bp.simulate_immigrations(sup, bounded, 80, 1000, rng, cap=1e300)
w40 = batch.z[:, 40] / sup.mean**40
w80 = batch.z[:, 80] / sup.mean**80
rel = np.abs(w80 - w40) / np.maximum(w40, 1e-300)
print(f"paths with |W_80/W_40 - 1| < 1%: {np.mean(rel < 0.01):.3f}")

print()
print("-- subcritical + bounded immigration: Z_n stabilizes ---------------")
batch = bp.simulate_immigrations(sub, bounded, 100, 10**4, rng)
width = int(batch.z.max()) + 1
p50 = np.bincount(batch.z[:, 50].astype(int), minlength=width) / 10**4
p100 = np.bincount(batch.z[:, 100].astype(int), minlength=width) / 10**4
print(f"TV(Z_50, Z_100) = {0.5 * np.abs(p50 - p100).sum():.4f}")

print()
print("-- subcritical + log-pareto immigration: divergence ----------------")
heavy_big = bp.simulate.LogParetoImmigration(cap_value=1e300)
batch = bp.simulate_immigrations(sub, heavy_big, 100, 4000, rng, cap=1e300)
m50 = np.median(batch.z[:, 50])
m100 = np.median(batch.z[:, 100])
print(f"median Z_50 = {m50:.3e}   median Z_100 = {m100:.3e}")
print("(the median keeps squaring: fresh immigration spikes dominate)")
