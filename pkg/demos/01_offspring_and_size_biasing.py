"""Offspring laws and their size-biased companions.

Every law knows its exact mean, variance, and E[L log+ L]; the heavy-tailed
family is the one whose untruncated E[L log+ L] diverges, which is what
separates mean behavior from typical behavior in the classical theorems.
"""

import numpy as np

import bplab as bp

rng = np.random.default_rng(1)

print("-- exact moments ------------------------------------------------")
for desc, label in [
    ([0.25, 0.0, 0.75], "supercritical binary-ish"),
    ([0.5, 0.0, 0.5], "critical binary"),
    ([0.75, 0.0, 0.25], "subcritical"),
]:
    d = bp.make_finite(desc)
    m, var, llogl = bp.moments(d)
    print(f"{label:24s} pmf={desc}  m={m:.3f}  var={var:.3f}  "
          f"E[L log+ L]={llogl:.4f}")

geo = bp.make_geometric(0.5)
print(f"{'geometric(1/2)':24s} m={geo.mean:.3f}  var={geo.variance:.3f}")

heavy = bp.make_heavy_tail(0.8, 10**6)
print(f"{'heavy tail (a=0.8)':24s} m={heavy.mean:.4f}  "
      f"E[L log+ L]={heavy.llogl}  (untruncated mean <= "
      f"{heavy.untruncated_mean_bound:.4f})")

print()
print("-- size-biasing -------------------------------------------------")
d = bp.make_finite([0.25, 0.0, 0.75])
sb = bp.size_biased(d)
print(f"base pmf {np.round(d.pmf, 4)} -> size-biased pmf {np.round(sb.pmf, 4)}")
print(f"size-biased mean = {sb.mean:.4f} = (var + m^2)/m = "
      f"{(d.variance + d.mean**2) / d.mean:.4f}")

# the defining change-of-measure identity, checked on a sampled g
draws = bp.sample(sb, rng, 10**5)
lhs = np.log(draws).mean()
k = np.arange(len(d.pmf), dtype=float)
logk = np.where(k >= 1, np.log(np.maximum(k, 1)), 0.0)
rhs = float(d.pmf @ (k * logk)) / d.mean
print(f"E[log L-hat] sampled = {lhs:.4f}   E[L log L]/m exact = {rhs:.4f}")
