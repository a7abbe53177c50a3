"""Extinction probabilities and survival decay in the three regimes.

The survival sequence s_n = P[Z_n > 0] comes from exact scalar iteration of
the generating function; no Monte Carlo is involved.  At criticality,
n * s_n approaches 2/sigma^2 (Kolmogorov's estimate), and the normalized
ratios s_n / m^n are decreasing in every regime.
"""

import numpy as np

import bplab as bp

print("-- extinction probabilities (smallest fixed point of f) ----------")
for pmf in ([0.25, 0.0, 0.75], [0.5, 0.0, 0.5], [0.75, 0.0, 0.25], [0.0, 1.0]):
    d = bp.make_finite(pmf)
    print(f"pmf={pmf}  m={d.mean:.2f}  q={bp.extinction_prob(d):.10f}")

print()
print("-- critical decay: n * P[Z_n > 0] -> 2/sigma^2 -------------------")
crit = bp.make_finite([0.5, 0.0, 0.5])
seq = bp.survival_seq(crit, 10**6)
for n in (10, 100, 10**3, 10**4, 10**5, 10**6):
    print(f"n={n:>8d}   n*s_n = {n * seq.s[n]:.6f}")

print()
print("-- critical geometric: the iteration reproduces s_n = 1/(n+1) ----")
geo = bp.survival_seq(bp.make_geometric(0.5), 1000)
worst = np.max(np.abs(geo.s * (np.arange(1001) + 1) - 1.0))
print(f"max |s_n (n+1) - 1| over n <= 1000: {worst:.2e}")

print()
print("-- ratios s_n / m^n are decreasing; the limit is positive --------")
print("   exactly when E[L log+ L] is finite")
sub = bp.make_finite([0.75, 0.0, 0.25])
heavy_sub = bp.make_heavy_tail(0.0, 3 * 10**6, zero_mass=0.67)
for d, label in ((sub, "finite E[L log L]"), (heavy_sub, "infinite E[L log L]")):
    s = bp.survival_seq(d, 200)
    print(f"{label:22s} m={d.mean:.4f}  r_100={s.ratios[100]:.4e}  "
          f"r_200={s.ratios[200]:.4e}  r_200/r_100={s.ratios[200]/s.ratios[100]:.4f}")
