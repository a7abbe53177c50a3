"""The full law of Z_n by truncated power-series composition.

Composition happens in the ring of length-(K+1) series with an explicit
tail-mass scalar, so masses + tail = 1 holds to machine precision and
truncation is observable.  Conditioned laws increase stochastically and
converge in summable total variation.
"""

import numpy as np

import bplab as bp

crit = bp.make_finite([0.5, 0.0, 0.5])

print("-- law of Z_2 for the critical binary law ------------------------")
law = bp.zn_law(crit, 2, 8)
print(f"masses: {np.round(law.masses[:6], 6)}  tail: {law.tail}")
print("(brute-force over the five two-level trees gives 5/8, 0, 1/4, 0, 1/8)")

print()
print("-- the size-biased generation law --------------------------------")
sb = bp.size_bias_law(bp.zn_law(crit, 8, 512), crit.mean**8)
print(f"mean of size-biased Z_8 = {bp.law_mean(sb):.6f} "
      f"(exactly 1 + sigma^2 n = {1 + crit.variance * 8:.1f})")

print()
print("-- conditioned laws stabilize (subcritical) -----------------------")
sub = bp.make_finite([0.75, 0.0, 0.25])
prev = None
for n, raw in bp.zn_law_sequence(sub, 12, 64):
    mu = bp.conditioned_law(raw)
    if prev is not None and n % 2 == 0:
        tv = bp.tv_distance(mu, prev)
        dom = bp.stochastically_dominates(mu, prev)
        print(f"n={n:>2d}  TV(mu_n, mu_(n-1)) = {tv:.3e}   mu_n >= mu_(n-1): {dom}")
    prev = mu

print()
print("-- total-variation convergence is summable ------------------------")
total = 0.0
prev = None
for n, raw in bp.zn_law_sequence(sub, 200, 256):
    mu = bp.conditioned_law(raw)
    if prev is not None:
        total += bp.tv_distance(mu, prev)
    prev = mu
print(f"sum of TV increments up to n=200: {total:.6f} (finite, dominated by small n)")
