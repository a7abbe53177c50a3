"""The size-biased tree and its spine.

Grow the distinguished ray with size-biased child counts, pick the next
spine vertex uniformly, and hang ordinary descendant trees on the other
children.  The resulting measure weights each n-level tree by W_n = Z_n/m^n,
and the distinguished vertex is uniform on generation n.  Both identities
are checked exactly on enumerated trees.
"""

import numpy as np

import bplab as bp
from bplab import simulate as sim

crit = bp.make_finite([0.5, 0.0, 0.5])
rng = np.random.default_rng(7)

print("-- one spine realization (never extinct) --------------------------")
spine = bp.simulate_spine(crit, 8, rng)
print(f"spine child counts: {spine.lhat}")
print(f"spine positions:    {spine.pos}")
print(f"generation sizes:   {spine.z}")
print(f"right of spine:     {spine.right}   left: {spine.left}")

print()
print("-- exact measure identities on enumerated two-level trees ---------")
worst_path = 0.0
worst_tree = 0.0
for tree, prob in sim.enumerate_trees(crit, 2):
    paths = sim.enumerate_generation_paths(tree, 2)
    for path in paths:
        cyl = sim.spine_cylinder_probability(crit, tree, path)
        worst_path = max(worst_path, abs(cyl - prob / crit.mean**2))
    if paths:
        sb = sim.sizebias_tree_probability(crit, tree, 2)
        w2 = tree.gen_sizes[2] / crit.mean**2
        worst_tree = max(worst_tree, abs(sb - w2 * prob))
print(f"max |spine cylinder - m^-2 P[t]|      = {worst_path:.2e}")
print(f"max |size-biased law - W_2(t) P[t]|   = {worst_tree:.2e}")

print()
print("-- sampled generation sizes match the exact size-biased law -------")
reps = 10**5
batch = bp.simulate_spines(crit, 2, reps, rng)
emp = np.bincount(batch.z[:, 2], minlength=5)[:5] / reps
exact = bp.size_bias_law(bp.zn_law(crit, 2, 4), 1.0).masses
print(f"empirical:  {np.round(emp, 4)}")
print(f"exact:      {np.round(exact, 4)}")
print(f"TV = {0.5 * np.abs(emp - exact).sum():.5f}")
