"""Branching in an i.i.d. random environment.

Each generation draws one offspring law from a finite list and applies it
to every particle.  The conditional mean given the environment sequence is
the product M_n of the realized means, and Z_n / M_n is a mean-one
martingale in the supercritical L log L case.
"""

import numpy as np

import bplab as bp

rng = np.random.default_rng(5)

envs = [bp.make_finite([0.25, 0.0, 0.75]),    # m = 1.5
        bp.make_finite([0.0, 0.0, 1.0])]      # m = 2, deterministic doubling
weights = [0.5, 0.5]

print("-- one path with its realized normalizer ---------------------------")
path = bp.simulate_bpre(envs, weights, 12, rng)
print(f"environments: {path.env_indices}")
print(f"Z_n:          {path.z.astype(int)}")
print(f"M_n:          {np.round(path.m_prod, 2)}")
print(f"W_n = Z/M:    {np.round(path.w, 3)}")

print()
print("-- the martingale mean stays at one --------------------------------")
batch = bp.simulate_bpre_batch(envs, weights, 20, 2 * 10**4, rng)
w = batch.z[:, 20] / batch.m_prod[:, 20]
print(f"mean W_20 over 20000 paths: {w.mean():.4f}")
print(f"fraction extinct: {np.mean(batch.z[:, 20] == 0):.4f}")
