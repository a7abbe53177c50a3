"""The experiment registry: named, seeded, reproducible verification runs.

Every experiment pins its laws, horizons, and tolerances in the registry
and emits a report with one verdict per metric.  The same runs are exposed
on the command line:

    bplab list
    bplab run kolmogorov --seed 42 --out /tmp/kolmogorov
    bplab law-info --pmf 0.25,0,0.75
"""

import bplab as bp

print("-- registry ---------------------------------------------------------")
for name, summary in bp.list_experiments():
    print(f"{name:18s} {summary[:58]}...")

print()
print("-- a fast exact experiment -------------------------------------------")
cfg = bp.parse_config(name="measure-identity", seed=42, stable_output=True)
report = bp.run(cfg)
for m in report.metrics:
    print(f"[{m.verdict:4s}] {m.name} = {m.value:.2e}")
print(f"overall: {report.overall}")

print()
print("-- reproducibility ----------------------------------------------------")
r1 = bp.run(bp.parse_config(name="bpre", seed=9, replicates=4000,
                            stable_output=True))
r2 = bp.run(bp.parse_config(name="bpre", seed=9, replicates=4000,
                            stable_output=True, workers=4))
print(f"single metric, workers 1 vs 4: {r1.metrics[0].value!r} "
      f"vs {r2.metrics[0].value!r}")
print(f"identical: {r1.metrics[0].value == r2.metrics[0].value}")
