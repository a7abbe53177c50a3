"""Named, seed-reproducible experiments wiring the laboratory together.

Each registry entry pins an offspring law, horizons, replicate counts, and
fixed pass/fail tolerances (tolerances live here, not in user config, so
acceptance targets cannot be tuned into passing).  A run produces an
``ExperimentReport`` with one verdict per metric, echoes the resolved
configuration verbatim, and optionally writes ``report.json`` plus CSV
sample tables to an output directory.

Reproducibility contract: replicates are partitioned into a fixed number of
chunks (independent of the worker count); chunk ``i`` draws from
``numpy.random.default_rng(SeedSequence(entropy=seed, spawn_key=(i,)))`` and
chunk summaries are merged in chunk order.  Identical (config, seed) on the
same build therefore produce byte-identical stable-output reports, for any
worker count.
"""

from __future__ import annotations

import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, asdict
from functools import lru_cache

import numpy as np

from . import __version__
from .offspring import OffspringDistribution, law_from_dict, size_biased
from . import pgf
from . import simulate as sim
from . import stats

__all__ = [
    "ExperimentConfig",
    "Metric",
    "ExperimentReport",
    "parse_config",
    "run",
    "list_experiments",
    "REGISTRY",
]

N_CHUNKS = 64


# ---------------------------------------------------------------------------
# configuration
# ---------------------------------------------------------------------------

_CONFIG_FIELDS = ("name", "seed", "offspring", "immigration", "horizon",
                  "replicates", "truncation_k", "cap", "workers", "out_dir",
                  "stable_output")


@dataclass
class ExperimentConfig:
    """User-facing experiment configuration; None fields take registry defaults."""

    name: str
    seed: int
    offspring: dict | None = None
    immigration: dict | None = None
    horizon: int | None = None
    replicates: int | None = None
    truncation_k: int | None = None
    cap: float | None = None
    workers: int = 1
    out_dir: str | None = None
    stable_output: bool = False

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in _CONFIG_FIELDS}

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        unknown = set(d) - set(_CONFIG_FIELDS)
        if unknown:
            raise ValueError(f"unknown config fields: {sorted(unknown)}")
        if "name" not in d:
            raise ValueError("config needs an experiment name")
        if "seed" not in d or d["seed"] is None:
            raise ValueError("config needs a seed")
        return cls(**d)


def _validate_law_desc(desc: dict, what: str) -> None:
    if desc is None:
        return
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ValueError(f"{what} description must be a dict with 'kind'")
    if desc["kind"] == "finite":
        total = float(np.sum(desc["pmf"]))
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"{what} pmf sums to {total!r}, not 1 within 1e-9")
        if any(x < 0 for x in desc["pmf"]):
            raise ValueError(f"{what} pmf has a negative entry")


def parse_config(path: str | None = None, **overrides) -> ExperimentConfig:
    """Load a JSON config document; keyword flags override file fields."""
    data: dict = {}
    if path is not None:
        with open(path) as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must hold a JSON object")
    for key, value in overrides.items():
        if value is not None:
            data[key] = value
    cfg = ExperimentConfig.from_dict(data)
    if cfg.name not in REGISTRY:
        raise ValueError(
            f"unknown experiment {cfg.name!r}; known: {sorted(REGISTRY)}")
    if cfg.replicates is not None and cfg.replicates < 1:
        raise ValueError("replicates must be at least 1")
    if cfg.workers < 1:
        raise ValueError("workers must be at least 1")
    _validate_law_desc(cfg.offspring, "offspring")
    _validate_law_desc(cfg.immigration, "immigration")
    return cfg


# ---------------------------------------------------------------------------
# report machinery
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Metric:
    name: str
    value: float | str
    target: float | str | None
    tolerance: str
    verdict: str
    detail: dict | None = None

    def to_dict(self) -> dict:
        d = {"name": self.name, "value": self.value, "target": self.target,
             "tolerance": self.tolerance, "verdict": self.verdict}
        if self.detail is not None:
            d["detail"] = self.detail
        return d


def _m_bounds(name, value, lo, hi, target=None, detail=None) -> Metric:
    value = float(value)
    ok = lo <= value <= hi
    return Metric(name, value, target if target is not None else (lo + hi) / 2,
                  f"in [{lo!r}, {hi!r}]", "pass" if ok else "fail", detail)


def _m_max(name, value, hi, target=None, detail=None) -> Metric:
    value = float(value)
    return Metric(name, value, target, f"<= {hi!r}",
                  "pass" if value <= hi else "fail", detail)


def _m_min(name, value, lo, target=None, detail=None) -> Metric:
    value = float(value)
    return Metric(name, value, target, f">= {lo!r}",
                  "pass" if value >= lo else "fail", detail)


def _m_equals(name, value, expected, detail=None) -> Metric:
    return Metric(name, value, expected, f"== {expected!r}",
                  "pass" if value == expected else "fail", detail)


@dataclass(frozen=True)
class ExperimentReport:
    experiment: str
    config: dict
    metrics: list
    tables: list
    version: str
    overall: str
    duration_seconds: float | None = None

    def to_json_dict(self) -> dict:
        d = {"experiment": self.experiment, "config": self.config,
             "metrics": [m.to_dict() for m in self.metrics],
             "tables": self.tables, "version": self.version,
             "overall": self.overall}
        if self.duration_seconds is not None:
            d["duration_seconds"] = self.duration_seconds
        return d

    def to_json(self) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=2) + "\n"

    @property
    def passed(self) -> bool:
        return self.overall == "pass"


# ---------------------------------------------------------------------------
# deterministic chunked fan-out
# ---------------------------------------------------------------------------


@lru_cache(maxsize=32)
def _law_cached(desc_json: str) -> OffspringDistribution:
    return law_from_dict(json.loads(desc_json))


def _law_json(desc: dict) -> str:
    return json.dumps(desc, sort_keys=True)


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed,
                                                        spawn_key=(index,)))


def _chunk_sizes(total: int, n_chunks: int = N_CHUNKS) -> list[int]:
    n = min(n_chunks, total)
    base, extra = divmod(total, n)
    return [base + (1 if i < extra else 0) for i in range(n)]


def _run_chunks(fn, args: tuple, total: int, seed: int, workers: int) -> list:
    """Apply fn(args, chunk_index, chunk_size, seed) over fixed chunks.

    Chunk layout and seeding depend only on (total, seed), never on the
    worker count; results come back in chunk order.
    """
    sizes = _chunk_sizes(total)
    if workers <= 1 or len(sizes) == 1:
        return [fn(args, i, s, seed) for i, s in enumerate(sizes)]
    with ProcessPoolExecutor(max_workers=min(workers, len(sizes))) as pool:
        futures = [pool.submit(fn, args, i, s, seed) for i, s in enumerate(sizes)]
        return [f.result() for f in futures]


def _merge_counts(counts_list) -> np.ndarray:
    width = max(len(c) for c in counts_list)
    out = np.zeros(width, dtype=np.int64)
    for c in counts_list:
        out[:len(c)] += c
    return out


def _empirical_tv_counts(a: np.ndarray, b: np.ndarray) -> float:
    width = max(len(a), len(b))
    pa = np.zeros(width)
    pb = np.zeros(width)
    pa[:len(a)] = a / a.sum()
    pb[:len(b)] = b / b.sum()
    return 0.5 * float(np.abs(pa - pb).sum())


# ---------------------------------------------------------------------------
# chunk workers (top level: picklable for the process pool)
# ---------------------------------------------------------------------------


def _chunk_conditioned(args, index, count, seed):
    law_json, horizon = args
    dist = _law_cached(law_json)
    rng = _chunk_rng(seed, index)
    values, attempts = sim.sample_conditioned_batch(dist, horizon, count, rng)
    return values, attempts


def _chunk_spine_terminal(args, index, count, seed):
    law_json, horizon = args
    dist = _law_cached(law_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_spines(dist, horizon, count, rng)
    return (batch.z[:, horizon].copy(), batch.left[:, horizon].copy(),
            batch.right[:, horizon].copy())


def _chunk_spine_gen_counts(args, index, count, seed):
    law_json, horizon, shift = args
    dist = _law_cached(law_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_spines(dist, horizon, count, rng)
    values = batch.z[:, horizon] + shift
    return np.bincount(values.astype(np.int64))


def _chunk_immigration_final_counts(args, index, count, seed):
    off_json, horizon = args
    dist = _law_cached(off_json)
    rng = _chunk_rng(seed, index)
    immigration = sim.ShiftedLaw(size_biased(dist), -1)
    batch = sim.simulate_immigrations(dist, immigration, horizon, count, rng,
                                      keep_generations=False)
    return np.bincount(batch.z[:, -1].astype(np.int64))


def _chunk_paths_summary(args, index, count, seed):
    law_json, horizon, cap, w_floor = args
    dist = _law_cached(law_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_paths(dist, horizon, count, rng, cap=cap)
    w_final = batch.z[:, horizon] / dist.mean ** horizon
    unsat = ~batch.saturated
    return {
        "count": count,
        "unsat": int(unsat.sum()),
        "w_sum": float(w_final[unsat].sum()),
        "w_small": int((w_final[unsat] < w_floor).sum()),
        "w_final": w_final[unsat],
    }


def _chunk_paths_two_w(args, index, count, seed):
    law_json, n1, n2, cap = args
    dist = _law_cached(law_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_paths(dist, n2, count, rng, cap=cap)
    unsat = ~batch.saturated
    w1 = batch.z[unsat, n1] / dist.mean ** n1
    w2 = batch.z[unsat, n2] / dist.mean ** n2
    return w1, w2


def _chunk_seneta_bounded(args, index, count, seed):
    off_json, imm_json, n1, n2, cap, rel_tol = args
    dist = _law_cached(off_json)
    imm = _law_cached(imm_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_immigrations(dist, imm, n2, count, rng, cap=cap)
    unsat = ~batch.saturated
    w1 = batch.z[unsat, n1] / dist.mean ** n1
    w2 = batch.z[unsat, n2] / dist.mean ** n2
    ok = np.abs(w2 - w1) <= rel_tol * np.maximum(w1, 1e-300)
    return int(unsat.sum()), int(ok.sum())


def _chunk_seneta_heavy(args, index, count, seed):
    off_json, horizon, cap = args
    dist = _law_cached(off_json)
    rng = _chunk_rng(seed, index)
    immigration = sim.heavy_immigration_sampler()
    batch = sim.simulate_immigrations(dist, immigration, horizon, count, rng,
                                      cap=cap)
    return np.maximum(np.log(np.maximum(batch.z, 1.0)), 0.0)


def _chunk_heathcote_bounded(args, index, count, seed):
    off_json, imm_json, n1, n2, cap = args
    dist = _law_cached(off_json)
    imm = _law_cached(imm_json)
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_immigrations(dist, imm, n2, count, rng, cap=cap)
    c1 = np.bincount(batch.z[:, n1].astype(np.int64))
    c2 = np.bincount(batch.z[:, n2].astype(np.int64))
    return c1, c2


def _chunk_heathcote_heavy(args, index, count, seed):
    off_json, n1, n2, cap, imm_cap = args
    dist = _law_cached(off_json)
    rng = _chunk_rng(seed, index)
    immigration = sim.LogParetoImmigration(cap_value=imm_cap)
    batch = sim.simulate_immigrations(dist, immigration, n2, count, rng, cap=cap)
    return batch.z[:, n1].copy(), batch.z[:, n2].copy()


def _chunk_bpre(args, index, count, seed):
    env_jsons, weights, horizon, cap = args
    envs = [_law_cached(e) for e in env_jsons]
    rng = _chunk_rng(seed, index)
    batch = sim.simulate_bpre_batch(envs, list(weights), horizon, count, rng,
                                    cap=cap)
    w_final = batch.z[:, horizon] / batch.m_prod[:, horizon]
    return float(w_final.sum()), count


# ---------------------------------------------------------------------------
# experiment runners
# ---------------------------------------------------------------------------


def _run_kolmogorov(cfg: dict):
    dist = law_from_dict(cfg["offspring"])
    n = cfg["horizon"]
    seq = pgf.survival_seq(dist, n)
    value = n * seq.s[n]
    target = 2.0 / dist.variance
    metrics = [_m_bounds("n_times_survival", value,
                         0.99 * target, 1.0025 * target, target=target)]
    marks = np.unique(np.geomspace(1, n, 200).astype(np.int64))
    rows = [(int(k), repr(float(seq.s[k])), repr(float(k * seq.s[k])))
            for k in marks]
    tables = [("kolmogorov_trajectory.csv", ("n", "survival", "n_times_survival"),
               rows)]
    return metrics, tables


def _run_subcritical_rate(cfg: dict):
    main = law_from_dict(cfg["offspring"])
    heavy = law_from_dict(cfg["heavy_offspring"])
    horizon = cfg["horizon"]
    n1, n2 = cfg["ratio_generations"]

    grid = [main, heavy] + [law_from_dict(d) for d in cfg["extra_laws"]]
    worst = -math.inf
    for dist in grid:
        seq = pgf.survival_seq(dist, horizon)
        worst = max(worst, float(np.max(np.diff(seq.ratios))))

    seq_main = pgf.survival_seq(main, n2)
    r1, r2 = seq_main.ratios[n1], seq_main.ratios[n2]
    seq_heavy = pgf.survival_seq(heavy, n2)
    h1, h2 = seq_heavy.ratios[n1], seq_heavy.ratios[n2]

    metrics = [
        _m_max("ratio_monotonicity_max_increase", worst, 1e-13, target=0.0),
        _m_max("finite_llogl_ratio_rel_change", abs(r2 - r1) / r1, 1e-3,
               target=0.0),
        _m_bounds("finite_llogl_ratio_limit", r2,
                  cfg["pinned_ratio_limit"] - 1e-9,
                  cfg["pinned_ratio_limit"] + 1e-9,
                  target=cfg["pinned_ratio_limit"]),
        _m_max("infinite_llogl_ratio_decay", h2 / h1, 0.9, target=0.0),
    ]
    marks = np.unique(np.geomspace(1, n2, 120).astype(np.int64))
    rows = [(int(k), repr(float(seq_main.ratios[k])), repr(float(seq_heavy.ratios[k])))
            for k in marks]
    tables = [("subcritical_ratios.csv",
               ("n", "ratio_finite_llogl", "ratio_infinite_llogl"), rows)]
    return metrics, tables


def _run_yaglom(cfg: dict):
    law_json = _law_json(cfg["offspring"])
    dist = _law_cached(law_json)
    n, count = cfg["horizon"], cfg["replicates"]
    results = _run_chunks(_chunk_conditioned, (law_json, n), count,
                          cfg["seed"], cfg["workers"])
    values = np.concatenate([r[0] for r in results])
    attempts = sum(r[1] for r in results)
    scaled = values / n
    theta = dist.variance / 2.0
    sample = stats.EmpiricalSample.from_values(scaled, sort=True)
    ks = stats.ks_statistic(sample, stats.exponential_cdf(theta))
    mean = float(scaled.mean())
    metrics = [
        _m_max("ks_vs_exponential", ks, cfg["ks_threshold"], target=0.0,
               detail={"attempts": attempts, "reference": f"Exp(mean={theta})"}),
        _m_bounds("conditioned_mean", mean, 0.94 * theta, 1.06 * theta,
                  target=theta),
    ]
    rows = [(i, repr(float(v)), repr(float(v / n))) for i, v in enumerate(values)]
    tables = [("yaglom_samples.csv", ("replicate", "z_n", "z_n_over_n"), rows)]
    return metrics, tables


def _run_harris_spine(cfg: dict):
    law_json = _law_json(cfg["offspring"])
    dist = _law_cached(law_json)
    n, count = cfg["horizon"], cfg["replicates"]
    results = _run_chunks(_chunk_spine_terminal, (law_json, n), count,
                          cfg["seed"], cfg["workers"])
    z = np.concatenate([r[0] for r in results]) / n
    left = np.concatenate([r[1] for r in results]) / n
    right = np.concatenate([r[2] for r in results]) / n
    theta = dist.variance / 2.0
    thr = cfg["ks_threshold"]
    gamma_ref = stats.gamma2_cdf(theta)
    exp_ref = stats.exponential_cdf(theta)
    metrics = [
        _m_max("ks_total_vs_gamma2",
               stats.ks_statistic(stats.EmpiricalSample.from_values(z, sort=True),
                                  gamma_ref), thr, target=0.0,
               detail={"reference": gamma_ref.description}),
        _m_max("ks_left_vs_exponential",
               stats.ks_statistic(stats.EmpiricalSample.from_values(left, sort=True),
                                  exp_ref), thr, target=0.0,
               detail={"reference": exp_ref.description}),
        _m_max("ks_right_vs_exponential",
               stats.ks_statistic(stats.EmpiricalSample.from_values(right, sort=True),
                                  exp_ref), thr, target=0.0,
               detail={"reference": exp_ref.description}),
    ]
    rows = [(i, repr(float(zv)), repr(float(lv)), repr(float(rv)))
            for i, (zv, lv, rv) in enumerate(zip(z, left, right))]
    tables = [("harris_spine_samples.csv",
               ("replicate", "z_over_n", "left_over_n", "right_over_n"), rows)]
    return metrics, tables


def _run_kesten_stigum(cfg: dict):
    law_json = _law_json(cfg["offspring"])
    dist = _law_cached(law_json)
    n, count = cfg["horizon"], cfg["replicates"]
    results = _run_chunks(_chunk_paths_summary,
                          (law_json, n, cfg["cap"], cfg["w_floor"]),
                          count, cfg["seed"], cfg["workers"])
    unsat = sum(r["unsat"] for r in results)
    mean_w = sum(r["w_sum"] for r in results) / unsat
    frac_small = sum(r["w_small"] for r in results) / unsat
    q = pgf.extinction_prob(dist)
    if abs(q - 1.0 / 3.0) < 1e-9:
        lo, hi = 0.323, 0.343
    else:
        lo, hi = q - 0.01, q + 0.01

    heavy_json = _law_json(cfg["heavy_offspring"])
    n1, n2 = cfg["heavy_generations"]
    heavy_results = _run_chunks(_chunk_paths_two_w,
                                (heavy_json, n1, n2, cfg["heavy_cap"]),
                                cfg["heavy_replicates"], cfg["seed"] + 1,
                                cfg["workers"])
    w1 = np.concatenate([r[0] for r in heavy_results])
    w2 = np.concatenate([r[1] for r in heavy_results])
    med1, med2 = float(np.median(w1)), float(np.median(w2))

    metrics = [
        _m_bounds("mean_w", mean_w, 0.98, 1.02, target=1.0),
        _m_bounds("fraction_w_below_floor", frac_small, lo, hi, target=q),
        _m_max("heavy_median_w_ratio", med2 / med1, 0.5, target=0.0,
               detail={"median_w_early": med1, "median_w_late": med2,
                       "generations": [n1, n2]}),
    ]
    w_final = np.concatenate([r["w_final"] for r in results])
    rows = [(i, repr(float(w))) for i, w in enumerate(w_final)]
    tables = [("kesten_stigum_w.csv", ("replicate", "w_final"), rows)]
    return metrics, tables


def _grid_pmfs(step: float):
    ticks = np.arange(0.0, 1.0 + step / 2, step)
    for p0 in ticks:
        for p1 in ticks:
            p2 = 1.0 - p0 - p1
            if p2 < -1e-12:
                continue
            p2 = max(p2, 0.0)
            if p1 + 2 * p2 <= 0:        # zero mean: nothing to size-bias
                continue
            yield [float(p0), float(p1), float(p2)]


def _run_measure_identity(cfg: dict):
    n = cfg["horizon"]
    worst_goal = 0.0
    worst_ac = 0.0
    worst_uniform = 0.0
    laws = 0
    for pmf in _grid_pmfs(cfg["grid_step"]):
        dist = law_from_dict({"kind": "finite", "pmf": pmf})
        laws += 1
        m_pow = dist.mean ** n
        for tree, prob in sim.enumerate_trees(dist, n):
            paths = sim.enumerate_generation_paths(tree, n)
            if not paths:
                continue
            cyls = [sim.spine_cylinder_probability(dist, tree, p) for p in paths]
            for c in cyls:
                worst_goal = max(worst_goal, abs(c - prob / m_pow))
            worst_ac = max(worst_ac,
                           abs(sum(cyls) - len(paths) * prob / m_pow))
            worst_uniform = max(worst_uniform, max(cyls) - min(cyls))
    tol = cfg["residual_tol"]
    metrics = [
        _m_max("spine_path_identity_max_residual", worst_goal, tol, target=0.0,
               detail={"laws": laws}),
        _m_max("size_biased_cylinder_max_residual", worst_ac, tol, target=0.0),
        _m_max("uniform_spine_max_spread", worst_uniform, tol, target=0.0),
    ]
    return metrics, []


def _run_spine_immigration(cfg: dict):
    law_json = _law_json(cfg["offspring"])
    dist = _law_cached(law_json)
    k_max = cfg["truncation_k"]

    n1 = cfg["sizebias_generation"]
    counts = _merge_counts(_run_chunks(_chunk_spine_gen_counts,
                                       (law_json, n1, 0),
                                       cfg["sizebias_replicates"],
                                       cfg["seed"], cfg["workers"]))
    exact = pgf.size_bias_law(pgf.zn_law(dist, n1, k_max), dist.mean ** n1)
    emp = counts / counts.sum()
    width = max(len(emp), len(exact.masses))
    pa = np.zeros(width)
    pb = np.zeros(width)
    pa[:len(emp)] = emp
    pb[:len(exact.masses)] = exact.masses
    tv_exact = 0.5 * float(np.abs(pa - pb).sum()) + 0.5 * exact.tail

    n2 = cfg["immigration_generation"]
    spine_counts = _merge_counts(_run_chunks(_chunk_spine_gen_counts,
                                             (law_json, n2, -1),
                                             cfg["immigration_replicates"],
                                             cfg["seed"] + 1, cfg["workers"]))
    direct_counts = _merge_counts(_run_chunks(_chunk_immigration_final_counts,
                                              (law_json, n2),
                                              cfg["immigration_replicates"],
                                              cfg["seed"] + 2, cfg["workers"]))
    tv_two = _empirical_tv_counts(spine_counts, direct_counts)

    metrics = [
        _m_max("tv_spine_vs_sizebias_law", tv_exact, cfg["sizebias_tv_tol"],
               target=0.0),
        _m_max("tv_spine_vs_direct_immigration", tv_two,
               cfg["immigration_tv_tol"], target=0.0),
    ]
    rows = [(int(k), int(c)) for k, c in enumerate(counts)]
    tables = [("spine_generation_counts.csv", ("z", "draws"), rows)]
    return metrics, tables


def _run_williamson(cfg: dict):
    dist = law_from_dict(cfg["offspring"])
    k_max = cfg["truncation_k"]
    n_sum_lo, n_sum_hi = cfg["tv_sum_range"]
    n_dom = cfg["dominance_horizon"]

    tv_sum = 0.0
    dominance_ok = True
    mu_prev = None
    rows = []
    for n, law in pgf.zn_law_sequence(dist, n_sum_hi, k_max):
        mu = pgf.conditioned_law(law)
        if mu_prev is not None:
            tv = pgf.tv_distance(mu, mu_prev)
            if n_sum_lo <= n <= n_sum_hi:
                tv_sum += tv
            if n <= n_dom:
                dominance_ok &= pgf.stochastically_dominates(mu, mu_prev)
            rows.append((n, repr(tv)))
        mu_prev = mu
    metrics = [
        _m_max("tv_sum_late", tv_sum, cfg["tv_sum_tol"], target=0.0,
               detail={"range": [n_sum_lo, n_sum_hi]}),
        _m_equals("conditioned_laws_stochastically_increasing",
                  bool(dominance_ok), True),
    ]
    tables = [("williamson_tv.csv", ("n", "tv_to_previous"), rows)]
    return metrics, tables


def _run_seneta(cfg: dict):
    off_json = _law_json(cfg["offspring"])
    imm_json = _law_json(cfg["immigration"])
    n1, n2 = cfg["settle_generations"]
    results = _run_chunks(_chunk_seneta_bounded,
                          (off_json, imm_json, n1, n2, cfg["cap"],
                           cfg["settle_rel_tol"]),
                          cfg["replicates"], cfg["seed"], cfg["workers"])
    unsat = sum(r[0] for r in results)
    settled = sum(r[1] for r in results)
    frac = settled / unsat if unsat else 0.0

    h = cfg["growth_horizon"]
    logz = np.vstack(_run_chunks(_chunk_seneta_heavy,
                                 (off_json, 2 * h, cfg["growth_cap"]),
                                 cfg["growth_replicates"], cfg["seed"] + 1,
                                 cfg["workers"]))
    verdict = stats.classify_growth(logz, h)

    metrics = [
        _m_min("settled_fraction_bounded_immigration", frac, 0.95, target=1.0,
               detail={"unsaturated": unsat}),
        _m_equals("heavy_immigration_growth_verdict", verdict, stats.EXPLOSIVE),
    ]
    return metrics, []


def _run_heathcote(cfg: dict):
    off_json = _law_json(cfg["offspring"])
    imm_json = _law_json(cfg["immigration"])
    n1, n2 = cfg["compare_generations"]
    results = _run_chunks(_chunk_heathcote_bounded,
                          (off_json, imm_json, n1, n2, cfg["cap"]),
                          cfg["replicates"], cfg["seed"], cfg["workers"])
    c1 = _merge_counts([r[0] for r in results])
    c2 = _merge_counts([r[1] for r in results])
    tv = _empirical_tv_counts(c1, c2)

    heavy = _run_chunks(_chunk_heathcote_heavy,
                        (off_json, n1, n2, cfg["cap"], cfg["heavy_value_cap"]),
                        cfg["heavy_replicates"], cfg["seed"] + 1,
                        cfg["workers"])
    z1 = np.concatenate([r[0] for r in heavy])
    z2 = np.concatenate([r[1] for r in heavy])
    med1, med2 = float(np.median(z1)), float(np.median(z2))

    metrics = [
        _m_max("tv_bounded_immigration_stabilization", tv, cfg["tv_tol"],
               target=0.0, detail={"generations": [n1, n2]}),
        _m_min("heavy_immigration_median_growth",
               med2 / med1 if med1 > 0 else math.inf, 2.0,
               detail={"median_early": med1, "median_late": med2}),
    ]
    rows = [(int(k), int(v)) for k, v in enumerate(c1)]
    tables = [("heathcote_z_early_counts.csv", ("z", "count"), rows)]
    return metrics, tables


def _run_pakes_khattree(cfg: dict):
    n = cfg["replicates"]
    rng = _chunk_rng(cfg["seed"], 0)
    exp_sample = stats.EmpiricalSample.from_values(rng.exponential(0.5, n))
    uni_sample = stats.EmpiricalSample.from_values(rng.random(n))
    const_sample = stats.EmpiricalSample.from_values(np.ones(n))

    r_exp = stats.pakes_khattree_test(exp_sample, _chunk_rng(cfg["seed"], 1))
    r_uni = stats.pakes_khattree_test(uni_sample, _chunk_rng(cfg["seed"], 2))
    r_con = stats.pakes_khattree_test(const_sample, _chunk_rng(cfg["seed"], 3))

    metrics = [
        _m_max("exponential_input_ks", r_exp.statistic, 0.02, target=0.0,
               detail=asdict(r_exp)),
        _m_min("uniform_input_ks", r_uni.statistic, 0.05,
               detail=asdict(r_uni)),
        _m_min("constant_input_ks", r_con.statistic, 0.5,
               detail=asdict(r_con)),
    ]
    return metrics, []


def _run_bpre(cfg: dict):
    env_jsons = tuple(_law_json(e) for e in cfg["environments"])
    results = _run_chunks(_chunk_bpre,
                          (env_jsons, tuple(cfg["weights"]), cfg["horizon"],
                           cfg["cap"]),
                          cfg["replicates"], cfg["seed"], cfg["workers"])
    total = sum(r[1] for r in results)
    mean_w = sum(r[0] for r in results) / total
    metrics = [_m_bounds("mean_z_over_realized_means", mean_w, 0.97, 1.03,
                         target=1.0)]
    return metrics, []


# ---------------------------------------------------------------------------
# registry
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ExperimentSpec:
    name: str
    summary: str
    defaults: dict
    runner: object


_CRITICAL_BINARY = {"kind": "finite", "pmf": [0.5, 0.0, 0.5]}
_SUPERCRITICAL = {"kind": "finite", "pmf": [0.25, 0.0, 0.75]}
_SUBCRITICAL = {"kind": "finite", "pmf": [0.75, 0.0, 0.25]}
_UNIFORM_IMMIGRATION = {"kind": "finite", "pmf": [0.25, 0.25, 0.25, 0.25]}

REGISTRY: dict[str, ExperimentSpec] = {}


def _register(name, summary, defaults, runner):
    REGISTRY[name] = ExperimentSpec(name, summary, defaults, runner)


_register(
    "kesten-stigum",
    "Supercritical martingale limit W: E[W]=1 and P[W=0]=q on the finite "
    "E[L log L] side, median collapse of W on the divergent side "
    "(Kesten-Stigum theorem)",
    {"offspring": _SUPERCRITICAL, "horizon": 30, "replicates": 10**5,
     "cap": float(2**32), "w_floor": 1e-6,
     "heavy_offspring": {"kind": "heavy_tail", "alpha": 0.8, "cutoff": 10**6},
     "heavy_generations": (30, 60), "heavy_replicates": 10**4,
     "heavy_cap": 1e300},
    _run_kesten_stigum)

_register(
    "seneta",
    "Supercritical immigration dichotomy: Z_n/m^n settles iff E[log+ Y] is "
    "finite (Seneta's theorem)",
    {"offspring": _SUPERCRITICAL, "immigration": _UNIFORM_IMMIGRATION,
     "replicates": 10**3, "settle_generations": (40, 80),
     "settle_rel_tol": 0.01, "cap": 1e300,
     "growth_horizon": 200, "growth_replicates": 10**3, "growth_cap": 1e300},
    _run_seneta)

_register(
    "heathcote",
    "Subcritical immigration dichotomy: Z_n converges in law iff E[log+ Y] "
    "is finite, otherwise it diverges in probability (Heathcote's theorem)",
    {"offspring": _SUBCRITICAL,
     "immigration": {"kind": "truncated_poisson", "rate": 1.0, "cutoff": 8},
     "replicates": 10**5, "compare_generations": (50, 100), "tv_tol": 0.02,
     "cap": float(2**32), "heavy_replicates": 10**4, "heavy_value_cap": 1e300},
    _run_heathcote)

_register(
    "kolmogorov",
    "Critical survival asymptotics: n P[Z_n > 0] -> 2/sigma^2 by exact "
    "generating-function iteration (Kolmogorov's estimate)",
    {"offspring": _CRITICAL_BINARY, "horizon": 10**6},
    _run_kolmogorov)

_register(
    "yaglom",
    "Critical conditioned limit: Z_n/n given survival approaches an "
    "exponential law with mean sigma^2/2 (Yaglom's law)",
    {"offspring": _CRITICAL_BINARY, "horizon": 100, "replicates": 10**4,
     "ks_threshold": 0.035},
    _run_yaglom)

_register(
    "harris-spine",
    "Spine decomposition of the critical size-biased tree: Z_n/n vs "
    "Gamma(2), left/right-of-spine counts vs exponentials (Harris "
    "decomposition)",
    {"offspring": _CRITICAL_BINARY, "horizon": 500, "replicates": 10**4,
     "ks_threshold": 0.035},
    _run_harris_spine)

_register(
    "subcritical-rate",
    "P[Z_n > 0]/m^n is decreasing, with a positive limit iff E[L log L] is "
    "finite (Heathcote-Seneta-Vere-Jones theorem)",
    {"offspring": _SUBCRITICAL,
     "heavy_offspring": {"kind": "heavy_tail", "alpha": 0.0,
                         "cutoff": 3 * 10**6, "zero_mass": 0.67},
     "horizon": 500, "ratio_generations": (100, 200),
     "pinned_ratio_limit": 0.3929068527557796,
     "extra_laws": [_CRITICAL_BINARY, _SUPERCRITICAL,
                    {"kind": "geometric", "p": 0.5},
                    {"kind": "finite", "pmf": [0.0, 1.0]}]},
    _run_subcritical_rate)

_register(
    "williamson",
    "Conditioned laws converge in summable total variation and increase "
    "stochastically (Williamson's theorem)",
    {"offspring": _SUBCRITICAL, "truncation_k": 256,
     "tv_sum_range": (101, 200), "tv_sum_tol": 1e-6,
     "dominance_horizon": 100},
    _run_williamson)

_register(
    "measure-identity",
    "Exact spine-measure identities on enumerated trees: distinguished-path "
    "cylinders carry m^-n times the ordinary probability, so size-biased "
    "cylinders carry the W_n-weighted one",
    {"horizon": 2, "grid_step": 0.25, "residual_tol": 1e-10},
    _run_measure_identity)

_register(
    "spine-immigration",
    "Spine sampler agreement: generation sizes match the size-biased exact "
    "law, and Z_n - 1 matches immigration with Y = L-hat - 1",
    {"offspring": _CRITICAL_BINARY, "truncation_k": 4096,
     "sizebias_generation": 2, "sizebias_replicates": 10**6,
     "sizebias_tv_tol": 0.005,
     "immigration_generation": 5, "immigration_replicates": 10**5,
     "immigration_tv_tol": 0.01},
    _run_spine_immigration)

_register(
    "pakes-khattree",
    "U times a size-biased sample matches the sample in law iff the law is "
    "exponential (Pakes-Khattree characterization)",
    {"replicates": 10**5},
    _run_pakes_khattree)

_register(
    "bpre",
    "Branching in an i.i.d. random environment: mean Z_n over the realized "
    "mean product stays 1 in the supercritical L log L case (Tanny's "
    "theorem)",
    {"environments": [_SUPERCRITICAL, {"kind": "finite", "pmf": [0.0, 0.0, 1.0]}],
     "weights": [0.5, 0.5], "horizon": 20, "replicates": 10**5,
     "cap": float(2**32)},
    _run_bpre)


_OVERRIDABLE = ("offspring", "immigration", "horizon", "replicates",
                "truncation_k", "cap")


def run(config: ExperimentConfig) -> ExperimentReport:
    """Run a named experiment and return its report (and write artifacts)."""
    spec = REGISTRY.get(config.name)
    if spec is None:
        raise ValueError(
            f"unknown experiment {config.name!r}; known: {sorted(REGISTRY)}")
    resolved = dict(spec.defaults)
    for key in _OVERRIDABLE:
        value = getattr(config, key)
        if value is not None:
            resolved[key] = value
    resolved["seed"] = int(config.seed)
    resolved["workers"] = int(config.workers)
    if resolved.get("replicates") is not None and resolved["replicates"] < 1:
        raise ValueError("replicates must be at least 1")

    echo = config.to_dict()
    echo.update({k: resolved[k] for k in _OVERRIDABLE if k in resolved})

    t0 = time.perf_counter()
    metrics, tables = spec.runner(resolved)
    duration = time.perf_counter() - t0

    table_names = [t[0] for t in tables]
    overall = "pass" if all(m.verdict == "pass" for m in metrics) else "fail"
    report = ExperimentReport(
        experiment=config.name, config=echo, metrics=metrics,
        tables=table_names, version=f"bplab {__version__}", overall=overall,
        duration_seconds=None if config.stable_output else duration)

    if config.out_dir:
        os.makedirs(config.out_dir, exist_ok=True)
        with open(os.path.join(config.out_dir, "report.json"), "w") as fh:
            fh.write(report.to_json())
        import csv as _csv
        for name, header, rows in tables:
            with open(os.path.join(config.out_dir, name), "w", newline="") as fh:
                writer = _csv.writer(fh)
                writer.writerow(header)
                writer.writerows(rows)
    return report


def list_experiments() -> list[tuple[str, str]]:
    """(name, one-line summary) pairs in stable registry order."""
    return [(spec.name, spec.summary) for spec in REGISTRY.values()]
