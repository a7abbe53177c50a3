"""Monte Carlo engines: plain branching paths and trees, the size-biased
spine construction with left/right-of-spine bookkeeping, immigration
processes, conditioned-survival sampling, random-environment paths, and a
brute-force tree enumerator used as an exactness oracle.

Population counts are carried as integer-valued float64 arrays.  Offspring
sums are drawn exactly wherever feasible:

* narrow-support laws: one multinomial split of the whole generation into
  offspring classes (O(support) per generation, distribution preserved
  exactly) for populations up to 2^62;
* wide-support laws (heavy tails): a dense head plus individually sampled
  tail draws, exact up to populations of 10^6;
* beyond those bounds a Gaussian step with the law's exact mean and variance
  takes over -- at that scale the relative error is far below anything the
  desk-scale statistics can resolve.

Saturation: a path whose population exceeds ``cap`` is flagged with its
first saturation generation.  Plain paths then evolve deterministically as
Z -> round(m Z), clipped at round(cap * m); this is a growth-detection
device, and saturated paths are excluded from quantitative statistics.
Immigration paths keep evolving stochastically after the flag (their
dichotomies concern growth beyond every exponential, which a value ceiling
would erase); values are clipped only at 1e300.

Replicates are embarrassingly parallel: every function takes a caller-owned
``numpy.random.Generator`` and touches no shared mutable state.
"""

from __future__ import annotations

import itertools
import math
import weakref
from dataclasses import dataclass, field

import numpy as np

from .offspring import (Family, OffspringDistribution, SizeBiasedDistribution,
                        size_biased)

__all__ = [
    "DEFAULT_CAP",
    "PopulationPath",
    "PathBatch",
    "TreeRealization",
    "SpineRealization",
    "SpineBatch",
    "ImmigrationPath",
    "ImmigrationBatch",
    "BprePath",
    "BpreBatch",
    "ShiftedLaw",
    "LogParetoImmigration",
    "RejectionBudgetError",
    "simulate_path",
    "simulate_paths",
    "simulate_tree",
    "gw_probability",
    "enumerate_trees",
    "enumerate_generation_paths",
    "spine_cylinder_probability",
    "sizebias_tree_probability",
    "simulate_spine",
    "simulate_spines",
    "spine_as_immigration",
    "spine_to_csv",
    "simulate_immigration",
    "simulate_immigrations",
    "sample_conditioned",
    "sample_conditioned_batch",
    "heavy_immigration_sampler",
    "simulate_bpre",
    "simulate_bpre_batch",
]

DEFAULT_CAP = float(2**32)
INT_SAFE = float(2**62)          # multinomial stays exact below this
WIDE_EXACT_MAX = 1e6             # exact bound for wide-support laws
HEAD_WIDTH = 64                  # dense head for wide-support sampling
NARROW_WIDTH = 256               # support width handled by one multinomial
VALUE_CLIP = 1e300


class RejectionBudgetError(RuntimeError):
    """Rejection sampling exhausted its attempt budget."""


# ---------------------------------------------------------------------------
# result containers
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class PopulationPath:
    """One realized path Z_0..Z_n with normalized values W_k = Z_k / m^k."""

    z: np.ndarray
    w: np.ndarray
    saturated: bool
    first_saturation: int | None
    cap: float


@dataclass(frozen=True, eq=False)
class PathBatch:
    """Replicated paths; ``z`` has shape (reps, n+1)."""

    z: np.ndarray
    saturated: np.ndarray
    first_saturation: np.ndarray
    cap: float
    mean: float

    @property
    def w(self) -> np.ndarray:
        powers = self.mean ** np.arange(self.z.shape[1])
        return self.z / powers


@dataclass(frozen=True, eq=False)
class TreeRealization:
    """First-n-levels family tree, child counts in depth-first preorder."""

    child_counts: np.ndarray
    depths: np.ndarray
    gen_sizes: np.ndarray
    horizon: int
    truncated: bool = False
    nested: tuple | None = None

    @property
    def height(self) -> int:
        alive = np.nonzero(self.gen_sizes)[0]
        return int(alive[-1]) if len(alive) else 0


@dataclass(frozen=True, eq=False)
class SpineRealization:
    """One size-biased tree summarized along its distinguished ray.

    ``lhat[j-1]`` is the spine vertex's child count at step j, ``pos`` its
    chosen child's 1-based position, and ``right[k]`` counts the generation-k
    vertices weakly to the right of the spine (the spine vertex included).
    """

    n: int
    lhat: np.ndarray
    pos: np.ndarray
    z: np.ndarray
    right: np.ndarray
    left: np.ndarray


@dataclass(frozen=True, eq=False)
class SpineBatch:
    lhat: np.ndarray       # (reps, n)
    pos: np.ndarray        # (reps, n)
    z: np.ndarray          # (reps, n+1)
    right: np.ndarray
    left: np.ndarray


@dataclass(frozen=True, eq=False)
class ImmigrationPath:
    """Immigration process path: Z_0 = 0, Z_k = offspring(Z_{k-1}) + Y_k."""

    z: np.ndarray
    y: np.ndarray
    w: np.ndarray | None
    saturated: bool
    first_saturation: int | None


@dataclass(frozen=True, eq=False)
class ImmigrationBatch:
    z: np.ndarray
    saturated: np.ndarray
    first_saturation: np.ndarray


@dataclass(frozen=True, eq=False)
class BprePath:
    """Random-environment path with the realized mean products M_k."""

    z: np.ndarray
    m_prod: np.ndarray
    w: np.ndarray
    env_indices: np.ndarray
    saturated: bool


@dataclass(frozen=True, eq=False)
class BpreBatch:
    z: np.ndarray
    m_prod: np.ndarray
    saturated: np.ndarray

    @property
    def w(self) -> np.ndarray:
        return self.z / self.m_prod


@dataclass(frozen=True)
class ShiftedLaw:
    """Wraps a sampler, shifting every draw by a constant (e.g. L-hat - 1)."""

    base: object
    shift: int = -1

    def sample(self, rng: np.random.Generator, size=None):
        return self.base.sample(rng, size) + self.shift


# ---------------------------------------------------------------------------
# offspring-sum engine
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class _StepPlan:
    kind: str                        # "narrow" | "wide" | "geometric"
    kvals: np.ndarray | None = None
    pmf: np.ndarray | None = None
    head_pmf: np.ndarray | None = None
    head_kvals: np.ndarray | None = None
    tail_epsilon: float = 0.0
    tail_values: np.ndarray | None = None
    tail_cdf: np.ndarray | None = None


_PLANS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _step_plan(dist: OffspringDistribution) -> _StepPlan:
    plan = _PLANS.get(dist)
    if plan is not None:
        return plan
    if dist.family is Family.GEOMETRIC:
        plan = _StepPlan("geometric")
    else:
        support = dist.max_support
        if support <= NARROW_WIDTH:
            pmf = np.asarray(dist.pmf[:support + 1])
            plan = _StepPlan("narrow", kvals=np.arange(support + 1, dtype=float),
                             pmf=pmf / pmf.sum())
        else:
            head = np.asarray(dist.pmf[:HEAD_WIDTH + 1])
            eps = float(dist.pmf[HEAD_WIDTH + 1:].sum())
            tail = np.asarray(dist.pmf[HEAD_WIDTH + 1:]) / eps
            plan = _StepPlan(
                "wide",
                head_pmf=head / head.sum(),
                head_kvals=np.arange(HEAD_WIDTH + 1, dtype=float),
                tail_epsilon=eps,
                tail_values=np.arange(HEAD_WIDTH + 1, len(dist.pmf), dtype=float),
                tail_cdf=np.cumsum(tail),
            )
    _PLANS[dist] = plan
    return plan


def _gaussian_step(dist: OffspringDistribution, z: np.ndarray,
                   rng: np.random.Generator) -> np.ndarray:
    noise = np.sqrt(np.maximum(dist.variance * z, 0.0)) * rng.standard_normal(len(z))
    return np.minimum(np.maximum(np.rint(dist.mean * z + noise), 0.0), VALUE_CLIP)


def _population_step(dist: OffspringDistribution, z: np.ndarray,
                     rng: np.random.Generator) -> np.ndarray:
    """Offspring sums for each entry of z (float64 counts), vectorized."""
    out = np.zeros_like(z)
    plan = _step_plan(dist)
    pos = z > 0

    if plan.kind == "geometric":
        exact = pos & (z <= INT_SAFE)
        if exact.any():
            zi = z[exact].astype(np.int64)
            out[exact] = rng.negative_binomial(zi, dist.p).astype(float)
    elif plan.kind == "narrow":
        exact = pos & (z <= INT_SAFE)
        if exact.any():
            zi = z[exact].astype(np.int64)
            counts = rng.multinomial(zi, plan.pmf)
            out[exact] = counts @ plan.kvals
    else:
        exact = pos & (z <= WIDE_EXACT_MAX)
        if exact.any():
            zi = z[exact].astype(np.int64)
            n_tail = rng.binomial(zi, plan.tail_epsilon)
            head_counts = rng.multinomial(zi - n_tail, plan.head_pmf)
            sums = head_counts @ plan.head_kvals
            total_tail = int(n_tail.sum())
            if total_tail:
                draws = plan.tail_values[
                    np.searchsorted(plan.tail_cdf, rng.random(total_tail))]
                owner = np.repeat(np.arange(len(zi)), n_tail)
                sums += np.bincount(owner, weights=draws, minlength=len(zi))
            out[exact] = sums

    big = pos & ~exact
    if big.any():
        out[big] = _gaussian_step(dist, z[big], rng)
    return out


# ---------------------------------------------------------------------------
# plain paths
# ---------------------------------------------------------------------------


def simulate_paths(dist: OffspringDistribution, n: int, reps: int,
                   rng: np.random.Generator, *, z0: int = 1,
                   cap: float = DEFAULT_CAP) -> PathBatch:
    """Replicated paths Z_0..Z_n; saturated paths switch to the mean map."""
    if z0 < 1:
        raise ValueError("z0 must be at least 1")
    if cap < z0:
        raise ValueError("cap must be at least z0")
    z = np.zeros((reps, n + 1))
    z[:, 0] = float(z0)
    saturated = np.zeros(reps, dtype=bool)
    first_sat = np.full(reps, -1, dtype=np.int64)
    det_ceiling = min(np.rint(cap * dist.mean), VALUE_CLIP)
    cur = z[:, 0].copy()
    for k in range(1, n + 1):
        nxt = np.empty_like(cur)
        live = ~saturated
        if live.any():
            nxt[live] = _population_step(dist, cur[live], rng)
        if saturated.any():
            nxt[saturated] = np.minimum(np.rint(dist.mean * cur[saturated]),
                                        det_ceiling)
        newly = (nxt > cap) & ~saturated
        if newly.any():
            saturated |= newly
            first_sat[newly] = k
        cur = nxt
        z[:, k] = cur
    return PathBatch(z, saturated, first_sat, cap, dist.mean)


def simulate_path(dist: OffspringDistribution, n: int, rng: np.random.Generator,
                  *, z0: int = 1, cap: float = DEFAULT_CAP) -> PopulationPath:
    """One path Z_0..Z_n with W_k = Z_k / m^k."""
    batch = simulate_paths(dist, n, 1, rng, z0=z0, cap=cap)
    z = batch.z[0]
    w = z / dist.mean ** np.arange(n + 1)
    sat = bool(batch.saturated[0])
    first = int(batch.first_saturation[0]) if sat else None
    return PopulationPath(z, w, sat, first, cap)


def _terminal_generation(dist: OffspringDistribution, n: int, reps: int,
                         rng: np.random.Generator) -> np.ndarray:
    """Z_n only, fully stochastic, memory-light."""
    cur = np.ones(reps)
    for _ in range(n):
        cur = _population_step(dist, cur, rng)
    return cur


# ---------------------------------------------------------------------------
# trees
# ---------------------------------------------------------------------------


def simulate_tree(dist: OffspringDistribution, n: int, rng: np.random.Generator,
                  *, node_cap: int = 10**6) -> TreeRealization:
    """Sample the first n levels of a family tree, depth-first.

    If the vertex count exceeds node_cap the result is returned partially
    grown with ``truncated=True`` (a flag, not a failure).
    """
    counts: list[int] = []
    depths: list[int] = []
    gen_sizes = np.zeros(n + 1, dtype=np.int64)
    stack = [0]                      # depths of vertices awaiting expansion
    truncated = False
    while stack:
        depth = stack.pop()
        if len(counts) >= node_cap:
            truncated = True
            break
        gen_sizes[depth] += 1
        if depth == n:
            counts.append(0)
            depths.append(depth)
            continue
        c = int(dist.sample(rng))
        counts.append(c)
        depths.append(depth)
        stack.extend([depth + 1] * c)
    return TreeRealization(np.asarray(counts, dtype=np.int64),
                           np.asarray(depths, dtype=np.int64),
                           gen_sizes, n, truncated)


def gw_probability(tree: TreeRealization, dist: OffspringDistribution,
                   n: int) -> float:
    """Probability of the n-level cylinder of this tree: the product of
    offspring probabilities over all vertices in generations 0..n-1."""
    if dist.pmf is None:
        raise ValueError("exact cylinder probabilities need an array-backed law")
    if tree.horizon < n and tree.gen_sizes[tree.horizon] > 0:
        raise ValueError("tree too shallow for the requested depth")
    mask = tree.depths < n
    return float(np.prod(dist.pmf[tree.child_counts[mask]]))


def _nested_to_arrays(nested, horizon: int):
    counts: list[int] = []
    depths: list[int] = []
    gen_sizes = np.zeros(horizon + 1, dtype=np.int64)

    def walk(node, depth):
        gen_sizes[depth] += 1
        if node is None:             # vertex at the horizon, children unrecorded
            counts.append(0)
            depths.append(depth)
            return
        k, children = node
        counts.append(k)
        depths.append(depth)
        for child in children:
            walk(child, depth + 1)

    walk(nested, 0)
    return (np.asarray(counts, dtype=np.int64), np.asarray(depths, dtype=np.int64),
            gen_sizes)


def _gw_prob_nested(dist: OffspringDistribution, node, depth: int) -> float:
    if node is None or depth == 0:
        return 1.0
    k, children = node
    prob = float(dist.pmf[k])
    for child in children:
        prob *= _gw_prob_nested(dist, child, depth - 1)
    return prob


def enumerate_trees(dist: OffspringDistribution, n: int
                    ) -> list[tuple[TreeRealization, float]]:
    """All positive-probability first-n-level trees with exact probabilities.

    Guarded to support within {0..3} and n <= 3; the probabilities sum to 1.
    """
    if dist.pmf is None or dist.max_support > 3:
        raise ValueError("enumeration requires support within {0,1,2,3}")
    if n > 3:
        raise ValueError("enumeration depth capped at 3")
    ks, ps = dist.support_pairs()
    pairs = list(zip(ks.tolist(), ps.tolist()))

    def enum(depth):
        if depth == 0:
            return [(None, 1.0)]
        below = enum(depth - 1)
        out = []
        for k, p_k in pairs:
            for combo in itertools.product(below, repeat=int(k)):
                subtrees = tuple(c[0] for c in combo)
                prob = p_k * math.prod(c[1] for c in combo)
                out.append(((int(k), subtrees), prob))
        return out

    result = []
    for nested, prob in enum(n):
        counts, depths, gen_sizes = _nested_to_arrays(nested, n)
        result.append((TreeRealization(counts, depths, gen_sizes, n,
                                       nested=nested), prob))
    return result


def enumerate_generation_paths(tree: TreeRealization, n: int) -> list[tuple[int, ...]]:
    """All root-to-generation-n descents as tuples of 0-based child indices."""
    if tree.nested is None:
        raise ValueError("tree lacks nested structure (built by enumerate_trees)")
    paths: list[tuple[int, ...]] = []

    def walk(node, prefix):
        if len(prefix) == n:
            paths.append(tuple(prefix))
            return
        if node is None:
            return
        _, children = node
        for i, child in enumerate(children):
            walk(child, prefix + [i])

    walk(tree.nested, [])
    return paths


def spine_cylinder_probability(dist: OffspringDistribution,
                               tree: TreeRealization,
                               path: tuple[int, ...]) -> float:
    """Exact probability that the spine construction grows this tree's first
    n levels with the distinguished ray following ``path``.

    Each step contributes (size-biased mass of the child count) times the
    uniform 1/k choice of the next spine vertex, times ordinary cylinder
    probabilities for the off-spine descendant trees.
    """
    if tree.nested is None:
        raise ValueError("tree lacks nested structure (built by enumerate_trees)")
    sb = size_biased(dist)
    node = tree.nested
    remaining = tree.horizon
    prob = 1.0
    for idx in path:
        k, children = node
        prob *= float(sb.pmf[k]) / k
        for i, child in enumerate(children):
            if i != idx:
                prob *= _gw_prob_nested(dist, child, remaining - 1)
        node = children[idx]
        remaining -= 1
    return prob


def sizebias_tree_probability(dist: OffspringDistribution,
                              tree: TreeRealization, n: int) -> float:
    """Size-biased cylinder probability: spine probabilities summed over all
    generation-n vertices of the tree."""
    return sum(spine_cylinder_probability(dist, tree, path)
               for path in enumerate_generation_paths(tree, n))


# ---------------------------------------------------------------------------
# spine construction
# ---------------------------------------------------------------------------


def simulate_spines(dist: OffspringDistribution, n: int, reps: int,
                    rng: np.random.Generator) -> SpineBatch:
    """Replicated size-biased trees, summarized per generation.

    At each step the spine vertex receives a size-biased child count, the
    next spine vertex is picked uniformly among the children, and the other
    children root independent ordinary descendant trees.  Off-spine bushes
    are aggregated into two immigration-style populations keyed by whether
    their root sits left or right of the spine, which is all the left/right
    bookkeeping needs.
    """
    if not 0 < dist.mean < math.inf:
        raise ValueError("spine construction requires 0 < mean < inf")
    sb = size_biased(dist)
    lhat = np.zeros((reps, n), dtype=np.int64)
    pos = np.zeros((reps, n), dtype=np.int64)
    z = np.zeros((reps, n + 1), dtype=np.int64)
    right = np.zeros((reps, n + 1), dtype=np.int64)
    z[:, 0] = 1
    right[:, 0] = 1
    left_pop = np.zeros(reps)
    right_pop = np.zeros(reps)
    for j in range(1, n + 1):
        lh = np.asarray(sb.sample(rng, reps), dtype=np.int64)
        pj = rng.integers(1, lh + 1)
        lhat[:, j - 1] = lh
        pos[:, j - 1] = pj
        left_pop = _population_step(dist, left_pop, rng) + (pj - 1)
        right_pop = _population_step(dist, right_pop, rng) + (lh - pj)
        z[:, j] = left_pop.astype(np.int64) + right_pop.astype(np.int64) + 1
        right[:, j] = right_pop.astype(np.int64) + 1
    return SpineBatch(lhat, pos, z, right, z - right)


def simulate_spine(dist: OffspringDistribution, n: int,
                   rng: np.random.Generator) -> SpineRealization:
    """One size-biased tree realization (never extinct)."""
    batch = simulate_spines(dist, n, 1, rng)
    return SpineRealization(n, batch.lhat[0], batch.pos[0], batch.z[0],
                            batch.right[0], batch.left[0])


def spine_as_immigration(spine: SpineRealization) -> ImmigrationPath:
    """Strip the spine: Z_k - 1 evolves as immigration with Y_k = lhat_k - 1."""
    z = (spine.z - 1).astype(float)
    y = (spine.lhat - 1).astype(float)
    return ImmigrationPath(z, y, None, False, None)


def spine_to_csv(spine: SpineRealization, path) -> None:
    """Dump one realization as rows (generation, z, left, right)."""
    import csv
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["generation", "z", "left", "right"])
        for k in range(spine.n + 1):
            writer.writerow([k, int(spine.z[k]), int(spine.left[k]),
                             int(spine.right[k])])


# ---------------------------------------------------------------------------
# immigration
# ---------------------------------------------------------------------------


def simulate_immigrations(offspring: OffspringDistribution, immigration,
                          n: int, reps: int, rng: np.random.Generator, *,
                          cap: float = DEFAULT_CAP,
                          keep_generations: bool = True):
    """Replicated immigration paths: Z_0 = 0, Z_k = offspring(Z_{k-1}) + Y_k.

    ``immigration`` is any object with sample(rng, size); draws must be
    nonnegative integers.  Exceeding ``cap`` sets the saturation flag but the
    dynamics continue stochastically (values clipped at 1e300 only).
    """
    cur = np.zeros(reps)
    z = np.zeros((reps, n + 1)) if keep_generations else None
    saturated = np.zeros(reps, dtype=bool)
    first_sat = np.full(reps, -1, dtype=np.int64)
    for k in range(1, n + 1):
        y = np.asarray(immigration.sample(rng, reps), dtype=float)
        if np.any(y < 0):
            raise ValueError("immigration draws must be nonnegative")
        cur = np.minimum(_population_step(offspring, cur, rng) + y, VALUE_CLIP)
        newly = (cur > cap) & ~saturated
        if newly.any():
            saturated |= newly
            first_sat[newly] = k
        if keep_generations:
            z[:, k] = cur
    if not keep_generations:
        z = cur.reshape(reps, 1)
    return ImmigrationBatch(z, saturated, first_sat)


def simulate_immigration(offspring: OffspringDistribution, immigration,
                         n: int, rng: np.random.Generator, *,
                         cap: float = DEFAULT_CAP) -> ImmigrationPath:
    """One immigration path, with its immigrant counts and Z_k / m^k when m > 1."""
    cur = 0.0
    z = np.zeros(n + 1)
    y_arr = np.zeros(n)
    saturated = False
    first = None
    for k in range(1, n + 1):
        y = float(immigration.sample(rng, 1)[0])
        step = _population_step(offspring, np.array([cur]), rng)[0]
        cur = min(step + y, VALUE_CLIP)
        if cur > cap and not saturated:
            saturated, first = True, k
        z[k] = cur
        y_arr[k - 1] = y
    w = z / offspring.mean ** np.arange(n + 1) if offspring.mean > 1 else None
    return ImmigrationPath(z, y_arr, w, saturated, first)


# ---------------------------------------------------------------------------
# conditioned sampling
# ---------------------------------------------------------------------------


def sample_conditioned_batch(dist: OffspringDistribution, n: int, count: int,
                             rng: np.random.Generator, *,
                             max_attempts: int | None = None
                             ) -> tuple[np.ndarray, int]:
    """``count`` draws of Z_n conditioned on survival, by plain rejection.

    Returns (values, attempts).  Raises RejectionBudgetError when the attempt
    budget is exhausted, which signals that survival at this horizon is too
    rare for rejection sampling.
    """
    if max_attempts is None:
        max_attempts = max(10**6, 500 * count)
    out: list[np.ndarray] = []
    got = 0
    attempts = 0
    block = max(4 * count, 4096)
    while got < count:
        if attempts >= max_attempts:
            raise RejectionBudgetError(
                f"no {count} survivors at depth {n} within {max_attempts} attempts")
        b = int(min(block, max_attempts - attempts))
        final = _terminal_generation(dist, n, b, rng)
        acc = final[final > 0]
        attempts += b
        out.append(acc[:count - got])
        got += min(len(acc), count - got)
        rate = max(got / attempts, 1e-9)
        block = int(np.clip((count - got) / rate * 1.3, 4096, 2**22))
    return np.concatenate(out), attempts


def sample_conditioned(dist: OffspringDistribution, n: int,
                       rng: np.random.Generator, *,
                       max_attempts: int = 10**6) -> int:
    """One draw of Z_n given Z_n > 0."""
    values, _ = sample_conditioned_batch(dist, n, 1, rng,
                                         max_attempts=max_attempts)
    return int(values[0])


# ---------------------------------------------------------------------------
# heavy immigration
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class LogParetoImmigration:
    """Immigration with P[Y >= k] = 1/(1 + log k) for k >= 1.

    E[log+ Y] diverges (the tail of log Y is 1/(1+x)).  Values are capped at
    2^62; ``sample_with_flags`` exposes which draws hit the cap.
    """

    cap_value: float = float(2**62)

    def sample_with_flags(self, rng: np.random.Generator, size=None):
        u = rng.random(size if size is not None else 1)
        logx = 1.0 / u - 1.0
        capped = logx >= math.log(self.cap_value)
        safe = np.where(capped, 0.0, logx)
        y = np.maximum(np.ceil(np.exp(safe)) - 1.0, 1.0)
        y = np.where(capped, self.cap_value, y)
        return (y, capped) if size is not None else (float(y[0]), bool(capped[0]))

    def sample(self, rng: np.random.Generator, size=None):
        y, _ = self.sample_with_flags(rng, size if size is not None else 1)
        return y if size is not None else float(y[0])


def heavy_immigration_sampler(style: str = "log-pareto") -> LogParetoImmigration:
    """Immigration law with infinite E[log+ Y]; only 'log-pareto' is defined."""
    if style != "log-pareto":
        raise ValueError(f"unknown heavy immigration style {style!r}")
    return LogParetoImmigration()


# ---------------------------------------------------------------------------
# random environments
# ---------------------------------------------------------------------------


def simulate_bpre_batch(envs: list[OffspringDistribution], weights, n: int,
                        reps: int, rng: np.random.Generator, *,
                        cap: float = DEFAULT_CAP) -> BpreBatch:
    """Paths in an i.i.d. random environment: one law drawn per generation
    (per replicate) from ``envs``, applied to every particle; the normalizer
    is the running product of the realized means."""
    weights = np.asarray(weights, dtype=float)
    if len(weights) != len(envs) or np.any(weights < 0):
        raise ValueError("weights must be nonnegative, one per environment")
    weights = weights / weights.sum()
    means = np.array([e.mean for e in envs])
    if not np.all(np.isfinite(means)):
        raise ValueError("every environment needs a finite mean")

    cur = np.ones(reps)
    z = np.zeros((reps, n + 1))
    z[:, 0] = 1.0
    m_prod = np.ones((reps, n + 1))
    saturated = np.zeros(reps, dtype=bool)
    for k in range(1, n + 1):
        env_idx = rng.choice(len(envs), size=reps, p=weights)
        nxt = np.empty_like(cur)
        for e in range(len(envs)):
            sel = env_idx == e
            if sel.any():
                nxt[sel] = _population_step(envs[e], cur[sel], rng)
        saturated |= nxt > cap
        cur = nxt
        z[:, k] = cur
        m_prod[:, k] = m_prod[:, k - 1] * means[env_idx]
    return BpreBatch(z, m_prod, saturated)


def simulate_bpre(envs: list[OffspringDistribution], weights, n: int,
                  rng: np.random.Generator, *, cap: float = DEFAULT_CAP
                  ) -> BprePath:
    """One random-environment path with W_k = Z_k / M_k."""
    weights = np.asarray(weights, dtype=float)
    weights = weights / weights.sum()
    means = np.array([e.mean for e in envs])
    cur = 1.0
    z = np.zeros(n + 1)
    z[0] = 1.0
    m_prod = np.ones(n + 1)
    env_indices = np.zeros(n, dtype=np.int64)
    saturated = False
    for k in range(1, n + 1):
        e = int(rng.choice(len(envs), p=weights))
        env_indices[k - 1] = e
        cur = float(_population_step(envs[e], np.array([cur]), rng)[0])
        saturated |= cur > cap
        z[k] = cur
        m_prod[k] = m_prod[k - 1] * means[e]
    return BprePath(z, m_prod, z / m_prod, env_indices, saturated)
