"""Offspring laws with exact moments, sampling, and size-biasing.

Four families are supported:

* ``finite`` -- an arbitrary probability mass array on {0..d};
* ``geometric`` -- P[L = k] = p (1-p)^k on {0, 1, 2, ...};
* ``truncated_poisson`` -- Poisson(rate) restricted to {0..K} and renormalized,
  so its generating function stays a genuine polynomial;
* ``heavy_tail`` -- a mixture of point masses and a tail proportional to
  1 / (k^2 log^2 k) on {2..K}.  The untruncated version of this tail has a
  finite mean but E[L log L] = infinity, which is the divergent side of the
  L log L dichotomies; the ``llogl`` moment is therefore flagged infinite for
  this family (it describes the ideal law, not the truncated realization).

All moment caches are computed eagerly at construction; distributions are
immutable afterwards and safe to share between concurrent samplers.  Random
state is always caller-owned (pass a ``numpy.random.Generator``).
"""

from __future__ import annotations

import math
import weakref
from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "Family",
    "OffspringDistribution",
    "SizeBiasedDistribution",
    "make_finite",
    "make_geometric",
    "make_truncated_poisson",
    "make_heavy_tail",
    "moments",
    "sample",
    "size_biased",
    "law_from_dict",
    "law_to_dict",
]

MASS_TOL = 1e-12


class Family(str, Enum):
    FINITE = "finite"
    GEOMETRIC = "geometric"
    TRUNCATED_POISSON = "truncated_poisson"
    HEAVY_TAIL = "heavy_tail"


def _frozen_array(values) -> np.ndarray:
    arr = np.asarray(values, dtype=float).copy()
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class OffspringDistribution:
    """An offspring law together with its cached exact moments.

    ``pmf`` is the probability mass array on {0..K} for array-backed families
    and ``None`` for the geometric family, which is handled by closed forms.
    ``llogl`` is E[L log+ L]; it is ``inf`` exactly when the family's
    untruncated definition makes the series sum(k log k p_k) diverge.
    """

    family: Family
    pmf: np.ndarray | None
    p: float | None                      # geometric success probability
    mean: float
    variance: float
    llogl: float
    untruncated_mean_bound: float | None = None
    params: dict | None = None

    def __post_init__(self):
        if self.pmf is not None:
            if np.any(self.pmf < 0):
                raise ValueError("probability masses must be nonnegative")
            total = float(self.pmf.sum())
            if abs(total - 1.0) > 1e-9:
                raise ValueError(f"masses must sum to 1, got {total!r}")

    # -- support helpers -------------------------------------------------

    @property
    def max_support(self) -> int | None:
        """Largest k with positive mass, or None for unbounded support."""
        if self.pmf is None:
            return None
        nz = np.nonzero(self.pmf)[0]
        return int(nz[-1]) if len(nz) else 0

    def support_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        """(k, p_k) over the k with p_k > 0.  Geometric raises."""
        if self.pmf is None:
            raise ValueError("geometric laws have unbounded support")
        idx = np.nonzero(self.pmf)[0]
        return idx, self.pmf[idx]

    @property
    def p0(self) -> float:
        if self.pmf is not None:
            return float(self.pmf[0])
        return float(self.p)

    @property
    def p1(self) -> float:
        if self.pmf is not None:
            return float(self.pmf[1]) if len(self.pmf) > 1 else 0.0
        return float(self.p * (1.0 - self.p))

    # -- sampling ---------------------------------------------------------

    def sample(self, rng: np.random.Generator, size=None):
        """Draw offspring counts; inverse transform for array families."""
        if self.family is Family.GEOMETRIC:
            # numpy's geometric counts trials on {1,2,...}; failures = trials-1
            draws = rng.geometric(self.p, size=size) - 1
            return draws if size is not None else int(draws)
        cdf = _cached_cdf(self)
        u = rng.random(size)
        draws = np.searchsorted(cdf, u, side="right")
        return draws if size is not None else int(draws)


# CDF cache keyed weakly by the (immutable) distribution object, so entries
# die with their distribution instead of lingering on recycled ids.
_CDF_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _cached_cdf(dist: OffspringDistribution) -> np.ndarray:
    cdf = _CDF_CACHE.get(dist)
    if cdf is None:
        cdf = np.cumsum(dist.pmf)
        cdf[-1] = 1.0
        _CDF_CACHE[dist] = cdf
    return cdf


@dataclass(frozen=True, eq=False)
class SizeBiasedDistribution:
    """The size-biased companion law, P[L-hat = k] = k p_k / mean.

    Always assigns zero mass to 0; its mean is (variance + mean^2) / mean.
    """

    base: OffspringDistribution
    pmf: np.ndarray | None               # on {0..K}; None for geometric base
    mean: float

    def support_pairs(self) -> tuple[np.ndarray, np.ndarray]:
        if self.pmf is None:
            raise ValueError("geometric size-biased laws have unbounded support")
        idx = np.nonzero(self.pmf)[0]
        return idx, self.pmf[idx]

    def sample(self, rng: np.random.Generator, size=None):
        if self.base.family is Family.GEOMETRIC:
            # size-biased geometric = sum of two iid geometrics plus one
            p = self.base.p
            draws = (rng.geometric(p, size=size) - 1) + (rng.geometric(p, size=size) - 1) + 1
            return draws if size is not None else int(draws)
        cdf = _cached_cdf_sb(self)
        u = rng.random(size)
        draws = np.searchsorted(cdf, u, side="right")
        return draws if size is not None else int(draws)


_SB_CDF_CACHE: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _cached_cdf_sb(dist: SizeBiasedDistribution) -> np.ndarray:
    cdf = _SB_CDF_CACHE.get(dist)
    if cdf is None:
        cdf = np.cumsum(dist.pmf)
        cdf[-1] = 1.0
        _SB_CDF_CACHE[dist] = cdf
    return cdf


# ---------------------------------------------------------------------------
# constructors
# ---------------------------------------------------------------------------


def _array_moments(pmf: np.ndarray) -> tuple[float, float, float]:
    k = np.arange(len(pmf), dtype=float)
    mean = float(pmf @ k)
    var = float(pmf @ k**2 - mean * mean)
    with np.errstate(divide="ignore"):
        logk = np.where(k >= 2, np.log(np.maximum(k, 1.0)), 0.0)
    llogl = float(pmf @ (k * logk))
    return mean, var, llogl


def make_finite(masses) -> OffspringDistribution:
    """Build a finite-support law from a nonnegative mass array (normalized)."""
    arr = np.asarray(masses, dtype=float)
    if arr.ndim != 1 or len(arr) == 0:
        raise ValueError("mass array must be a nonempty 1-d sequence")
    if np.any(arr < 0):
        raise ValueError("negative entry in mass array")
    total = arr.sum()
    if total <= 0:
        raise ValueError("mass array must have at least one positive entry")
    pmf = _frozen_array(arr / total)
    mean, var, llogl = _array_moments(pmf)
    return OffspringDistribution(Family.FINITE, pmf, None, mean, var, llogl,
                                 params={"pmf": [float(x) for x in pmf]})


def make_geometric(p: float) -> OffspringDistribution:
    """Geometric law on {0,1,2,...}: P[L = k] = p (1-p)^k, mean (1-p)/p."""
    if not 0 < p <= 1:
        raise ValueError("success probability must lie in (0, 1]")
    mean = (1.0 - p) / p
    var = (1.0 - p) / p**2
    # E[L log L]: geometric terms decay fast enough to sum directly
    llogl = 0.0
    q_, term_k = 1.0 - p, 2
    weight = p * (1.0 - p) ** 2
    while weight * term_k * math.log(term_k) > 1e-18 or term_k < 64:
        llogl += weight * term_k * math.log(term_k)
        term_k += 1
        weight *= q_
        if term_k > 10**7:
            break
    return OffspringDistribution(Family.GEOMETRIC, None, float(p), mean, var, llogl,
                                 params={"p": float(p)})


def make_truncated_poisson(rate: float, cutoff: int) -> OffspringDistribution:
    """Poisson(rate) truncated to {0..cutoff}, tail renormalized in."""
    if rate <= 0:
        raise ValueError("rate must be positive")
    if cutoff < 1:
        raise ValueError("cutoff must be at least 1")
    k = np.arange(cutoff + 1)
    logpmf = -rate + k * math.log(rate) - np.array([math.lgamma(i + 1) for i in k])
    pmf = np.exp(logpmf)
    pmf /= pmf.sum()
    pmf = _frozen_array(pmf)
    mean, var, llogl = _array_moments(pmf)
    return OffspringDistribution(Family.TRUNCATED_POISSON, pmf, None, mean, var, llogl,
                                 params={"rate": float(rate), "cutoff": int(cutoff)})


def make_heavy_tail(alpha: float, cutoff: int, *, zero_mass: float = 0.0,
                    one_mass: float = 0.0) -> OffspringDistribution:
    """Mixture alpha*delta_2 + (1-alpha) * c/(k^2 log^2 k) on {2..cutoff}.

    The untruncated tail satisfies sum(k p_k) < inf but sum(k log k p_k) = inf,
    so ``llogl`` is flagged infinite whenever the tail carries positive weight.
    The reported mean is the truncated one; ``untruncated_mean_bound`` is an
    upper bound on the ideal (untruncated) mean obtained from integral tail
    estimates.  ``zero_mass``/``one_mass`` optionally mix in point masses at 0
    and 1, which lets the family realize subcritical and near-critical means.
    """
    if not 0 <= alpha <= 1:
        raise ValueError("alpha must lie in [0, 1]")
    if cutoff < 10:
        raise ValueError("cutoff must be at least 10")
    if zero_mass < 0 or one_mass < 0 or zero_mass + one_mass >= 1:
        raise ValueError("point masses must be nonnegative and sum below 1")

    k = np.arange(2, cutoff + 1, dtype=float)
    logk = np.log(k)
    tail = 1.0 / (k**2 * logk**2)
    s_k = tail.sum()                 # normalizer by partial summation
    tail_pmf = tail / s_k

    rest = 1.0 - zero_mass - one_mass
    pmf = np.zeros(cutoff + 1)
    pmf[0] = zero_mass
    pmf[1] = one_mass
    pmf[2:] += rest * (1.0 - alpha) * tail_pmf
    pmf[2] += rest * alpha
    pmf = _frozen_array(pmf)

    mean, var, _ = _array_moments(pmf)

    # untruncated tail-law mean bound: numerator gains at most 1/log K,
    # denominator only grows, so mean_ideal <= (S1 + 1/log K) / S
    s1_k = float((1.0 / (k * logk**2)).sum())
    tail_mean_bound = (s1_k + 1.0 / math.log(cutoff)) / s_k
    mean_bound = one_mass + rest * (2.0 * alpha + (1.0 - alpha) * tail_mean_bound)

    divergent_weight = rest * (1.0 - alpha)
    llogl = math.inf if divergent_weight > 0 else _array_moments(pmf)[2]

    return OffspringDistribution(
        Family.HEAVY_TAIL, pmf, None, mean, var, llogl,
        untruncated_mean_bound=float(mean_bound),
        params={"alpha": float(alpha), "cutoff": int(cutoff),
                "zero_mass": float(zero_mass), "one_mass": float(one_mass)})


# ---------------------------------------------------------------------------
# operations
# ---------------------------------------------------------------------------


def moments(dist: OffspringDistribution) -> tuple[float, float, float]:
    """(mean, variance, E[L log+ L]) as cached at construction."""
    return dist.mean, dist.variance, dist.llogl


def sample(dist, rng: np.random.Generator, size=None):
    """Draw from an offspring or size-biased law with caller-owned rng."""
    return dist.sample(rng, size)


def size_biased(dist: OffspringDistribution) -> SizeBiasedDistribution:
    """The law with mass k p_k / m on {1, 2, ...}; requires 0 < m < inf."""
    if not dist.mean > 0:
        raise ValueError("size-biasing requires a positive mean")
    if not math.isfinite(dist.mean):
        raise ValueError("size-biasing requires a finite mean")
    sb_mean = (dist.variance + dist.mean**2) / dist.mean
    if dist.pmf is None:
        return SizeBiasedDistribution(dist, None, sb_mean)
    k = np.arange(len(dist.pmf), dtype=float)
    pmf = _frozen_array(k * dist.pmf / dist.mean)
    return SizeBiasedDistribution(dist, pmf, sb_mean)


# ---------------------------------------------------------------------------
# config descriptions
# ---------------------------------------------------------------------------


def law_from_dict(desc: dict) -> OffspringDistribution:
    """Build a law from its config description, e.g. {"kind":"finite","pmf":[...]}."""
    if not isinstance(desc, dict) or "kind" not in desc:
        raise ValueError(f"law description must be a dict with a 'kind': {desc!r}")
    kind = desc["kind"]
    if kind == "finite":
        return make_finite(desc["pmf"])
    if kind == "geometric":
        return make_geometric(desc["p"])
    if kind == "truncated_poisson":
        return make_truncated_poisson(desc["rate"], desc["cutoff"])
    if kind == "heavy_tail":
        return make_heavy_tail(desc["alpha"], desc["cutoff"],
                               zero_mass=desc.get("zero_mass", 0.0),
                               one_mass=desc.get("one_mass", 0.0))
    raise ValueError(f"unknown law kind {kind!r}")


def law_to_dict(dist: OffspringDistribution) -> dict:
    """Config description that round-trips through law_from_dict."""
    return {"kind": dist.family.value, **(dist.params or {})}
