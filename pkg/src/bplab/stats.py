"""Statistical verification layer: empirical samples, Kolmogorov-Smirnov
goodness of fit against exponential and Gamma(2) references, the
Pakes-Khattree exponential characterization test, the growth-dichotomy path
classifier, and normal-approximation confidence intervals.

Pass/fail thresholds are fixed constants chosen per experiment, not
p-values, so verdicts are reproducible for a given seed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.special import ndtri

__all__ = [
    "EmpiricalSample",
    "GofReport",
    "ReferenceCdf",
    "ks_statistic",
    "ks_two_sample",
    "exponential_cdf",
    "gamma2_cdf",
    "size_biased_resample",
    "pakes_khattree_test",
    "classify_growth",
    "mean_ci",
    "SUBLINEAR",
    "EXPLOSIVE",
    "INCONCLUSIVE",
]

SUBLINEAR = "sublinear-limsup"
EXPLOSIVE = "linear-explosive"
INCONCLUSIVE = "inconclusive"


@dataclass(frozen=True, eq=False)
class EmpiricalSample:
    """A sample of nonnegative reals, optionally pre-sorted."""

    values: np.ndarray
    is_sorted: bool
    count: int

    @classmethod
    def from_values(cls, values, sort: bool = False) -> "EmpiricalSample":
        arr = np.asarray(values, dtype=float)
        if arr.ndim != 1 or len(arr) == 0:
            raise ValueError("sample must be a nonempty 1-d array")
        if np.any(arr < 0):
            raise ValueError("sample values must be nonnegative")
        if sort:
            arr = np.sort(arr)
        return cls(arr, sort, len(arr))

    def sorted_values(self) -> np.ndarray:
        return self.values if self.is_sorted else np.sort(self.values)


@dataclass(frozen=True)
class GofReport:
    statistic_name: str
    statistic: float
    sample_size: int
    reference: str
    threshold: float
    verdict: str                     # "pass" | "fail"

    @property
    def passed(self) -> bool:
        return self.verdict == "pass"


@dataclass(frozen=True)
class ReferenceCdf:
    """A reference distribution function with a printable description."""

    description: str
    fn: Callable[[np.ndarray], np.ndarray]

    def __call__(self, x):
        return self.fn(np.asarray(x, dtype=float))


def exponential_cdf(mean: float) -> ReferenceCdf:
    """F(x) = 1 - exp(-x/mean) on x >= 0."""
    if mean <= 0:
        raise ValueError("mean must be positive")

    def fn(x):
        t = np.maximum(x, 0.0) / mean
        return -np.expm1(-t)

    return ReferenceCdf(f"Exponential(mean={mean})", fn)


def gamma2_cdf(scale: float) -> ReferenceCdf:
    """Gamma with shape 2: F(x) = 1 - exp(-x/scale)(1 + x/scale).

    This is the law of the sum of two independent exponentials with mean
    ``scale`` each.
    """
    if scale <= 0:
        raise ValueError("scale must be positive")

    def fn(x):
        t = np.maximum(x, 0.0) / scale
        return -np.expm1(-t) - np.exp(-t) * t

    return ReferenceCdf(f"Gamma(shape=2, scale={scale})", fn)


def ks_statistic(sample: EmpiricalSample, cdf: ReferenceCdf) -> float:
    """One-sample KS statistic sup |F_emp - F| over the sample points."""
    if sample.count < 10:
        raise ValueError("KS statistic needs at least 10 points")
    x = sample.sorted_values()
    n = sample.count
    f = np.asarray(cdf(x), dtype=float)
    upper = np.arange(1, n + 1) / n - f
    lower = f - np.arange(0, n) / n
    return float(max(upper.max(), lower.max()))


def ks_two_sample(a: np.ndarray, b: np.ndarray) -> float:
    """Two-sample KS statistic sup |F_a - F_b|."""
    xa, xb = np.sort(a), np.sort(b)
    grid = np.concatenate([xa, xb])
    fa = np.searchsorted(xa, grid, side="right") / len(xa)
    fb = np.searchsorted(xb, grid, side="right") / len(xb)
    return float(np.abs(fa - fb).max())


def size_biased_resample(sample: EmpiricalSample, rng: np.random.Generator,
                         m: int) -> EmpiricalSample:
    """Resample with value-proportional weights: index i with weight x_i."""
    total = float(sample.values.sum())
    if total <= 0:
        raise ValueError("size-biased resampling needs a positive value")
    w = sample.values / total
    draws = rng.choice(sample.values, size=m, p=w)
    return EmpiricalSample.from_values(draws)


def pakes_khattree_test(sample: EmpiricalSample, rng: np.random.Generator,
                        *, resample_size: int | None = None) -> GofReport:
    """Exponentiality test: U times a size-biased resample should match the
    sample in law exactly when the sample's law is exponential.

    Two-sample KS between the sample and U * X-hat, compared against the
    fixed threshold 2 * 1.63 / sqrt(N).
    """
    if sample.count < 10:
        raise ValueError("test needs at least 10 points")
    if float(sample.values.mean()) <= 0:
        raise ValueError("test needs a positive-mean sample")
    m = resample_size or sample.count
    xhat = size_biased_resample(sample, rng, m)
    u = rng.random(m)
    product = u * xhat.values
    stat = ks_two_sample(sample.values, product)
    threshold = 2.0 * 1.63 / math.sqrt(sample.count)
    verdict = "pass" if stat <= threshold else "fail"
    return GofReport("KS", stat, sample.count,
                     "U * size-biased resample vs sample", threshold, verdict)


def classify_growth(paths, horizon: int) -> str:
    """Growth dichotomy for the per-path quantity X_n, finitized.

    Per path, take the maximum of X_n / n over the window [horizon/2,
    horizon].  If the 0.9-quantile of that maximum halves when the horizon
    doubles the verdict is sublinear; if it doubles, explosive; otherwise
    inconclusive.  Paths must extend to 2 * horizon.  Both comparisons are
    ratios, so the verdict is invariant under positive rescaling of X.
    """
    if horizon < 100:
        raise ValueError("horizon must be at least 100")
    arr = np.asarray(paths, dtype=float)
    if arr.ndim != 2 or arr.shape[0] < 100:
        raise ValueError("need at least 100 paths")
    if arr.shape[1] < 2 * horizon + 1:
        raise ValueError("paths must extend to twice the horizon")

    def windowed_max_q(h: int) -> float:
        ns = np.arange(h // 2, h + 1)
        v = (arr[:, ns] / ns).max(axis=1)
        return float(np.quantile(v, 0.9))

    q1 = windowed_max_q(horizon)
    q2 = windowed_max_q(2 * horizon)
    if q2 <= q1 / 2:
        return SUBLINEAR
    if q2 >= 2 * q1:
        return EXPLOSIVE
    return INCONCLUSIVE


def mean_ci(sample: EmpiricalSample, confidence: float) -> tuple[float, float]:
    """Normal-approximation interval: (mean, z * s / sqrt(N))."""
    if sample.count < 2:
        raise ValueError("interval needs at least two points")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    mean = float(sample.values.mean())
    sd = float(sample.values.std(ddof=1))
    z = float(ndtri(0.5 + confidence / 2.0))
    return mean, z * sd / math.sqrt(sample.count)
