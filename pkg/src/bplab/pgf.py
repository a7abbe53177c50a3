"""Exact generating-function numerics for generation-size laws.

Two computation routes are provided and cross-checked against each other:

* scalar fixed-point iteration of f (extinction probability, survival
  probabilities P[Z_n > 0], and the normalized ratios P[Z_n > 0]/m^n);
* n-fold composition of f as a truncated power series, which yields the full
  law of Z_n on {0..K} plus an explicitly tracked tail mass, so truncation is
  observable rather than silent.

Survival probabilities are iterated directly on s_n = 1 - f^n(0) through the
map s -> 1 - f(1-s), evaluated with expm1/log1p so that tiny survival masses
keep full relative accuracy (1 - f(1-s) cancels catastrophically for small s
if computed literally).
"""

from __future__ import annotations

import csv
import math
import weakref
from dataclasses import dataclass, field

import numpy as np

from .offspring import Family, OffspringDistribution

__all__ = [
    "TruncatedLaw",
    "SurvivalSequence",
    "PgfConvergenceError",
    "pgf_eval",
    "extinction_prob",
    "survival_seq",
    "zn_law",
    "zn_law_sequence",
    "zn_law_captured",
    "conditioned_law",
    "size_bias_law",
    "tv_distance",
    "stochastically_dominates",
    "law_mean",
    "law_to_csv",
]

DEFAULT_K = 4096
MAX_K = 2**20
CAPTURE_TAIL = 1e-9


class PgfConvergenceError(RuntimeError):
    """Fixed-point iteration failed to converge; carries the last iterate."""

    def __init__(self, message: str, last: float):
        super().__init__(f"{message} (last iterate {last!r})")
        self.last = last


@dataclass(frozen=True, eq=False)
class TruncatedLaw:
    """A probability mass array on {0..K} plus explicit beyond-K tail mass."""

    masses: np.ndarray
    tail: float
    n: int
    provenance: dict = field(default_factory=dict)

    def __post_init__(self):
        total = float(self.masses.sum()) + self.tail
        if abs(total - 1.0) > 1e-9:
            raise ValueError(f"masses + tail must be 1, got {total!r}")
        if self.tail < -1e-15 or np.any(self.masses < -1e-15):
            raise ValueError("negative probability mass")

    @property
    def k_max(self) -> int:
        return len(self.masses) - 1

    def cdf(self) -> np.ndarray:
        return np.cumsum(self.masses)


@dataclass(frozen=True, eq=False)
class SurvivalSequence:
    """s[n] = P[Z_n > 0] for n = 0..N, with ratios[n] = s[n] / m^n."""

    s: np.ndarray
    ratios: np.ndarray


# ---------------------------------------------------------------------------
# scalar route
# ---------------------------------------------------------------------------


def pgf_eval(dist: OffspringDistribution, s: float) -> float:
    """f(s) = sum p_k s^k; closed form for geometric, else over the support."""
    if not 0.0 <= s <= 1.0:
        raise ValueError(f"pgf argument must lie in [0, 1], got {s!r}")
    if dist.family is Family.GEOMETRIC:
        p = dist.p
        return p / (1.0 - (1.0 - p) * s)
    ks, ps = dist.support_pairs()
    if len(ks) <= 64:
        # Horner over the dense coefficient array
        acc = 0.0
        for c in dist.pmf[::-1]:
            acc = acc * s + c
        return float(acc)
    return float(ps @ np.power(s, ks.astype(float)))


_SURV_PAIRS: weakref.WeakKeyDictionary = weakref.WeakKeyDictionary()


def _survival_pairs(dist: OffspringDistribution):
    cached = _SURV_PAIRS.get(dist)
    if cached is None:
        ks, ps = dist.support_pairs()
        keep = ks >= 1
        ks, ps = ks[keep].astype(float), ps[keep]
        cached = (list(zip(ks.tolist(), ps.tolist())), ks, ps)
        _SURV_PAIRS[dist] = cached
    return cached


def survival_step(dist: OffspringDistribution, s: float) -> float:
    """One step of s -> 1 - f(1-s), stable down to denormal survival masses."""
    if s <= 0.0:
        return 0.0
    if dist.family is Family.GEOMETRIC:
        p = dist.p
        return (1.0 - p) * s / (p + (1.0 - p) * s)
    if s >= 1.0:
        return 1.0 - dist.p0
    t = math.log1p(-s)
    pairs, ks, ps = _survival_pairs(dist)
    if len(pairs) <= 8:
        acc = 0.0
        for k, p_k in pairs:
            acc += p_k * math.expm1(k * t)
        return -acc
    return float(-(ps @ np.expm1(ks * t)))


def extinction_prob(dist: OffspringDistribution, tol: float = 1e-14,
                    max_iter: int = 10**7) -> float:
    """Smallest fixed point of f in [0,1], the limit of P[Z_n = 0].

    For m <= 1 the answer is exact: 1 unless the law is the point mass at one
    child (p_1 = 1), whose line never dies, where 0 is returned.
    """
    if dist.mean <= 1.0:
        return 1.0 if dist.p1 < 1.0 else 0.0
    q = 0.0
    for _ in range(max_iter):
        q_next = pgf_eval(dist, q)
        if abs(q_next - q) < tol:
            return float(q_next)
        q = q_next
    raise PgfConvergenceError("extinction iteration did not converge", q)


def survival_seq(dist: OffspringDistribution, n_max: int) -> SurvivalSequence:
    """Exact scalar iteration of P[Z_n > 0] and the ratios P[Z_n > 0]/m^n."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    s_arr = np.empty(n_max + 1)
    r_arr = np.empty(n_max + 1)
    s_arr[0] = 1.0
    r_arr[0] = 1.0
    s = 1.0
    for n in range(1, n_max + 1):
        s_prev = s
        s = survival_step(dist, s)
        # multiplicative update keeps ratios finite where m^n would overflow
        r_arr[n] = r_arr[n - 1] * ((s / s_prev) / dist.mean if s_prev > 0 else 0.0)
        s_arr[n] = s
    return SurvivalSequence(s_arr, r_arr)


# ---------------------------------------------------------------------------
# truncated-series route
# ---------------------------------------------------------------------------


def _series_mul(a: np.ndarray, ta: float, b: np.ndarray, tb: float,
                k_max: int) -> tuple[np.ndarray, float]:
    """Product in the ring of length-(K+1) series with tail bookkeeping.

    Spilled coefficients (degree > K) and all tail cross terms go to the tail
    scalar, so total mass is preserved exactly: total(out) = total(a)*total(b).
    """
    if k_max <= 8192:
        full = np.convolve(a, b)
    else:
        from scipy.signal import fftconvolve
        full = np.maximum(fftconvolve(a, b), 0.0)
    c = full[:k_max + 1]
    if len(c) < k_max + 1:
        c = np.pad(c, (0, k_max + 1 - len(c)))
    spill = float(full[k_max + 1:].sum())
    t = ta * (float(b.sum()) + tb) + tb * float(a.sum()) + spill
    return c, t


def zn_law(dist: OffspringDistribution, n: int, k_max: int = DEFAULT_K) -> TruncatedLaw:
    """Law of Z_n on {0..K}: coefficients of the n-fold composition of f.

    Composition is evaluated by Horner in the truncated-series ring, one
    offspring coefficient at a time, with explicit tail accounting.  Requires
    an array-backed law (finite support or a truncated family).
    """
    if dist.pmf is None:
        raise ValueError("zn_law requires a finite-support or truncated law")
    if k_max < 1:
        raise ValueError("k_max must be at least 1")
    pmf = dist.pmf
    base = np.zeros(k_max + 1)
    upto = min(len(pmf), k_max + 1)
    base[:upto] = pmf[:upto]
    base_tail = float(pmf[upto:].sum())

    if n == 0:
        masses = np.zeros(k_max + 1)
        masses[1] = 1.0
        return TruncatedLaw(masses, 0.0, 0, _prov(dist, 0, k_max, 0.0))

    series, tail = base.copy(), base_tail
    coeffs = pmf[::-1]
    for _ in range(n - 1):
        acc = np.zeros(k_max + 1)
        acc[0] = coeffs[0]
        acc_tail = 0.0
        for c in coeffs[1:]:
            acc, acc_tail = _series_mul(acc, acc_tail, series, tail, k_max)
            acc[0] += c
        series, tail = acc, acc_tail
    tail = max(float(tail), 0.0)
    return TruncatedLaw(series, tail, n, _prov(dist, n, k_max, tail))


def _prov(dist: OffspringDistribution, n: int, k_max: int, tail: float) -> dict:
    prov = {"law": dist.family.value, "params": dist.params, "n": n, "k_max": k_max}
    if tail > 0.5:
        prov["warning"] = "tail mass exceeds 0.5; K too small to hold the law"
    return prov


def zn_law_sequence(dist: OffspringDistribution, n_max: int,
                    k_max: int = DEFAULT_K):
    """Yield (n, law of Z_n) for n = 1..n_max by incremental composition."""
    if dist.pmf is None:
        raise ValueError("zn_law_sequence requires an array-backed law")
    pmf = dist.pmf
    series = np.zeros(k_max + 1)
    upto = min(len(pmf), k_max + 1)
    series[:upto] = pmf[:upto]
    tail = float(pmf[upto:].sum())
    coeffs = pmf[::-1]
    yield 1, TruncatedLaw(series.copy(), tail, 1, _prov(dist, 1, k_max, tail))
    for n in range(2, n_max + 1):
        acc = np.zeros(k_max + 1)
        acc[0] = coeffs[0]
        acc_tail = 0.0
        for c in coeffs[1:]:
            acc, acc_tail = _series_mul(acc, acc_tail, series, tail, k_max)
            acc[0] += c
        series, tail = acc, max(float(acc_tail), 0.0)
        yield n, TruncatedLaw(series.copy(), tail, n, _prov(dist, n, k_max, tail))


def zn_law_captured(dist: OffspringDistribution, n: int, k_start: int = DEFAULT_K,
                    k_limit: int = MAX_K, tail_tol: float = CAPTURE_TAIL) -> TruncatedLaw:
    """zn_law with K doubled until the tail is below tail_tol (or K hits k_limit)."""
    k = k_start
    while True:
        law = zn_law(dist, n, k)
        if law.tail <= tail_tol or k >= k_limit:
            return law
        k *= 2


def conditioned_law(law: TruncatedLaw) -> TruncatedLaw:
    """The law conditioned on {Z_n > 0}: zero out 0, renormalize.

    Renormalization is well conditioned down to the bottom of the float
    range, and deep-subcritical laws legitimately reach survival masses like
    1e-60, so only vanishing survival is rejected.
    """
    survival = float(law.masses[1:].sum()) + law.tail
    if survival < 1e-300:
        raise ValueError("conditioning needs positive survival mass")
    masses = law.masses.copy()
    masses[0] = 0.0
    masses /= survival
    prov = dict(law.provenance)
    prov["conditioned"] = True
    return TruncatedLaw(masses, law.tail / survival, law.n, prov)


def size_bias_law(law: TruncatedLaw, mean_pow_n: float) -> TruncatedLaw:
    """Size-biased generation law: mass k * P[Z_n = k] / m^n.

    Requires essentially captured support (tail < 1e-9), since size-biasing
    amplifies whatever mass sits beyond K.
    """
    if law.tail >= CAPTURE_TAIL:
        raise ValueError(f"tail {law.tail!r} too large to size-bias safely")
    k = np.arange(len(law.masses), dtype=float)
    masses = k * law.masses / mean_pow_n
    total = float(masses.sum())
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"size-biased masses sum to {total!r}, expected 1")
    if total > 1.0:
        masses /= total
        total = 1.0
    prov = dict(law.provenance)
    prov["size_biased"] = True
    return TruncatedLaw(masses, 1.0 - total, law.n, prov)


# ---------------------------------------------------------------------------
# comparisons
# ---------------------------------------------------------------------------


def _common_k(a: TruncatedLaw, b: TruncatedLaw) -> tuple[np.ndarray, np.ndarray]:
    # laws of different effective support compare at the larger K by zero-extension
    k = max(a.k_max, b.k_max)
    ma = np.pad(a.masses, (0, k - a.k_max))
    mb = np.pad(b.masses, (0, k - b.k_max))
    return ma, mb


def tv_distance(a: TruncatedLaw, b: TruncatedLaw) -> float:
    """Total variation distance: half the L1 gap, tail masses included."""
    ma, mb = _common_k(a, b)
    return 0.5 * float(np.abs(ma - mb).sum()) + 0.5 * abs(a.tail - b.tail)


def stochastically_dominates(b: TruncatedLaw, a: TruncatedLaw,
                             slack: float = 1e-12) -> bool:
    """True iff b is stochastically at least a: CDF_b <= CDF_a + slack everywhere."""
    ma, mb = _common_k(a, b)
    cdf_a, cdf_b = np.cumsum(ma), np.cumsum(mb)
    return bool(np.all(cdf_b <= cdf_a + slack) and b.tail >= a.tail - slack)


def law_mean(law: TruncatedLaw) -> float:
    """Mean over the captured support {0..K}; meaningful when tail is tiny."""
    k = np.arange(len(law.masses), dtype=float)
    return float(law.masses @ k)


def law_to_csv(law: TruncatedLaw, path) -> None:
    """Serialize as rows (k, mass) with a trailing tail row."""
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["k", "mass"])
        for k, mass in enumerate(law.masses):
            writer.writerow([k, repr(float(mass))])
        writer.writerow(["tail", repr(float(law.tail))])
