import math

import numpy as np
import pytest

from bplab import offspring as off
from bplab import pgf

CRITICAL = off.make_finite([0.5, 0.0, 0.5])
SUPER = off.make_finite([0.25, 0.0, 0.75])
SUB = off.make_finite([0.75, 0.0, 0.25])
LINE = off.make_finite([0.0, 1.0])


def law_by_convolution(pmf, n, k_max):
    """Independent oracle for the law of Z_n: probabilistic recursion
    P[Z_{t+1} = j] = sum_z P[Z_t = z] (pmf^{*z})[j], no generating functions."""
    pmf = np.asarray(pmf, dtype=float)
    conv_pows = [np.zeros(k_max + 1)]
    conv_pows[0][0] = 1.0
    for _ in range(k_max):
        nxt = np.convolve(conv_pows[-1], pmf)[:k_max + 1]
        conv_pows.append(nxt)
    cur = np.zeros(k_max + 1)
    cur[1] = 1.0
    for _ in range(n):
        cur = sum(cur[z] * conv_pows[z] for z in range(k_max + 1))
    return cur


class TestPgfEval:
    def test_total_mass(self):
        for d in (CRITICAL, SUPER, off.make_geometric(0.3),
                  off.make_truncated_poisson(2.0, 30)):
            assert pgf.pgf_eval(d, 1.0) == pytest.approx(1.0, abs=1e-12)

    def test_values(self):
        assert pgf.pgf_eval(CRITICAL, 0.5) == pytest.approx(0.625, abs=1e-15)
        assert pgf.pgf_eval(off.make_geometric(0.5), 0.0) == pytest.approx(0.5)
        # geometric closed form 1/(2-s)
        for s in (0.0, 0.3, 0.9, 1.0):
            assert pgf.pgf_eval(off.make_geometric(0.5), s) == \
                pytest.approx(1.0 / (2.0 - s), abs=1e-12)

    def test_domain(self):
        with pytest.raises(ValueError):
            pgf.pgf_eval(CRITICAL, -0.1)
        with pytest.raises(ValueError):
            pgf.pgf_eval(CRITICAL, 1.1)

    def test_wide_support_matches_horner(self):
        d = off.make_heavy_tail(0.5, 2000)
        k = np.arange(len(d.pmf), dtype=float)
        for s in (0.2, 0.7, 0.99):
            assert pgf.pgf_eval(d, s) == pytest.approx(
                float(d.pmf @ s**k), rel=1e-12)


class TestExtinction:
    def test_supercritical_root(self):
        # smaller root of (3/4) s^2 - s + 1/4 = 0
        assert pgf.extinction_prob(SUPER) == pytest.approx(1.0 / 3.0, abs=1e-12)

    def test_geometric_supercritical(self):
        # q = p/(1-p) for geometric with p < 1/2
        assert pgf.extinction_prob(off.make_geometric(1.0 / 3.0)) == \
            pytest.approx(0.5, abs=1e-12)

    def test_critical_and_subcritical_die(self):
        assert pgf.extinction_prob(CRITICAL) == 1.0
        assert pgf.extinction_prob(SUB) == 1.0
        assert pgf.extinction_prob(off.make_geometric(0.5)) == 1.0

    def test_deterministic_line_survives(self):
        assert pgf.extinction_prob(LINE) == 0.0


class TestSurvivalSeq:
    def test_critical_geometric_closed_form(self):
        # s_n (n+1) = 1 for the critical geometric law
        seq = pgf.survival_seq(off.make_geometric(0.5), 1000)
        n = np.arange(1001)
        assert np.max(np.abs(seq.s * (n + 1) - 1.0)) < 1e-9

    def test_starts_at_one(self):
        seq = pgf.survival_seq(CRITICAL, 10)
        assert seq.s[0] == 1.0
        assert seq.ratios[0] == 1.0
        assert np.all(np.diff(seq.s) <= 0)

    def test_deterministic_line(self):
        seq = pgf.survival_seq(LINE, 50)
        assert np.all(seq.s == 1.0)
        assert np.all(seq.ratios == 1.0)

    def test_critical_binary_kolmogorov_scale(self):
        n = 10**5
        seq = pgf.survival_seq(CRITICAL, n)
        assert 1.97 <= n * seq.s[n] <= 2.01

    @pytest.mark.parametrize("dist", [CRITICAL, SUPER, SUB, LINE,
                                      off.make_geometric(0.5),
                                      off.make_geometric(0.4)])
    def test_ratios_nonincreasing(self, dist):
        seq = pgf.survival_seq(dist, 500)
        assert float(np.max(np.diff(seq.ratios))) <= 1e-13


class TestZnLaw:
    def test_one_generation_is_offspring_law(self):
        law = pgf.zn_law(CRITICAL, 1, 2)
        assert np.allclose(law.masses, [0.5, 0.0, 0.5], atol=1e-15)
        assert law.tail == 0.0

    def test_two_generations_match_enumeration(self):
        # brute-force over the five two-level trees of the binary law
        law = pgf.zn_law(CRITICAL, 2, 4)
        assert np.allclose(law.masses, [5 / 8, 0.0, 1 / 4, 0.0, 1 / 8],
                           atol=1e-15)

    def test_point_mass_line(self):
        law = pgf.zn_law(LINE, 7, 4)
        assert law.masses[1] == pytest.approx(1.0, abs=1e-15)

    def test_zero_generations(self):
        law = pgf.zn_law(CRITICAL, 0, 4)
        assert law.masses[1] == 1.0

    @pytest.mark.parametrize("pmf,n", [
        ([0.5, 0.0, 0.5], 3),
        ([0.25, 0.25, 0.5], 4),
        ([0.75, 0.0, 0.25], 4),
        ([0.2, 0.5, 0.3], 3),
    ])
    def test_matches_convolution_oracle(self, pmf, n):
        k_max = 2**n + 8
        law = pgf.zn_law(off.make_finite(pmf), n, k_max)
        oracle = law_by_convolution(pmf, n, k_max)
        assert np.max(np.abs(law.masses - oracle)) < 1e-12

    @pytest.mark.parametrize("dist", [CRITICAL, SUPER, SUB])
    def test_constant_term_matches_scalar_iterate(self, dist):
        for n in (1, 5, 10, 20):
            law = pgf.zn_law(dist, n, 64)
            q = 0.0
            for _ in range(n):
                q = pgf.pgf_eval(dist, q)
            assert abs(law.masses[0] - q) < 1e-10

    def test_mass_conservation_with_tail(self):
        law = pgf.zn_law(SUPER, 12, 64)     # growth pushes mass past K=64
        assert law.tail > 0
        assert abs(law.masses.sum() + law.tail - 1.0) < 1e-12

    def test_mean_identity_when_captured(self):
        law = pgf.zn_law(SUPER, 10, 4096)
        assert law.tail < 1e-12
        assert pgf.law_mean(law) == pytest.approx(SUPER.mean**10, rel=1e-8)

    def test_tail_warning_flag(self):
        law = pgf.zn_law(SUPER, 40, 8)
        assert law.tail > 0.5
        assert "warning" in law.provenance

    def test_captured_doubles_k(self):
        law = pgf.zn_law_captured(SUPER, 12, k_start=64)
        assert law.tail <= 1e-9
        assert law.k_max > 64

    def test_sequence_agrees_with_direct(self):
        for n, law in pgf.zn_law_sequence(SUB, 6, 64):
            direct = pgf.zn_law(SUB, n, 64)
            assert np.max(np.abs(law.masses - direct.masses)) < 1e-14


class TestConditionedLaw:
    def test_small_example(self):
        law = pgf.TruncatedLaw(np.array([0.5, 0.5]), 0.0, 1)
        mu = pgf.conditioned_law(law)
        assert np.allclose(mu.masses, [0.0, 1.0])

    def test_point_mass_at_zero_errors(self):
        law = pgf.TruncatedLaw(np.array([1.0, 0.0]), 0.0, 1)
        with pytest.raises(ValueError):
            pgf.conditioned_law(law)

    def test_matches_enumeration_oracle(self):
        oracle = law_by_convolution([0.5, 0.0, 0.5], 2, 8)
        oracle[0] = 0.0
        oracle /= oracle.sum()
        mu = pgf.conditioned_law(pgf.zn_law(CRITICAL, 2, 8))
        assert np.max(np.abs(mu.masses - oracle)) < 1e-14

    def test_deep_subcritical_conditioning(self):
        # survival ~ 1e-61 at n = 200; renormalization stays well conditioned
        law = next(l for n, l in pgf.zn_law_sequence(SUB, 200, 64) if n == 200)
        mu = pgf.conditioned_law(law)
        assert abs(mu.masses.sum() + mu.tail - 1.0) < 1e-9


class TestSizeBiasLaw:
    def test_point_mass_at_one(self):
        law = pgf.TruncatedLaw(np.array([0.0, 1.0]), 0.0, 1)
        sb = pgf.size_bias_law(law, 1.0)
        assert sb.masses[1] == pytest.approx(1.0)

    def test_one_generation_binary(self):
        sb = pgf.size_bias_law(pgf.zn_law(CRITICAL, 1, 4), CRITICAL.mean)
        assert sb.masses[2] == pytest.approx(1.0, abs=1e-12)

    def test_rejects_fat_tail(self):
        law = pgf.zn_law(SUPER, 12, 64)
        with pytest.raises(ValueError):
            pgf.size_bias_law(law, SUPER.mean**12)

    def test_critical_mean_identity(self):
        # E[Z_n^2] = 1 + sigma^2 n at criticality, so the size-biased mean
        # must equal 1 + n
        n = 16
        law = pgf.zn_law(CRITICAL, n, 4096)
        sb = pgf.size_bias_law(law, 1.0)
        assert pgf.law_mean(sb) == pytest.approx(1.0 + n, rel=1e-6)


class TestComparisons:
    def test_tv_basics(self):
        a = pgf.zn_law(CRITICAL, 2, 8)
        assert pgf.tv_distance(a, a) == 0.0
        p0 = pgf.TruncatedLaw(np.array([1.0, 0.0]), 0.0, 0)
        p1 = pgf.TruncatedLaw(np.array([0.0, 1.0]), 0.0, 0)
        assert pgf.tv_distance(p0, p1) == pytest.approx(1.0)
        assert pgf.tv_distance(p0, p1) == pgf.tv_distance(p1, p0)

    def test_tv_triangle(self):
        laws = [pgf.conditioned_law(l)
                for _, l in pgf.zn_law_sequence(SUB, 3, 32)]
        d01 = pgf.tv_distance(laws[0], laws[1])
        d12 = pgf.tv_distance(laws[1], laws[2])
        d02 = pgf.tv_distance(laws[0], laws[2])
        assert d02 <= d01 + d12 + 1e-15

    def test_tv_zero_extends_mismatched_k(self):
        a = pgf.TruncatedLaw(np.array([0.5, 0.5]), 0.0, 1)
        b = pgf.TruncatedLaw(np.array([0.5, 0.5, 0.0, 0.0]), 0.0, 1)
        assert pgf.tv_distance(a, b) == 0.0

    def test_dominance(self):
        p2 = pgf.TruncatedLaw(np.array([0.0, 0.0, 1.0, 0.0]), 0.0, 0)
        p3 = pgf.TruncatedLaw(np.array([0.0, 0.0, 0.0, 1.0]), 0.0, 0)
        assert pgf.stochastically_dominates(p2, p2)
        assert pgf.stochastically_dominates(p3, p2)
        assert not pgf.stochastically_dominates(p2, p3)

    def test_conditioned_laws_increase(self):
        laws = {n: pgf.conditioned_law(l)
                for n, l in pgf.zn_law_sequence(SUB, 2, 32)}
        assert pgf.stochastically_dominates(laws[2], laws[1])

    def test_tv_mu5_mu4_pinned(self):
        # frozen from the series route; cross-checked against the
        # convolution-recursion oracle below
        laws = {n: l for n, l in pgf.zn_law_sequence(SUB, 5, 64)}
        tv = pgf.tv_distance(pgf.conditioned_law(laws[5]),
                             pgf.conditioned_law(laws[4]))
        assert tv == pytest.approx(0.010023650862475125, abs=1e-12)

        def conditioned_oracle(n):
            raw = law_by_convolution([0.75, 0.0, 0.25], n, 64)
            raw[0] = 0.0
            return raw / raw.sum()
        mu4, mu5 = conditioned_oracle(4), conditioned_oracle(5)
        assert tv == pytest.approx(0.5 * np.abs(mu5 - mu4).sum(), abs=1e-12)


def test_law_to_csv(tmp_path):
    law = pgf.zn_law(CRITICAL, 2, 4)
    path = tmp_path / "law.csv"
    pgf.law_to_csv(law, path)
    lines = path.read_text().strip().splitlines()
    assert lines[0] == "k,mass"
    assert len(lines) == 2 + 5      # header + masses + tail row
    assert lines[-1].startswith("tail,")
    assert float(lines[1].split(",")[1]) == pytest.approx(5 / 8)
