import math

import numpy as np
import pytest

from bplab import stats


def rng(seed=0):
    return np.random.default_rng(seed)


class TestReferenceCdfs:
    def test_exponential_endpoints(self):
        f = stats.exponential_cdf(1.0)
        assert f(0.0) == 0.0
        assert f(1e9) == pytest.approx(1.0)
        assert f(1.0) == pytest.approx(1.0 - 1.0 / math.e, abs=1e-15)

    def test_gamma2_values(self):
        g = stats.gamma2_cdf(1.0)
        assert g(0.0) == 0.0
        assert g(1.0) == pytest.approx(1.0 - 2.0 / math.e, abs=1e-15)

    def test_positive_parameters(self):
        with pytest.raises(ValueError):
            stats.exponential_cdf(0.0)
        with pytest.raises(ValueError):
            stats.gamma2_cdf(-1.0)

    def test_gamma2_is_sum_of_two_exponentials(self):
        r = rng(1)
        draws = r.exponential(0.7, 10**5) + r.exponential(0.7, 10**5)
        sample = stats.EmpiricalSample.from_values(draws, sort=True)
        assert stats.ks_statistic(sample, stats.gamma2_cdf(0.7)) <= 0.01


class TestKs:
    def test_self_draw_is_small(self):
        r = rng(2)
        sample = stats.EmpiricalSample.from_values(r.exponential(1.0, 10**5),
                                                   sort=True)
        # 1.5 x the asymptotic 99% critical value 1.36/sqrt(N)
        assert stats.ks_statistic(sample, stats.exponential_cdf(1.0)) <= 0.0065

    def test_point_mass_vs_continuous(self):
        sample = stats.EmpiricalSample.from_values(np.zeros(100))
        assert stats.ks_statistic(sample, stats.exponential_cdf(1.0)) == 1.0

    def test_uniform_vs_exponential_gap(self):
        # sup gap between U[0,1] and Exp(mean 1/2) exceeds 0.1: the analytic
        # maximum of |x - (1 - e^{-2x})| on [0,1] is at x = log(2)/2
        x = math.log(2.0) / 2.0
        analytic = abs(x - (1.0 - math.exp(-2.0 * x)))
        assert analytic > 0.1
        r = rng(3)
        sample = stats.EmpiricalSample.from_values(r.random(10**5), sort=True)
        ks = stats.ks_statistic(sample, stats.exponential_cdf(0.5))
        assert ks > 0.1
        assert ks == pytest.approx(analytic, abs=0.01)

    def test_needs_enough_points(self):
        with pytest.raises(ValueError):
            stats.ks_statistic(stats.EmpiricalSample.from_values([1.0]),
                               stats.exponential_cdf(1.0))

    def test_invariant_under_increasing_transform(self):
        r = rng(4)
        values = r.exponential(1.0, 2000)
        sample = stats.EmpiricalSample.from_values(values, sort=True)
        base = stats.exponential_cdf(1.0)
        transformed = stats.EmpiricalSample.from_values(values**2, sort=True)
        pulled_back = stats.ReferenceCdf("exp under sqrt",
                                         lambda x: base(np.sqrt(x)))
        assert stats.ks_statistic(sample, base) == pytest.approx(
            stats.ks_statistic(transformed, pulled_back), abs=1e-12)

    def test_two_sample_identical(self):
        a = np.arange(1.0, 100.0)
        assert stats.ks_two_sample(a, a.copy()) == 0.0

    def test_two_sample_disjoint(self):
        assert stats.ks_two_sample(np.zeros(50), np.ones(50)) == 1.0


class TestSizeBiasedResample:
    def test_constant_sample(self):
        s = stats.EmpiricalSample.from_values(np.full(100, 3.0))
        out = stats.size_biased_resample(s, rng(5), 1000)
        assert np.all(out.values == 3.0)

    def test_two_point_weights(self):
        s = stats.EmpiricalSample.from_values(np.array([1.0, 3.0]))
        out = stats.size_biased_resample(s, rng(6), 10**5)
        assert abs(np.mean(out.values == 3.0) - 0.75) <= 0.01

    def test_exponential_becomes_gamma2(self):
        r = rng(7)
        s = stats.EmpiricalSample.from_values(r.exponential(1.0, 10**5))
        out = stats.size_biased_resample(s, r, 10**5)
        sample = stats.EmpiricalSample.from_values(out.values, sort=True)
        assert stats.ks_statistic(sample, stats.gamma2_cdf(1.0)) <= 0.01

    def test_all_zero_rejected(self):
        s = stats.EmpiricalSample.from_values(np.zeros(10))
        with pytest.raises(ValueError):
            stats.size_biased_resample(s, rng(8), 10)


class TestPakesKhattree:
    def test_exponential_passes(self):
        r = rng(9)
        s = stats.EmpiricalSample.from_values(r.exponential(0.5, 10**5))
        report = stats.pakes_khattree_test(s, r)
        assert report.passed
        assert report.statistic <= 0.02
        assert report.statistic_name == "KS"
        assert report.threshold == pytest.approx(2 * 1.63 / math.sqrt(10**5))

    def test_pass_rate_over_seeds(self):
        passes = 0
        for seed in range(20):
            r = rng(100 + seed)
            s = stats.EmpiricalSample.from_values(r.exponential(1.0, 10**4))
            passes += stats.pakes_khattree_test(s, r).passed
        assert passes >= 19

    def test_uniform_fails(self):
        # exact law of U * sb(U) has CDF 2t - t^2; sup gap to t is 1/4
        r = rng(10)
        s = stats.EmpiricalSample.from_values(r.random(10**5))
        report = stats.pakes_khattree_test(s, r)
        assert not report.passed
        assert report.statistic >= 0.05
        assert report.statistic == pytest.approx(0.25, abs=0.02)

    def test_constant_fails_hard(self):
        s = stats.EmpiricalSample.from_values(np.full(10**4, 2.0))
        report = stats.pakes_khattree_test(s, rng(11))
        assert not report.passed
        assert report.statistic >= 0.5


class TestClassifyGrowth:
    def _paths(self, fn, n_paths=200, horizon=150):
        ns = np.arange(2 * horizon + 1, dtype=float)
        return np.tile(fn(ns), (n_paths, 1))

    def test_constant_is_sublinear(self):
        paths = self._paths(lambda ns: np.ones_like(ns))
        assert stats.classify_growth(paths, 150) == stats.SUBLINEAR

    def test_quadratic_is_explosive(self):
        paths = self._paths(lambda ns: ns**2)
        assert stats.classify_growth(paths, 150) == stats.EXPLOSIVE

    def test_scale_invariance(self):
        r = rng(12)
        base = np.cumsum(r.random((150, 401)), axis=1)
        assert stats.classify_growth(base, 150) == \
            stats.classify_growth(7.3 * base, 150)

    def test_log_pareto_draws_are_scale_critical(self):
        # P[log Y >= x] = 1/(1+x): the windowed max of X_n/n then has an
        # h-independent 0.9-quantile (about 6.6), computable from the exact
        # product formula, so doubling the horizon changes nothing: the
        # finitized dichotomy is inconclusive for this tail
        r = rng(13)
        u = r.random((1000, 801))
        x = np.maximum(1.0 / u - 1.0, 0.0)
        x[:, 0] = 0.0
        verdict = stats.classify_growth(x, 200)
        assert verdict == stats.INCONCLUSIVE

    def test_validation(self):
        with pytest.raises(ValueError):
            stats.classify_growth(np.ones((200, 500)), 50)
        with pytest.raises(ValueError):
            stats.classify_growth(np.ones((10, 500)), 100)
        with pytest.raises(ValueError):
            stats.classify_growth(np.ones((200, 150)), 100)


class TestMeanCi:
    def test_constant_sample(self):
        s = stats.EmpiricalSample.from_values(np.full(50, 2.0))
        mean, hw = stats.mean_ci(s, 0.99)
        assert mean == 2.0
        assert hw == 0.0

    def test_exponential_coverage(self):
        r = rng(14)
        s = stats.EmpiricalSample.from_values(r.exponential(1.0, 10**5))
        mean, hw = stats.mean_ci(s, 0.99)
        assert abs(mean - 1.0) <= 0.013
        assert hw == pytest.approx(2.5758 / math.sqrt(10**5), rel=0.02)

    def test_two_point_half_width(self):
        values = np.concatenate([np.zeros(5000), np.full(5000, 2.0)])
        s = stats.EmpiricalSample.from_values(values)
        mean, hw = stats.mean_ci(s, 0.99)
        assert mean == 1.0
        sd = math.sqrt(10**4 / (10**4 - 1))
        assert hw == pytest.approx(2.5758293035489004 * sd / 100.0, rel=1e-6)

    def test_validation(self):
        s = stats.EmpiricalSample.from_values([1.0])
        with pytest.raises(ValueError):
            stats.mean_ci(s, 0.99)


class TestEmpiricalSample:
    def test_validation(self):
        with pytest.raises(ValueError):
            stats.EmpiricalSample.from_values([])
        with pytest.raises(ValueError):
            stats.EmpiricalSample.from_values([-1.0, 2.0])

    def test_sorting(self):
        s = stats.EmpiricalSample.from_values([3.0, 1.0, 2.0], sort=True)
        assert s.is_sorted
        assert np.all(np.diff(s.sorted_values()) >= 0)
        u = stats.EmpiricalSample.from_values([3.0, 1.0, 2.0])
        assert np.all(u.sorted_values() == [1.0, 2.0, 3.0])
        assert s.count == 3
