import math

import numpy as np
import pytest
from scipy import stats

from disttest.distances import chi2, hellinger, kl, l2, tv
from disttest.distributions import DiscreteDistribution, DistributionSampler, MixedSampler, make_rng, uniform
from disttest.instances import (
    Family,
    InstanceSpec,
    chi2_reduction,
    hellinger_far_blocks,
    kl_untestable_pair,
    l2_near_pair,
    paninski_pair,
    paninski_tv_for_hellinger,
)

import oracles


class TestPaninski:
    @pytest.mark.parametrize("eps", [0.0, 0.1, 0.3, 0.5])
    def test_exact_tv(self, eps):
        q, p = paninski_pair(500, eps, 4)
        assert q == uniform(500)
        assert tv(p, q) == pytest.approx(eps, abs=1e-12)
        assert chi2(p, q) == pytest.approx(4 * eps**2, abs=1e-12)

    @pytest.mark.parametrize("n, eps", [(5, 0.1), (0, 0.1), (4, 0.6), (4, -0.1)])
    def test_invalid(self, n, eps):
        with pytest.raises(ValueError):
            paninski_pair(n, eps)

    def test_seed_changes_signs(self):
        assert paninski_pair(100, 0.2, 1)[1] != paninski_pair(100, 0.2, 2)[1]

    @pytest.mark.parametrize("h", [0.0, 0.05, 0.2, 0.35, 0.5])
    def test_hellinger_calibration(self, h):
        q, p = paninski_pair(50, paninski_tv_for_hellinger(h), 0)
        assert hellinger(p, q) == pytest.approx(h, abs=1e-12)

    def test_hellinger_calibration_range(self):
        with pytest.raises(ValueError):
            paninski_tv_for_hellinger(0.6)


class TestL2Near:
    def test_zero(self):
        q, p = l2_near_pair(10, 0.0)
        assert p == q

    def test_single_pair_shift(self):
        q, p = l2_near_pair(4, 0.1, 0)
        diff = p.probs - q.probs
        assert np.count_nonzero(diff) == 2
        assert np.abs(diff).max() == pytest.approx(0.1 / math.sqrt(2), abs=1e-15)
        assert l2(p, q) == pytest.approx(0.1, abs=1e-12)
        assert tv(p, q) == pytest.approx(0.1 / math.sqrt(2), abs=1e-12)

    @pytest.mark.parametrize("n, target", [(500, 0.3 / (2 * math.sqrt(500))), (500, 0.35**2 / (2 * math.sqrt(500))), (64, 0.02)])
    def test_exact_distance(self, n, target):
        q, p = l2_near_pair(n, target, 3)
        assert l2(p, q) == pytest.approx(target, abs=1e-12)
        assert p.probs.min() >= 0

    def test_unreachable(self):
        with pytest.raises(ValueError):
            l2_near_pair(10, 1.0)


class TestHellingerFarBlocks:
    def test_random_draws_are_far(self, rng):
        for _ in range(1000):
            n = int(rng.integers(2, 200))
            eps = rng.uniform(0, 1 / math.sqrt(2))
            q, p = hellinger_far_blocks(n, eps, int(rng.integers(2**31)))
            assert hellinger(p, q) >= eps - 1e-12

    def test_fully_disjoint(self):
        q, p = hellinger_far_blocks(10, 1 / math.sqrt(2), 0)
        assert hellinger(p, q) == pytest.approx(1.0)
        assert hellinger(p, q) >= 1 / math.sqrt(2)

    def test_zero(self):
        q, p = hellinger_far_blocks(10, 0.0)
        assert hellinger(p, q) == 0

    def test_too_large(self):
        with pytest.raises(ValueError):
            hellinger_far_blocks(10, 0.8)


class TestKLUntestable:
    def test_values(self):
        q, p = kl_untestable_pair(0.1)
        assert q.probs.tolist() == [1.0, 0.0]
        assert kl(p, q) == math.inf
        assert tv(p, q) == pytest.approx(0.1)

    def test_all_first_symbol_probability(self):
        assert (1 - 1e-4) ** 10 >= 0.999

    @pytest.mark.parametrize("delta", [0.0, 1.0, -0.5])
    def test_invalid(self, delta):
        with pytest.raises(ValueError):
            kl_untestable_pair(delta)


class TestReduction:
    def test_identity_case(self):
        p = DiscreteDistribution([0.2, 0.8])
        a, b = chi2_reduction(p, p)
        np.testing.assert_allclose(a.probs, p.probs, atol=1e-15)
        np.testing.assert_allclose(b.probs, p.probs, atol=1e-15)

    def test_disjoint(self):
        a, b = chi2_reduction(DiscreteDistribution([1, 0]), DiscreteDistribution([0, 1]))
        np.testing.assert_allclose(a.probs, [2 / 3, 1 / 3], atol=1e-15)
        np.testing.assert_allclose(b.probs, [1 / 3, 2 / 3], atol=1e-15)
        assert tv(a, b) == pytest.approx(1 / 3, abs=1e-12)

    def test_ratio_bounded(self, rng):
        for _ in range(1000):
            n = int(rng.integers(1, 30))
            p = oracles.random_distribution(rng, n, zeros=0.3)
            q = oracles.random_distribution(rng, n, zeros=0.3)
            a, b = chi2_reduction(p, q)
            assert np.all(a.probs <= 2 * b.probs + 1e-15)

    def test_mismatched(self):
        with pytest.raises(ValueError):
            chi2_reduction(uniform(2), uniform(3))

    def test_simulatable_by_channel_mixing(self):
        p = DiscreteDistribution([0.6, 0.3, 0.1, 0.0])
        q = DiscreteDistribution([0.1, 0.1, 0.4, 0.4])
        target, _ = chi2_reduction(p, q)
        rng = make_rng(12)
        m = 100_000
        from_q = int(rng.binomial(m, 1 / 3))
        counts = DistributionSampler(p).draw(m - from_q, rng) + DistributionSampler(q).draw(from_q, rng)
        _, pval = stats.chisquare(counts, target.probs * m)
        assert pval > 1e-3


class TestInstanceSpec:
    @pytest.mark.parametrize("family", list(Family))
    def test_every_family_builds_valid_pairs(self, family):
        n = 2 if family is Family.KL_UNTESTABLE else 40
        eps = 0.02 if family is Family.L2_NEAR else 0.2
        q, p = InstanceSpec(family, n, eps, 7).build()
        assert q.n == p.n == n
        for d in (q, p):
            assert abs(math.fsum(d.probs) - 1) < 1e-12 and d.probs.min() >= 0

    def test_family_targets(self):
        assert tv(*InstanceSpec("paninski", 40, 0.2).build()) == pytest.approx(0.2, abs=1e-12)
        assert hellinger(*InstanceSpec("paninski-hellinger", 40, 0.2).build()) == pytest.approx(0.2, abs=1e-12)
        assert l2(*InstanceSpec("l2-near", 40, 0.01).build()) == pytest.approx(0.01, abs=1e-12)
        assert hellinger(*InstanceSpec("hellinger-far-blocks", 40, 0.2).build()) >= 0.2
        q, p = InstanceSpec("chi2-reduction", 40, 0.3).build()
        assert tv(p, q) == pytest.approx(0.1, abs=1e-12)

    def test_kl_needs_two_symbols(self):
        with pytest.raises(ValueError):
            InstanceSpec("kl-untestable", 3, 0.1).build()

    def test_unknown_family(self):
        with pytest.raises(ValueError):
            InstanceSpec("nope", 3, 0.1)


def test_mixed_sampler_reproduces_reduction_weighting():
    p = DiscreteDistribution([0.5, 0.5, 0.0, 0.0])
    counts = MixedSampler(DistributionSampler(p), 0.5).draw(80_000, make_rng(0))
    assert counts[2] > 0 and counts[3] > 0
