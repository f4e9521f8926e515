import itertools
import math

import numpy as np
import pytest
from scipy import stats as scipy_stats

from playinsight.stats import (
    AllValuesTied,
    ConstantSample,
    EmptySample,
    PAdjust,
    SampleTooSmall,
    StatMethod,
    adjust_pvalues,
    anova_oneway,
    descriptive,
    dunn_test,
    kruskal_wallis,
    select_and_run,
    shapiro_wilk,
    tukey_hsd,
)

FIXTURE_123 = [[1, 2, 3], [4, 5, 6], [7, 8, 9]]


class TestDescriptive:
    def test_single_value(self):
        d = descriptive([0.5])
        assert (d.n, d.mean, d.min, d.max) == (1, 0.5, 0.5, 0.5)
        assert d.sd is None

    def test_two_point(self):
        d = descriptive([0.0, 1.0])
        assert d.mean == 0.5
        assert d.sd == pytest.approx(math.sqrt(0.5), abs=1e-12)

    def test_empty_raises(self):
        with pytest.raises(EmptySample):
            descriptive([])

    def test_matches_two_pass_oracle(self):
        rng = np.random.default_rng(7)
        x = rng.uniform(size=29)
        d = descriptive(x)
        mean = sum(x) / 29
        variance = sum((v - mean) ** 2 for v in x) / 28
        assert d.mean == pytest.approx(mean, abs=1e-12)
        assert d.sd == pytest.approx(math.sqrt(variance), abs=1e-12)
        assert d.min == min(x) and d.max == max(x)

    def test_invariant_min_le_mean_le_max(self):
        rng = np.random.default_rng(11)
        for _ in range(20):
            d = descriptive(rng.normal(size=rng.integers(1, 40)))
            assert d.min <= d.mean <= d.max
            assert d.sd is None or d.sd >= 0


class TestShapiroWilk:
    def test_constant_sample(self):
        with pytest.raises(ConstantSample):
            shapiro_wilk([2.0] * 10)

    def test_too_small(self):
        with pytest.raises(SampleTooSmall):
            shapiro_wilk([1.0, 2.0])

    def test_too_large(self):
        with pytest.raises(ValueError):
            shapiro_wilk(np.arange(5001))

    def test_w_in_unit_interval(self):
        rng = np.random.default_rng(5)
        res = shapiro_wilk(rng.normal(size=29))
        assert 0 < res.statistic <= 1
        assert 0 <= res.p_value <= 1
        assert res.method is StatMethod.SHAPIRO_WILK

    @pytest.mark.parametrize("n", [10, 29, 100])
    def test_matches_reference_over_seeded_samples(self, n):
        rng = np.random.default_rng(1234)
        for trial in range(50):
            x = rng.normal(size=n) if trial % 2 else rng.uniform(size=n)
            mine = shapiro_wilk(x)
            ref = scipy_stats.shapiro(x)
            assert mine.statistic == pytest.approx(ref.statistic, abs=1e-3)
            assert mine.p_value == pytest.approx(ref.pvalue, abs=1e-3)

    def test_uniform_n29_example(self):
        rng = np.random.default_rng(29)
        x = rng.uniform(size=29)
        mine = shapiro_wilk(x)
        ref = scipy_stats.shapiro(x)
        assert mine.statistic == pytest.approx(ref.statistic, abs=1e-4)
        assert mine.p_value == pytest.approx(ref.pvalue, abs=1e-4)

    def test_small_n_branches(self):
        rng = np.random.default_rng(3)
        for n in (3, 4, 5, 6, 11, 12):
            x = rng.normal(size=n)
            mine = shapiro_wilk(x)
            ref = scipy_stats.shapiro(x)
            assert mine.statistic == pytest.approx(ref.statistic, abs=1e-3)
            assert mine.p_value == pytest.approx(ref.pvalue, abs=1e-3)


class TestAnova:
    def test_identical_groups(self):
        res = anova_oneway([[1, 2, 3], [1, 2, 3], [1, 2, 3]])
        assert res.statistic == 0.0
        assert res.p_value == 1.0
        assert not res.significant

    def test_two_pair_fixture(self):
        res = anova_oneway([[1, 2], [3, 4]])
        assert res.statistic == pytest.approx(8.0, abs=1e-12)
        # Closed form through the t distribution with 2 df.
        assert res.p_value == pytest.approx(0.1056, abs=1e-4)
        assert res.df == "(1, 2)"

    def test_matches_reference_random_4x29(self):
        rng = np.random.default_rng(97)
        groups = [rng.normal(loc=0.1 * i, size=29) for i in range(4)]
        mine = anova_oneway(groups)
        ref = scipy_stats.f_oneway(*groups)
        assert mine.statistic == pytest.approx(ref.statistic, abs=1e-9)
        assert mine.p_value == pytest.approx(ref.pvalue, abs=1e-6)

    def test_zero_within_variance_degenerate(self):
        res = anova_oneway([[1, 1], [2, 2]])
        assert res.p_value == 0.0
        assert res.note is not None
        assert math.isinf(res.statistic)

    def test_preconditions(self):
        with pytest.raises(SampleTooSmall):
            anova_oneway([[1, 2]])
        with pytest.raises(SampleTooSmall):
            anova_oneway([[1], [2, 3]])

    def test_shift_invariance_and_scale(self):
        rng = np.random.default_rng(2)
        groups = [rng.normal(size=10) for _ in range(3)]
        base = anova_oneway(groups)
        shifted = anova_oneway([g + 100.0 for g in groups])
        scaled = anova_oneway([g * 3.5 for g in groups])
        assert shifted.statistic == pytest.approx(base.statistic, rel=1e-9)
        assert scaled.statistic == pytest.approx(base.statistic, rel=1e-9)

    def test_relabeling_permutes_consistently(self):
        rng = np.random.default_rng(8)
        groups = [rng.normal(loc=i, size=12) for i in range(3)]
        a = anova_oneway(groups)
        b = anova_oneway(groups[::-1])
        assert a.statistic == pytest.approx(b.statistic, rel=1e-12)
        assert a.p_value == pytest.approx(b.p_value, rel=1e-12)


class TestKruskalWallis:
    def test_hand_fixture(self):
        res = kruskal_wallis(FIXTURE_123)
        assert res.statistic == pytest.approx(7.2, abs=1e-12)
        assert res.p_value == pytest.approx(math.exp(-3.6), abs=1e-12)
        assert res.df == "2"

    def test_brute_force_rank_formula(self):
        rng = np.random.default_rng(10)
        groups = [rng.permutation(np.arange(1, 10))[:3] + 10 * i for i in range(3)]
        res = kruskal_wallis(groups)
        pooled = np.concatenate(groups)
        order = scipy_stats.rankdata(pooled)
        n = len(pooled)
        offset = 0
        h = 0.0
        for g in groups:
            r = order[offset : offset + len(g)]
            h += r.sum() ** 2 / len(g)
            offset += len(g)
        h = 12 / (n * (n + 1)) * h - 3 * (n + 1)
        assert res.statistic == pytest.approx(h, abs=1e-12)

    def test_all_tied_raises(self):
        with pytest.raises(AllValuesTied):
            kruskal_wallis([[5, 5], [5, 5, 5]])

    def test_matches_reference_with_ties(self):
        rng = np.random.default_rng(13)
        groups = [rng.integers(0, 6, size=29).astype(float) for _ in range(4)]
        mine = kruskal_wallis(groups)
        ref = scipy_stats.kruskal(*groups)
        assert mine.statistic == pytest.approx(ref.statistic, abs=1e-10)
        assert mine.p_value == pytest.approx(ref.pvalue, abs=1e-10)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(21)
        groups = [rng.normal(loc=i * 0.2, size=15) for i in range(3)]
        base = kruskal_wallis(groups)
        cubed = kruskal_wallis([g ** 3 for g in groups])
        assert cubed.statistic == pytest.approx(base.statistic, abs=1e-12)

    def test_preconditions(self):
        with pytest.raises(SampleTooSmall):
            kruskal_wallis([[1.0]])
        with pytest.raises(SampleTooSmall):
            kruskal_wallis([[1.0], [2.0]])


class TestTukey:
    def test_identical_pair_p_one(self):
        rng = np.random.default_rng(30)
        g = rng.normal(size=20)
        comparisons = tukey_hsd([g, g.copy(), g + 1.0])
        pair = next(c for c in comparisons if {c.group_a, c.group_b} == {"group1", "group2"})
        assert pair.mean_difference == pytest.approx(0.0, abs=1e-12)
        assert pair.adjusted_p == pytest.approx(1.0, abs=1e-9)

    def test_matches_reference_random_4x29(self):
        rng = np.random.default_rng(40)
        groups = [rng.normal(loc=0.2 * i, size=29) for i in range(4)]
        mine = tukey_hsd(groups)
        ref = scipy_stats.tukey_hsd(*groups)
        ci = ref.confidence_interval(0.95)
        for comparison, (a, b) in zip(mine, itertools.combinations(range(4), 2)):
            assert comparison.adjusted_p == pytest.approx(ref.pvalue[a][b], abs=1e-3)
            assert comparison.ci_low == pytest.approx(ci.low[a][b], abs=1e-6)
            assert comparison.ci_high == pytest.approx(ci.high[a][b], abs=1e-6)

    def test_ci_brackets_mean_difference(self):
        rng = np.random.default_rng(41)
        groups = [rng.normal(loc=i, size=12) for i in range(3)]
        for c in tukey_hsd(groups):
            assert c.ci_low <= c.mean_difference <= c.ci_high

    def test_labels(self):
        rng = np.random.default_rng(42)
        groups = [rng.normal(size=5) for _ in range(3)]
        comparisons = tukey_hsd(groups, labels=["sand", "hill", "blocks"])
        assert {(c.group_a, c.group_b) for c in comparisons} == {
            ("sand", "hill"), ("sand", "blocks"), ("hill", "blocks"),
        }

    def test_all_tied(self):
        with pytest.raises(AllValuesTied):
            tukey_hsd([[1, 1], [1, 1]])


class TestDunn:
    def test_hand_fixture_pair_1_3(self):
        comparisons = dunn_test(FIXTURE_123, adjustment=PAdjust.BONFERRONI)
        pair = next(
            c for c in comparisons if {c.group_a, c.group_b} == {"group1", "group3"}
        )
        # mean ranks 2 and 8, SE = sqrt(7.5 * 2/3) = sqrt(5)
        assert abs(pair.statistic) == pytest.approx(6 / math.sqrt(5), abs=1e-12)
        assert abs(pair.statistic) == pytest.approx(2.683, abs=1e-3)
        assert pair.unadjusted_p == pytest.approx(0.0073, abs=1e-4)
        assert pair.adjusted_p == pytest.approx(0.0219, abs=1e-3)
        assert pair.mean_difference == pytest.approx(-6.0, abs=1e-12)

    def test_identical_groups_pair(self):
        comparisons = dunn_test([[1, 2, 3], [1, 2, 3]], adjustment=PAdjust.NONE)
        assert comparisons[0].statistic == pytest.approx(0.0, abs=1e-12)
        assert comparisons[0].adjusted_p == 1.0

    def test_matches_independent_z_computation(self):
        rng = np.random.default_rng(55)
        groups = [rng.integers(0, 8, size=29).astype(float) for _ in range(4)]
        mine = dunn_test(groups, adjustment=PAdjust.NONE)
        # Independent route: scipy mid-ranks and the tie-corrected SE formula.
        pooled = np.concatenate(groups)
        ranks = scipy_stats.rankdata(pooled)
        n = len(pooled)
        _, counts = np.unique(pooled, return_counts=True)
        tie_term = float(((counts ** 3 - counts).sum()) / (12 * (n - 1)))
        splits = np.cumsum([len(g) for g in groups])[:-1]
        rank_groups = np.split(ranks, splits)
        for comparison, (a, b) in zip(mine, itertools.combinations(range(4), 2)):
            se = math.sqrt(
                (n * (n + 1) / 12 - tie_term)
                * (1 / len(groups[a]) + 1 / len(groups[b]))
            )
            z = (rank_groups[a].mean() - rank_groups[b].mean()) / se
            assert comparison.statistic == pytest.approx(z, abs=1e-6)

    def test_monotone_transform_invariance(self):
        rng = np.random.default_rng(56)
        groups = [rng.normal(loc=0.3 * i, size=15) for i in range(3)]
        base = dunn_test(groups, adjustment=PAdjust.NONE)
        cubed = dunn_test([g ** 3 for g in groups], adjustment=PAdjust.NONE)
        for x, y in zip(base, cubed):
            assert x.statistic == pytest.approx(y.statistic, abs=1e-12)

    def test_all_tied(self):
        with pytest.raises(AllValuesTied):
            dunn_test([[3, 3], [3, 3]])

    def test_bootstrap_ci_requires_seed(self):
        with pytest.raises(ValueError):
            dunn_test(FIXTURE_123, bootstrap_ci=True)

    def test_bootstrap_ci_brackets_difference(self):
        rng = np.random.default_rng(57)
        groups = [rng.normal(loc=i, size=29) for i in range(3)]
        comparisons = dunn_test(groups, bootstrap_ci=True, seed=9)
        for c in comparisons:
            assert c.ci_low is not None and c.ci_high is not None
            assert c.ci_low <= c.mean_difference <= c.ci_high

    def test_bootstrap_ci_reproducible(self):
        rng = np.random.default_rng(58)
        groups = [rng.normal(loc=i, size=10) for i in range(3)]
        a = dunn_test(groups, bootstrap_ci=True, seed=4)
        b = dunn_test(groups, bootstrap_ci=True, seed=4)
        assert [(c.ci_low, c.ci_high) for c in a] == [(c.ci_low, c.ci_high) for c in b]


class TestPAdjust:
    def test_bonferroni_at_least_holm_at_least_raw(self):
        rng = np.random.default_rng(60)
        for _ in range(50):
            p = list(rng.uniform(size=rng.integers(1, 9)))
            raw = adjust_pvalues(p, PAdjust.NONE)
            holm = adjust_pvalues(p, PAdjust.HOLM)
            bonf = adjust_pvalues(p, PAdjust.BONFERRONI)
            for r, h, b in zip(raw, holm, bonf):
                assert h >= r - 1e-15
                assert b >= h - 1e-15

    def test_holm_example(self):
        # Three p-values; Holm multiplies the smallest by 3, next by 2, last by 1,
        # with a running maximum.
        assert adjust_pvalues([0.01, 0.04, 0.03], PAdjust.HOLM) == pytest.approx(
            [0.03, 0.06, 0.06]
        )

    def test_capped_at_one(self):
        assert adjust_pvalues([0.9, 0.8], PAdjust.BONFERRONI) == [1.0, 1.0]


class TestSelectAndRun:
    def _normal_groups(self, rng, n=29, k=4):
        return {f"area{i}": rng.normal(loc=0.1 * i, size=n) for i in range(k)}

    def test_all_normal_chooses_anova(self):
        # Seed chosen so all four Shapiro-Wilk p-values land above 0.05.
        rng = np.random.default_rng(424)
        groups = self._normal_groups(rng)
        assert all(shapiro_wilk(g).p_value >= 0.05 for g in groups.values())
        outcome = select_and_run(groups)
        assert outcome.omnibus.method is StatMethod.ANOVA

    def test_one_skewed_group_chooses_kruskal(self):
        rng = np.random.default_rng(425)
        groups = self._normal_groups(rng)
        groups["area3"] = rng.uniform(size=29) ** 6  # heavily skewed
        assert shapiro_wilk(groups["area3"]).p_value < 0.05
        outcome = select_and_run(groups)
        assert outcome.omnibus.method is StatMethod.KRUSKAL_WALLIS

    def test_posthoc_skipped_when_omnibus_not_significant(self):
        rng = np.random.default_rng(426)
        groups = {f"area{i}": rng.normal(size=29) for i in range(4)}
        outcome = select_and_run(groups)
        if outcome.omnibus.significant:  # pragma: no cover - seed-pinned
            pytest.fail("fixture seed must give a non-significant omnibus")
        assert outcome.posthoc == []

    def test_posthoc_present_when_significant(self):
        rng = np.random.default_rng(427)
        groups = {f"area{i}": rng.normal(loc=i * 2.0, size=20) for i in range(3)}
        outcome = select_and_run(groups)
        assert outcome.omnibus.significant
        assert len(outcome.posthoc) == 3
        assert {(c.group_a, c.group_b) for c in outcome.posthoc} == {
            ("area0", "area1"), ("area0", "area2"), ("area1", "area2"),
        }

    def test_error_carries_area_label(self):
        groups = {"good": [1.0, 2.0, 3.0, 4.0], "flat": [1.0, 1.0, 1.0, 1.0]}
        with pytest.raises(ConstantSample, match="flat"):
            select_and_run(groups)

    def test_needs_two_areas(self):
        with pytest.raises(ValueError):
            select_and_run({"only": [1.0, 2.0, 3.0]})

    def test_alpha_changes_flags_not_statistics(self):
        rng = np.random.default_rng(428)
        groups = {f"area{i}": rng.normal(loc=0.3 * i, size=20) for i in range(3)}
        strict = select_and_run(groups, alpha=0.001)
        loose = select_and_run(groups, alpha=0.2)
        assert strict.omnibus.statistic == pytest.approx(loose.omnibus.statistic, rel=1e-12)
        assert strict.omnibus.p_value == pytest.approx(loose.omnibus.p_value, rel=1e-12)
