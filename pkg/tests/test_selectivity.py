"""Marginal selectivity checks and the pooled two-proportion z-test."""

import math
import random
from fractions import Fraction

import pytest

from selinf.errors import InvalidValue, MissingCounts
from selinf.feasibility import HIDDEN_STATES, HiddenStateDistribution, predicted_tables
from selinf.model import (
    TREATMENTS,
    CountTable,
    ExperimentData,
    Level,
    flip_a_coding,
    flip_b_coding,
)
from selinf.selectivity import (
    Response,
    check_marginal_selectivity,
    test_marginal_selectivity as run_ms_test,
)

from conftest import random_any_data, random_hidden_distribution


def with_counts(counts_by_treatment):
    counts = {t: CountTable(*cells) for t, cells in zip(TREATMENTS, counts_by_treatment)}
    tables = {t: c.normalized() for t, c in counts.items()}
    return ExperimentData(tables=tables, counts=counts)


# Table 3 counts, round(81 * p) per cell.
TABLE3_COUNTS = ((4, 51, 21, 5), (48, 2, 24, 7), (63, 7, 7, 4), (12, 7, 8, 54))


class TestExactCheck:
    def test_zero_correlation_tables_still_violate(self, table1):
        report = check_marginal_selectivity(table1, 0)
        assert not report.satisfied
        b_at_b = report.comparison(Response.B, Level.FIRST)
        assert (b_at_b.p_under_first, b_at_b.p_under_second) == (
            Fraction(1, 2),
            Fraction(2, 5),
        )
        assert b_at_b.delta == Fraction(1, 10)

    def test_extremal_box_satisfies_exactly(self, table2):
        report = check_marginal_selectivity(table2, 0)
        assert report.satisfied
        assert report.max_delta == 0

    def test_observed_experiment_second_alternative_margins(self, table3):
        report = check_marginal_selectivity(table3, 0)
        assert not report.satisfied
        cat = report.comparison(Response.A, Level.SECOND).complements()
        assert abs(cat[0] - Fraction(135, 1000)) <= Fraction(2, 1000)
        assert abs(cat[1] - Fraction(766, 1000)) <= Fraction(2, 1000)

    def test_comparison_order_is_fixed(self, table1):
        report = check_marginal_selectivity(table1)
        slots = [(c.response, c.fixed_level.level) for c in report.comparisons]
        assert slots == [
            (Response.A, Level.FIRST),
            (Response.A, Level.SECOND),
            (Response.B, Level.FIRST),
            (Response.B, Level.SECOND),
        ]

    def test_tolerance_widening_is_monotone(self, table1):
        exact = check_marginal_selectivity(table1, 0)
        assert not exact.satisfied
        assert exact.max_delta == Fraction(1, 4)
        assert check_marginal_selectivity(table1, Fraction(1, 4)).satisfied
        assert not check_marginal_selectivity(table1, Fraction(24, 100)).satisfied

    def test_negative_tolerance_rejected(self, table1):
        with pytest.raises(InvalidValue):
            check_marginal_selectivity(table1, Fraction(-1, 10))

    def test_hidden_state_models_always_satisfy(self):
        rng = random.Random(31)
        for _ in range(100):
            data = predicted_tables(random_hidden_distribution(rng))
            report = check_marginal_selectivity(data, 0)
            assert report.satisfied and report.max_delta == 0

    def test_delta_invariant_under_recoding(self):
        rng = random.Random(32)
        for _ in range(50):
            data = random_any_data(rng)
            base = [c.delta for c in check_marginal_selectivity(data).comparisons]
            for fn in (flip_a_coding, flip_b_coding):
                flipped = [c.delta for c in check_marginal_selectivity(fn(data)).comparisons]
                assert flipped == base


class TestZTest:
    def test_observed_counts_give_large_z(self):
        data = with_counts(TABLE3_COUNTS)
        results = run_ms_test(data, alpha_sig=0.05)
        tiger_cat = results[1]  # A at a'
        # frozen from the pooled-z formula: (70/81 - 19/81) / sqrt(pbar(1-pbar)(2/81))
        assert abs(tiger_cat.z_statistic - 8.05325127432548) < 1e-9
        assert abs(tiger_cat.z_statistic) > 1.96
        assert tiger_cat.reject

    def test_published_decimals_with_independent_counts(self, table3):
        results = run_ms_test(table3, alpha_sig=0.05)
        tiger_cat = results[1]
        # frozen from the same formula at p = 864/999 vs 234/1000
        assert abs(tiger_cat.z_statistic - 8.06913056294408) < 1e-9
        assert tiger_cat.reject

    def test_identical_proportions_give_zero(self):
        data = with_counts([(10, 10, 10, 10)] * 4)
        for r in run_ms_test(data):
            assert r.z_statistic == 0.0
            assert r.p_value == 1.0
            assert not r.reject

    def test_exactly_selective_counts_give_all_zero(self, table2):
        # table 2 proportions realized as exact counts
        counts = [(50, 0, 0, 50)] * 3 + [(0, 50, 50, 0)]
        data = with_counts(counts)
        assert all(r.z_statistic == 0.0 for r in run_ms_test(data))

    def test_degenerate_point_mass_flagged_not_fatal(self):
        data = with_counts([(5, 0, 0, 0)] * 4)
        results = run_ms_test(data)
        assert all(r.degenerate for r in results)
        assert all(r.z_statistic == 0.0 for r in results)

    def test_missing_counts_raises(self, table1):
        with pytest.raises(MissingCounts):
            run_ms_test(table1)

    def test_alpha_out_of_range_rejected(self):
        data = with_counts([(10, 10, 10, 10)] * 4)
        for bad in (0.0, 1.0, -0.1, 1.5):
            with pytest.raises(InvalidValue):
                run_ms_test(data, alpha_sig=bad)

    def test_p_value_monotone_in_z_magnitude(self):
        data = with_counts(TABLE3_COUNTS)
        results = sorted(run_ms_test(data), key=lambda r: abs(r.z_statistic))
        ps = [r.p_value for r in results]
        assert ps == sorted(ps, reverse=True)

    def test_reject_monotone_in_alpha(self):
        data = with_counts(TABLE3_COUNTS)
        weak = run_ms_test(data, alpha_sig=0.4)
        strict = run_ms_test(data, alpha_sig=0.001)
        for w, s in zip(weak, strict):
            if s.reject:
                assert w.reject

    def test_bonferroni_divides_alpha(self):
        data = with_counts(TABLE3_COUNTS)
        plain = run_ms_test(data, alpha_sig=0.05)
        corrected = run_ms_test(data, alpha_sig=0.05, bonferroni=True)
        for p, c in zip(plain, corrected):
            assert c.alpha_sig == pytest.approx(p.alpha_sig / 4)
            if c.reject:
                assert p.reject

    def test_two_sided_p_from_standard_normal(self):
        data = with_counts(TABLE3_COUNTS)
        for r in run_ms_test(data):
            expected = math.erfc(abs(r.z_statistic) / math.sqrt(2))
            assert r.p_value == pytest.approx(expected, rel=1e-12)


class TestZTestAgainstStatsmodels:
    def test_matches_proportions_ztest(self):
        sm = pytest.importorskip("statsmodels.stats.proportion")
        data = with_counts(TABLE3_COUNTS)
        results = run_ms_test(data)
        # A at a': Tiger successes under b vs b'
        successes = [63 + 7, 12 + 7]
        z_ref, p_ref = sm.proportions_ztest(successes, [81, 81])
        assert results[1].z_statistic == pytest.approx(z_ref, rel=1e-12)
        assert results[1].p_value == pytest.approx(p_ref, rel=1e-9)


class TestSelectiveModelsUnderTest:
    def test_exactly_selective_sampled_tables_keep_small_z(self):
        # push-forward tables turned into exact counts: z is identically zero
        dist = HiddenStateDistribution.from_mapping(
            {HIDDEN_STATES[0]: Fraction(1, 4), HIDDEN_STATES[5]: Fraction(3, 4)}
        )
        data = predicted_tables(dist)
        counts = {}
        for t in TREATMENTS:
            cells = [int(c * 16) for c in data.table(t).cells()]
            counts[t] = CountTable(*cells)
        full = ExperimentData(
            tables={t: c.normalized() for t, c in counts.items()}, counts=counts
        )
        assert all(r.z_statistic == 0.0 for r in run_ms_test(full))
