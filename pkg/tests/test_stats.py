import itertools
import logging
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st
from scipy import stats as sps

from chaospso.stats import (
    ComparisonCell,
    Counts,
    Outcome,
    Test as StatTest,
    aggregates,
    classify_pair,
    comparison_matrix,
    friedman_two,
    group_tie_fractions,
    tie_fraction,
    wilcoxon_exact_p,
    wilcoxon_rank_sum,
)


def brute_exact_p(w, n1, n2):
    sums = [sum(c) for c in itertools.combinations(range(1, n1 + n2 + 1), n1)]
    lo = sum(s <= w for s in sums)
    hi = sum(s >= w for s in sums)
    return min(1.0, 2 * min(lo, hi) / len(sums))


def test_identical_samples():
    w, p = wilcoxon_rank_sum([1, 2, 3], [1, 2, 3])
    assert p == 1.0
    assert classify_pair([1, 2, 3], [1, 2, 3]).outcome is Outcome.INDISTINGUISHABLE


def test_complete_separation_exact():
    w, p = wilcoxon_rank_sum([1, 2, 3, 4, 5], [11, 12, 13, 14, 15])
    assert w == 15.0
    assert p == pytest.approx(2 / 252, abs=1e-15)


@pytest.mark.parametrize("n1,n2", [(1, 1), (1, 5), (2, 3), (3, 3), (4, 6), (5, 5), (7, 8), (3, 12)])
def test_exact_p_against_brute_force(n1, n2):
    lo, hi = n1 * (n1 + 1) // 2, n1 * (2 * (n1 + n2) - n1 + 1) // 2
    for w in range(lo, hi + 1):
        assert wilcoxon_exact_p(w, n1, n2) == pytest.approx(brute_exact_p(w, n1, n2), abs=1e-15)


def test_exact_p_symmetric_and_bounded():
    for n1, n2 in [(4, 9), (10, 10), (6, 14)]:
        n = n1 + n2
        mid = n1 * (n + 1)
        for w in range(n1 * (n1 + 1) // 2, n1 * (2 * n - n1 + 1) // 2 + 1):
            p = wilcoxon_exact_p(w, n1, n2)
            assert 0.0 < p <= 1.0
            assert p == pytest.approx(wilcoxon_exact_p(mid - w, n1, n2), abs=1e-15)


def test_normal_path_matches_scipy_asymptotic():
    rng = np.random.default_rng(3)
    for _ in range(200):
        n1, n2 = rng.integers(11, 60, size=2)
        a = np.round(rng.normal(0.0, 1.0, n1), int(rng.integers(0, 3)))
        b = np.round(rng.normal(0.3, 1.0, n2), int(rng.integers(0, 3)))
        _, p = wilcoxon_rank_sum(a, b)
        ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
        assert p == pytest.approx(ref, abs=1e-12)


def test_small_tied_samples_use_normal_path():
    a, b = [1.0, 1.0, 2.0], [1.0, 3.0, 3.0]
    w, p = wilcoxon_rank_sum(a, b)
    ref = sps.mannwhitneyu(a, b, alternative="two-sided", method="asymptotic", use_continuity=True).pvalue
    assert p == pytest.approx(ref, abs=1e-12)


def test_empty_sample_rejected():
    with pytest.raises(ValueError, match="empty"):
        wilcoxon_rank_sum([], [1.0])
    with pytest.raises(ValueError, match="empty"):
        friedman_two([], [])


def brute_friedman(a, b):
    n, k = len(a), 2
    rank_sums = [0.0, 0.0]
    tie_sum = 0.0
    for i in range(n):
        row = [a[i], b[i]]
        for j in range(k):
            less = sum(1 for v in row if v < row[j])
            equal = sum(1 for v in row if v == row[j])
            rank_sums[j] += less + (equal + 1) / 2
        if a[i] == b[i]:
            tie_sum += 2 ** 3 - 2
    num = 12 * sum((r - n * (k + 1) / 2) ** 2 for r in rank_sums)
    den = n * k * (k + 1) - tie_sum / (k - 1)
    return num / den if den > 0 else 0.0


def test_friedman_identical_blocks():
    assert friedman_two([1, 2, 3], [1, 2, 3]) == (0.0, 1.0)


def test_friedman_all_row_wins():
    a = np.arange(20.0)
    q, p = friedman_two(a, a + 1)
    assert q == pytest.approx(20.0)
    assert p < 0.001


def test_friedman_against_oracles():
    rng = np.random.default_rng(11)
    for _ in range(200):
        n = int(rng.integers(1, 60))
        a = rng.integers(0, 5, n).astype(float)
        b = rng.integers(0, 5, n).astype(float)
        q, p = friedman_two(a, b)
        assert q == pytest.approx(brute_friedman(a.tolist(), b.tolist()), abs=1e-10)
        plus, minus = int(np.sum(a < b)), int(np.sum(a > b))
        sign = (plus - minus) ** 2 / (plus + minus) if plus + minus else 0.0
        assert q == pytest.approx(sign, abs=1e-10)
        assert p == pytest.approx(sps.chi2.sf(q, 1) if q > 0 else 1.0, abs=1e-12)


def test_friedman_unequal_lengths():
    with pytest.raises(ValueError):
        friedman_two([1.0, 2.0], [1.0])


def test_classify_directions():
    a = np.linspace(0.0, 1.0, 30)
    b = a + 10.0
    for test in StatTest:
        assert classify_pair(a, b, test).outcome is Outcome.ROW_BETTER
        assert classify_pair(b, a, test).outcome is Outcome.COL_BETTER
    v = classify_pair(a, b, "wilcoxon", function_id=7)
    assert v.function_id == 7 and v.test is StatTest.WILCOXON and v.p_value < 0.05


def test_equal_medians_significant_is_tie(caplog):
    # shifted tails with a shared median: the rank test fires, medians agree
    a = np.array([0.0] * 10 + [5.0] + [6.0] * 10)
    b = np.array([4.0] * 10 + [5.0] + [20.0] * 10)
    with caplog.at_level(logging.INFO, logger="chaospso.stats"):
        v = classify_pair(a, b, "wilcoxon", alpha=0.5, function_id=3)
    assert v.p_value < 0.5
    assert v.outcome is Outcome.INDISTINGUISHABLE
    assert "equal medians" in caplog.text


def _samples(sources, fids, n, seed=0):
    rng = np.random.default_rng(seed)
    return {(s, f): rng.exponential(1.0 + i * 0.3, n) for i, s in enumerate(sources) for f in fids}


def test_matrix_counts_and_transpose():
    sources = ["a", "b", "c", "d"]
    fids = list(range(1, 28))
    cells = comparison_matrix(_samples(sources, fids, 40), sources, fids)
    assert len(cells) == 12
    for (r, c), cell in cells.items():
        for t in StatTest:
            assert cell.counts[t].total == 27
            back = cells[(c, r)].counts[t]
            assert (back.plus, back.minus, back.tie) == (cell.counts[t].minus, cell.counts[t].plus,
                                                         cell.counts[t].tie)


def test_matrix_gap_reporting():
    samples = _samples(["a", "b"], [1, 2], 10)
    del samples[("b", 2)]
    with pytest.raises(ValueError, match=r"\('b', 2\)"):
        comparison_matrix(samples, ["a", "b"], [1, 2])
    samples = _samples(["a", "b"], [1], 10)
    samples[("a", 1)] = samples[("a", 1)][:5]
    with pytest.raises(ValueError, match="same run count"):
        comparison_matrix(samples, ["a", "b"], [1])


def test_aggregates_accounting():
    maps = ["m1", "m2", "m3", "m4", "m5", "m6"]
    dists = ["d1", "d2", "d3", "d4", "d5", "d6"]
    sources = maps + dists
    fids = list(range(1, 28))
    cells = comparison_matrix(_samples(sources, fids, 12), sources, fids)
    agg = aggregates(cells, sources, lambda s: s.startswith("m"))
    for s in sources:
        for t in StatTest:
            assert agg[(s, "opposite", t)].total == 162
            assert agg[(s, "same", t)].total == 135


def test_tie_fraction_examples():
    def cell(tie):
        return ComparisonCell("a", "b", {StatTest.WILCOXON: Counts(27 - tie, 0, tie)})

    assert tie_fraction(cell(27), "wilcoxon") == 1.0
    assert tie_fraction(cell(16), "wilcoxon") == pytest.approx(16 / 27)
    assert tie_fraction(cell(0), "wilcoxon") == 0.0


def test_counts_algebra():
    c = Counts(1, 2, 3) + Counts(4, 5, 6)
    assert c == Counts(5, 7, 9) and c.total == 21 and c.transpose() == Counts(7, 5, 9)


def test_group_tie_fractions():
    def cell(a, b, tie):
        return ComparisonCell(a, b, {StatTest.WILCOXON: Counts(0, 27 - tie, tie)})

    group = {"a": "g1", "b": "g1", "c": "g2", "d": "g2", "e": "g3"}
    cells = {}
    for a, b, tie in [("a", "b", 27), ("c", "d", 18), ("a", "c", 0), ("a", "d", 9),
                      ("b", "c", 0), ("b", "d", 0), ("a", "e", 27)]:
        cells[(a, b)] = cell(a, b, tie)
        cells[(b, a)] = cells[(a, b)].transpose()
    within, across = group_tie_fractions(cells, "wilcoxon", group.get, {"g1", "g2"})
    assert within == pytest.approx((1 + 18 / 27) / 2)
    assert across == pytest.approx((9 / 27) / 4)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=25),
       st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=25))
def test_property_wilcoxon_p_range_and_symmetry(a, b):
    wa, pa = wilcoxon_rank_sum(a, b)
    wb, pb = wilcoxon_rank_sum(b, a)
    assert 0.0 <= pa <= 1.0
    assert pa == pytest.approx(pb, abs=1e-12)
    n = len(a) + len(b)
    assert wa + wb == pytest.approx(n * (n + 1) / 2)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(st.integers(0, 4), st.integers(0, 4)), min_size=1, max_size=40))
def test_property_friedman_antisymmetric(pairs):
    a = [float(x) for x, _ in pairs]
    b = [float(y) for _, y in pairs]
    assert friedman_two(a, b) == friedman_two(b, a)
    q, p = friedman_two(a, b)
    assert q >= 0.0 and 0.0 <= p <= 1.0
    assert math.isfinite(q)
