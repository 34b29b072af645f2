"""Pairwise nonparametric comparison of result samples and matrix assembly."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from enum import Enum
from functools import lru_cache

import numpy as np
from scipy.stats import rankdata

log = logging.getLogger(__name__)

EXACT_MAX_N = 20


class Test(str, Enum):
    WILCOXON = "wilcoxon"
    FRIEDMAN = "friedman"


class Outcome(str, Enum):
    ROW_BETTER = "+"
    COL_BETTER = "-"
    INDISTINGUISHABLE = "="


@dataclass(frozen=True)
class PairVerdict:
    function_id: int
    test: Test
    outcome: Outcome
    p_value: float


@dataclass(frozen=True)
class Counts:
    plus: int = 0
    minus: int = 0
    tie: int = 0

    @property
    def total(self):
        return self.plus + self.minus + self.tie

    def transpose(self):
        return Counts(self.minus, self.plus, self.tie)

    def __add__(self, other):
        return Counts(self.plus + other.plus, self.minus + other.minus, self.tie + other.tie)


@dataclass(frozen=True)
class ComparisonCell:
    row_source: str
    col_source: str
    counts: dict  # Test -> Counts

    def transpose(self):
        return ComparisonCell(self.col_source, self.row_source,
                              {t: c.transpose() for t, c in self.counts.items()})


def _sample(x, name):
    x = np.asarray(x, dtype=np.float64).ravel()
    if x.size == 0:
        raise ValueError(f"sample {name} is empty")
    return x


@lru_cache(maxsize=None)
def _rank_sum_counts(n1, n):
    """Number of size-n1 subsets of {1..n} per rank sum, as a tuple of ints."""
    # ways[k][s]: subsets of size k with sum s among the ranks seen so far
    top = n1 * (2 * n - n1 + 1) // 2
    ways = [[0] * (top + 1) for _ in range(n1 + 1)]
    ways[0][0] = 1
    for rank in range(1, n + 1):
        for k in range(min(rank, n1), 0, -1):
            row, prev = ways[k], ways[k - 1]
            for s in range(top, rank - 1, -1):
                if prev[s - rank]:
                    row[s] += prev[s - rank]
    return tuple(ways[n1])


def wilcoxon_exact_p(w, n1, n2):
    """Two-sided exact p for rank sum ``w`` of the first sample (no ties)."""
    counts = _rank_sum_counts(n1, n1 + n2)
    total = math.comb(n1 + n2, n1)
    w = int(round(w))
    lower = sum(counts[: w + 1])
    upper = sum(counts[w:])
    return min(1.0, 2.0 * min(lower, upper) / total)


def wilcoxon_normal_p(w, n1, n2, tie_term=0.0):
    """Two-sided normal approximation with tie and continuity correction.

    ``tie_term`` is the sum of t^3 - t over groups of tied values.
    """
    n = n1 + n2
    mu = n1 * (n + 1) / 2.0
    var = n1 * n2 / 12.0 * ((n + 1) - tie_term / (n * (n - 1))) if n > 1 else 0.0
    dev = abs(w - mu) - 0.5
    if var <= 0.0 or dev <= 0.0:
        return 1.0
    return min(1.0, math.erfc(dev / math.sqrt(var) / math.sqrt(2.0)))


def wilcoxon_rank_sum(a, b):
    """Two-sided rank-sum test; returns (rank sum of a, p-value)."""
    a, b = _sample(a, "a"), _sample(b, "b")
    n1, n2 = a.size, b.size
    ranks = rankdata(np.concatenate([a, b]))
    w = float(ranks[:n1].sum())
    _, tcounts = np.unique(ranks, return_counts=True)
    tie_term = float(np.sum(tcounts.astype(float) ** 3 - tcounts))
    if n1 + n2 <= EXACT_MAX_N and tie_term == 0.0:
        return w, wilcoxon_exact_p(w, n1, n2)
    return w, wilcoxon_normal_p(w, n1, n2, tie_term)


def friedman_two(a, b):
    """Friedman test for two treatments over blocks paired by index.

    Returns (chi-square statistic, p-value) with the usual tie correction.
    """
    a, b = _sample(a, "a"), _sample(b, "b")
    if a.size != b.size:
        raise ValueError("friedman_two needs samples of equal length")
    n, k = a.size, 2
    ranks = rankdata(np.column_stack([a, b]), axis=1)
    rsum = ranks.sum(axis=0)
    tied = int(np.count_nonzero(a == b))
    ties = 6.0 * tied  # t^3 - t with t = 2 per tied block
    denom = n * k * (k + 1) - ties / (k - 1)
    if denom <= 0.0:
        return 0.0, 1.0
    q = 12.0 * float(np.sum((rsum - n * (k + 1) / 2.0) ** 2)) / denom
    return q, math.erfc(math.sqrt(q / 2.0))


_TESTS = {Test.WILCOXON: wilcoxon_rank_sum, Test.FRIEDMAN: friedman_two}


def classify_pair(a, b, test=Test.WILCOXON, alpha=0.05, function_id=0):
    """Verdict on distance errors (lower is better) of row sample a vs col sample b."""
    test = Test(test)
    _, p = _TESTS[test](a, b)
    if p >= alpha:
        out = Outcome.INDISTINGUISHABLE
    else:
        ma, mb = float(np.median(a)), float(np.median(b))
        if ma < mb:
            out = Outcome.ROW_BETTER
        elif ma > mb:
            out = Outcome.COL_BETTER
        else:
            log.info("significant %s result with equal medians on function %s", test.value, function_id)
            out = Outcome.INDISTINGUISHABLE
    return PairVerdict(function_id, test, out, p)


def _bump(counts, outcome):
    if outcome is Outcome.ROW_BETTER:
        return counts + Counts(1, 0, 0)
    if outcome is Outcome.COL_BETTER:
        return counts + Counts(0, 1, 0)
    return counts + Counts(0, 0, 1)


def comparison_matrix(samples, sources, function_ids, alpha=0.05, tests=tuple(Test)):
    """Fold per-function verdicts into ordered-pair cells.

    ``samples[(source_id, function_id)]`` is the array of distance errors in
    run-index order. Returns {(row, col): ComparisonCell} for every ordered
    pair of distinct sources.
    """
    gaps = [(s, f) for s in sources for f in function_ids if (s, f) not in samples]
    if gaps:
        raise ValueError(f"missing results for {gaps}")
    lengths = {len(samples[(s, f)]) for s in sources for f in function_ids}
    if len(lengths) > 1:
        raise ValueError("all (source, function) pairs need the same run count")
    cells = {}
    for i, row in enumerate(sources):
        for col in sources[i + 1:]:
            counts = {Test(t): Counts() for t in tests}
            for fid in function_ids:
                a, b = samples[(row, fid)], samples[(col, fid)]
                for t in counts:
                    counts[t] = _bump(counts[t], classify_pair(a, b, t, alpha, fid).outcome)
            cell = ComparisonCell(row, col, counts)
            cells[(row, col)] = cell
            cells[(col, row)] = cell.transpose()
    return cells


def tie_fraction(cell, test, n_functions=27):
    return cell.counts[Test(test)].tie / n_functions


def aggregates(cells, sources, is_map):
    """Per source and test: counts summed over opposite-kind and same-kind opponents.

    Returns {(source, "opposite"|"same", test): Counts}.
    """
    out = {}
    for s in sources:
        for (row, col), cell in cells.items():
            if row != s:
                continue
            group = "same" if is_map(row) == is_map(col) else "opposite"
            for t, c in cell.counts.items():
                key = (s, group, t)
                out[key] = out.get(key, Counts()) + c
    return out


def group_tie_fractions(cells, test, group_of, groups, n_functions=27):
    """Mean tie fraction over unordered pairs inside ``groups`` vs across them.

    ``group_of`` maps a source id to its group name (or None). Pairs with
    either member outside ``groups`` are ignored. Returns (within, across).
    """
    within, across = [], []
    for (row, col), cell in cells.items():
        if row >= col:
            continue
        gr, gc = group_of(row), group_of(col)
        if gr not in groups or gc not in groups:
            continue
        (within if gr == gc else across).append(tie_fraction(cell, test, n_functions))
    if not within or not across:
        raise ValueError("need pairs both within and across groups")
    return float(np.mean(within)), float(np.mean(across))
