"""Vowel/consonant-sensitive Levenshtein alignment with PMI-induced costs.

Substitution columns are admissible only between segments of the same
class; vowel-consonant substitutions are forbidden outright. Segment
costs start out as unit costs and can be re-estimated iteratively from
pointwise mutual information over the alignment columns the current
costs produce, until the alignments stop changing.
"""

from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, Mapping, Sequence, Tuple

from .model import (
    GAP,
    PMI_INDUCED,
    MissingSegmentCostError,
    SegmentDistanceTable,
    Transcription,
    ValidationError,
)

DEFAULT_SMOOTHING = 0.5
DEFAULT_MAX_ITER = 15


class DegenerateTableError(ValueError):
    """All observed pairs share one PMI value; keep unit costs instead."""


def _segments(x):
    return x.segments if isinstance(x, Transcription) else tuple(x)


def align(a, b, costs: SegmentDistanceTable):
    """Least-cost alignment of two segment sequences.

    Returns ``(distance, alignment)`` where ``alignment`` is a list of
    ``(token_a, token_b)`` columns with ``"-"`` marking gaps, and
    ``distance`` is the summed column cost divided by the number of
    columns. Ties between least-cost alignments are resolved by
    preferring substitution columns (the returned alignment has the most
    substitutions possible at minimum cost, which also pins its length
    and keeps the distance exactly symmetric), then deletion from ``a``
    over insertion from ``b`` at each traceback step.
    """
    sa = _segments(a)
    sb = _segments(b)
    if not sa or not sb:
        raise ValidationError("cannot align an empty transcription")
    n, m = len(sa), len(sb)
    inf = math.inf
    missing = []

    def _sub(x, y):
        try:
            return costs.sub_cost(x, y)
        except MissingSegmentCostError as exc:
            missing.append(exc)
            return inf

    def _indel(t):
        try:
            return costs.indel_cost(t)
        except MissingSegmentCostError as exc:
            missing.append(exc)
            return inf

    # costs the table does not know are +inf: those routes are unavailable
    sub = [[None] * m for _ in range(n)]
    for i, x in enumerate(sa):
        for j, y in enumerate(sb):
            if x.cls == y.cls:
                sub[i][j] = _sub(x.token, y.token)
    del_cost = [_indel(x.token) for x in sa]
    ins_cost = [_indel(y.token) for y in sb]
    # dp: min summed cost; ns: max substitution columns among min-cost paths
    dp = [[0.0] * (m + 1) for _ in range(n + 1)]
    ns = [[0] * (m + 1) for _ in range(n + 1)]
    for i in range(1, n + 1):
        dp[i][0] = dp[i - 1][0] + del_cost[i - 1]
    for j in range(1, m + 1):
        dp[0][j] = dp[0][j - 1] + ins_cost[j - 1]
    for i in range(1, n + 1):
        row, srow = dp[i], ns[i]
        above, sabove = dp[i - 1], ns[i - 1]
        subs = sub[i - 1]
        dci = del_cost[i - 1]
        for j in range(1, m + 1):
            s = subs[j - 1]
            best, best_s = inf, 0
            if s is not None:
                best, best_s = above[j - 1] + s, sabove[j - 1] + 1
            v = above[j] + dci
            if v < best or (v == best and sabove[j] > best_s):
                best, best_s = v, sabove[j]
            v = row[j - 1] + ins_cost[j - 1]
            if v < best or (v == best and srow[j - 1] > best_s):
                best, best_s = v, srow[j - 1]
            row[j], srow[j] = best, best_s

    raw = dp[n][m]
    if raw == inf:
        raise missing[0] if missing else ValidationError("no admissible alignment")
    columns = []
    i, j = n, m
    while i > 0 or j > 0:
        if (
            i > 0
            and j > 0
            and sub[i - 1][j - 1] is not None
            and dp[i][j] == dp[i - 1][j - 1] + sub[i - 1][j - 1]
            and ns[i][j] == ns[i - 1][j - 1] + 1
        ):
            columns.append((sa[i - 1].token, sb[j - 1].token))
            i, j = i - 1, j - 1
        elif i > 0 and dp[i][j] == dp[i - 1][j] + del_cost[i - 1] and ns[i][j] == ns[i - 1][j]:
            columns.append((sa[i - 1].token, GAP))
            i -= 1
        else:
            columns.append((GAP, sb[j - 1].token))
            j -= 1
    columns.reverse()
    return raw / len(columns), columns


@dataclass(frozen=True)
class AlignmentCounts:
    """Column statistics over a set of alignments.

    ``pair_counts`` is keyed on unordered token pairs (gap included);
    ``token_counts`` counts both tokens of every column, so it sums to
    twice ``total_pairs``.
    """

    pair_counts: Mapping
    token_counts: Mapping
    total_pairs: int

    def __post_init__(self):
        if self.total_pairs < 1:
            raise ValidationError("no alignment columns counted")
        if sum(self.pair_counts.values()) != self.total_pairs:
            raise ValidationError("pair counts do not sum to total_pairs")
        if sum(self.token_counts.values()) != 2 * self.total_pairs:
            raise ValidationError("token counts must sum to twice total_pairs")


def collect_counts(alignments: Iterable[Sequence[Tuple[str, str]]]) -> AlignmentCounts:
    """Count every column of every alignment once, pair order normalized."""
    pair_counts = Counter()
    token_counts = Counter()
    total = 0
    for alignment in alignments:
        for x, y in alignment:
            key = (x, y) if x <= y else (y, x)
            pair_counts[key] += 1
            token_counts[x] += 1
            token_counts[y] += 1
            total += 1
    if total == 0:
        raise ValidationError("empty alignment set")
    return AlignmentCounts(dict(pair_counts), dict(token_counts), total)


def pmi_table(counts: AlignmentCounts, smoothing: float = DEFAULT_SMOOTHING) -> SegmentDistanceTable:
    """Segment distances from pointwise mutual information of aligned pairs.

    ``PMI(x, y) = log2(p(x, y) / (p(x) p(y)))`` with additive smoothing on
    the joint counts; distances are the PMI values flipped and rescaled
    affinely onto [0, 1]. Pairs containing the gap token become indel
    costs. The gap-gap pair never occurs in an alignment and is excluded.
    """
    if smoothing < 0:
        raise ValidationError(f"smoothing must be >= 0, got {smoothing}")
    total = counts.total_pairs
    vocab = sorted(t for t, c in counts.token_counts.items() if c > 0)
    v_sq = len(vocab) ** 2
    denom = total + smoothing * v_sq
    marginal = {t: counts.token_counts[t] / (2.0 * total) for t in vocab}

    pmi = {}
    for idx, x in enumerate(vocab):
        for y in vocab[idx:]:
            if x == GAP and y == GAP:
                continue
            joint = counts.pair_counts.get((x, y), 0) + smoothing
            if joint <= 0:
                continue
            p_xy = joint / denom
            pmi[(x, y)] = math.log2(p_xy / (marginal[x] * marginal[y]))

    hi = max(pmi.values())
    lo = min(pmi.values())
    if hi == lo:
        raise DegenerateTableError(
            "all pairs share one PMI value; keep unit costs for this corpus"
        )
    span = hi - lo
    sub = {}
    indel = {}
    for (x, y), value in pmi.items():
        cost = (hi - value) / span
        if GAP in (x, y):
            indel[y if x == GAP else x] = cost
        else:
            sub[(x, y)] = cost
    return SegmentDistanceTable(sub, indel, PMI_INDUCED)


def corpus_pairs(corpus: Iterable[Transcription]):
    """Same-word cross-location transcription pairs, deterministically ordered."""
    by_word = {}
    for t in corpus:
        by_word.setdefault(t.word_id, {})[t.location_id] = t
    pairs = []
    for word in sorted(by_word):
        locs = sorted(by_word[word])
        for la, lb in combinations(locs, 2):
            pairs.append((by_word[word][la], by_word[word][lb]))
    return pairs


def induce(
    corpus: Iterable[Transcription],
    max_iter: int = DEFAULT_MAX_ITER,
    smoothing: float = DEFAULT_SMOOTHING,
):
    """Iteratively induce segment distances from a transcription corpus.

    Starts from unit costs, alternates aligning all same-word location
    pairs with re-estimating the PMI cost table, and stops when the
    multiset of optimal alignments repeats (fixed point) or after
    ``max_iter`` rounds. Returns ``(table, iterations)`` where
    ``iterations`` counts completed re-estimations. A degenerate PMI
    table on the first round keeps unit costs.
    """
    corpus = list(corpus)
    pairs = corpus_pairs(corpus)
    if not pairs:
        raise ValidationError("corpus must span at least 2 locations sharing a word")
    table = SegmentDistanceTable.unit()
    iterations = 0
    previous = None
    for _ in range(max_iter):
        alignments = [align(a, b, table)[1] for a, b in pairs]
        if alignments == previous:
            break
        previous = alignments
        counts = collect_counts(alignments)
        try:
            new_table = pmi_table(counts, smoothing)
        except DegenerateTableError:
            break
        table = new_table
        iterations += 1
    return table, iterations
