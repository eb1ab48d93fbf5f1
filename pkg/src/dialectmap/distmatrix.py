"""Aggregate per-word distances into a location-by-location matrix.

Entry (i, j) is the arithmetic mean of the per-word distances over the
words available at both locations. Each unordered pair is computed once
and the words of a pair are summed in sorted order, so the result does
not depend on word-list order or on the number of worker threads.
"""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, Mapping, Optional

import numpy as np

from . import io
from .dtw import DEFAULT_CONFIG, DtwConfig, dtw_distance
from .levenshtein import align
from .model import DistanceMatrix, LocationTable, SegmentDistanceTable, ValidationError


class PairCoverageError(ValidationError):
    """Some location pair shares fewer words than ``min_shared_words``."""


def build_matrix(
    index,
    words,
    available: Mapping,
    word_distance: Callable[[str, str, str], float],
    min_shared_words: int = 1,
    threads: int = 1,
) -> DistanceMatrix:
    """Fill the symmetric matrix from a per-(pair, word) distance callback.

    ``available`` maps location_id -> set of word ids present there;
    ``word_distance(loc_a, loc_b, word)`` returns one word's distance.
    """
    index = tuple(index)
    words = sorted(set(words))
    if min_shared_words < 1:
        raise ValidationError(f"min_shared_words must be >= 1, got {min_shared_words}")
    if not words:
        raise ValidationError("empty word list")

    shared = {}
    violations = []
    for i, a in enumerate(index):
        for b in index[i + 1 :]:
            ws = [w for w in words if w in available.get(a, ()) and w in available.get(b, ())]
            if len(ws) < min_shared_words:
                violations.append(
                    f"locations ({a}, {b}) share {len(ws)} words, need {min_shared_words}"
                )
            shared[(a, b)] = ws
    if violations:
        raise PairCoverageError(violations)

    pairs = sorted(shared)

    def mean_for(pair):
        a, b = pair
        ws = shared[pair]
        total = 0.0
        for w in ws:
            total += word_distance(a, b, w)
        return total / len(ws)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            means = list(pool.map(mean_for, pairs))
    else:
        means = [mean_for(p) for p in pairs]

    n = len(index)
    pos = {loc: i for i, loc in enumerate(index)}
    values = np.zeros((n, n))
    for (a, b), d in zip(pairs, means):
        values[pos[a], pos[b]] = d
        values[pos[b], pos[a]] = d
    return DistanceMatrix(index, values)


def matrix_from_embeddings(
    archive_root,
    model_id: str,
    layer: int,
    locations: LocationTable,
    words: Optional[Iterable[str]] = None,
    config: DtwConfig = DEFAULT_CONFIG,
    min_shared_words: int = 1,
    threads: int = 1,
) -> DistanceMatrix:
    """DTW distance matrix for one (model, layer) of an embedding archive.

    Availability follows the files present in the archive; a word missing
    at one location simply drops out of that location's pairs.
    """
    index = locations.ids()
    wanted = None if words is None else set(words)
    available = {}
    for loc in index:
        found = io.archive_words(archive_root, model_id, layer, loc)
        available[loc] = set(found if wanted is None else (w for w in found if w in wanted))
    word_list = sorted(set().union(*available.values())) if words is None else list(words)

    # Load everything up front: surfaces unreadable files before any DTW
    # work starts and keeps the pair workers read-only.
    cache = {}
    for loc in index:
        for word in sorted(available[loc]):
            path = io.embedding_path(archive_root, model_id, layer, loc, word)
            cache[(loc, word)] = io.read_embedding(
                path, location_id=loc, word_id=word, model_id=model_id, layer=layer
            )

    def word_distance(a, b, w):
        return dtw_distance(cache[(a, w)], cache[(b, w)], config)

    return build_matrix(index, word_list, available, word_distance, min_shared_words, threads)


def matrix_from_transcriptions(
    transcriptions,
    locations: LocationTable,
    costs: SegmentDistanceTable,
    words: Optional[Iterable[str]] = None,
    min_shared_words: int = 1,
    threads: int = 1,
) -> DistanceMatrix:
    """Levenshtein distance matrix from a transcription corpus."""
    index = locations.ids()
    by_key = {(t.location_id, t.word_id): t for t in transcriptions}
    available = {loc: set() for loc in index}
    for loc, word in by_key:
        if loc in available and (words is None or word in set(words)):
            available[loc].add(word)
    word_list = sorted(set().union(*available.values())) if words is None else list(words)

    def word_distance(a, b, w):
        return align(by_key[(a, w)], by_key[(b, w)], costs)[0]

    return build_matrix(index, word_list, available, word_distance, min_shared_words, threads)
