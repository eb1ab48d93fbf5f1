"""Seeded fixture generators. All randomness in the test suite lives here."""

from __future__ import annotations

import numpy as np

import dialectmap as dm
from dialectmap import io

VOWELS = ("a", "e")
CONSONANTS = ("p", "t")
ALPHABET = VOWELS + CONSONANTS
_CLS = {"a": "vowel", "e": "vowel", "p": "consonant", "t": "consonant"}
_SEGMENTS = {t: dm.Segment(t, _CLS[t]) for t in ALPHABET}


def seg_seq(tokens):
    return [_SEGMENTS[t] for t in tokens]


def transcription(loc, word, tokens):
    return dm.Transcription(loc, word, tuple(_SEGMENTS[t] for t in tokens))


def random_distance_matrix(rng, n, low=0.1, high=10.0):
    a = rng.uniform(low, high, size=(n, n))
    v = (a + a.T) / 2.0
    np.fill_diagonal(v, 0.0)
    return dm.DistanceMatrix(tuple(f"L{i:02d}" for i in range(n)), v)


def random_embedding(rng, t, d, loc="x", word="w", model="m", layer=1, scale=1.0):
    frames = rng.normal(0.0, scale, size=(t, d)).astype(np.float32)
    return dm.EmbeddingSequence(loc, word, model, layer, frames)


# ---------------------------------------------------------------------------
# the synthetic four-group survey used by the end-to-end tests

N_GROUPS = 4
LOCS_PER_GROUP = 10
N_WORDS = 10
MODEL_ID = "synth"
GOOD_LAYER = 1
NOISY_LAYER = 2
EMB_DIM = 6
SAMPLE_RATE = 16000

GROUP_CENTERS = [(52.0, 4.5), (53.2, 6.5), (51.2, 5.9), (52.8, 4.9)]
GROUP_LABELS = ["Frisian-like", "Saxon-like", "Limburg-like", "Core"]


def survey_location_table():
    entries = []
    for g in range(N_GROUPS):
        lat0, lon0 = GROUP_CENTERS[g]
        for i in range(LOCS_PER_GROUP):
            entries.append(
                dm.Location(
                    location_id=f"G{g}L{i:02d}",
                    name=f"Place {g}-{i}",
                    lat=lat0 + 0.03 * (i % 5),
                    lon=lon0 + 0.03 * (i // 5),
                    gold_label=GROUP_LABELS[g],
                )
            )
    return dm.LocationTable(tuple(entries))


def survey_words():
    return [f"w{k:02d}" for k in range(N_WORDS)]


def build_survey_archive(root, seed=20240501):
    """Two-layer embedding archive over 40 locations in 4 separated groups.

    Layer 1 embeds a strong group signature: within-group DTW distances
    stay well below between-group ones. Layer 2 carries per-location
    noise only, so its clustering cannot match the gold partition.
    """
    rng = np.random.default_rng(seed)
    table = survey_location_table()
    words = survey_words()

    lengths = {w: int(rng.integers(8, 13)) for w in words}
    word_base = {w: rng.normal(0.0, 1.0, size=(lengths[w], EMB_DIM)) for w in words}
    group_offset = {}
    for g in range(N_GROUPS):
        direction = np.zeros(EMB_DIM)
        direction[g % EMB_DIM] = 1.0
        group_offset[g] = 8.0 * direction

    for e in table.entries:
        g = int(e.location_id[1])
        for w in words:
            good = word_base[w] + group_offset[g] + rng.normal(0.0, 0.05, size=word_base[w].shape)
            seq = dm.EmbeddingSequence(e.location_id, w, MODEL_ID, GOOD_LAYER, good.astype(np.float32))
            io.write_embedding(seq, io.embedding_path(root, MODEL_ID, GOOD_LAYER, e.location_id, w))

            noisy = word_base[w] + rng.normal(0.0, 3.0, size=word_base[w].shape)
            seq = dm.EmbeddingSequence(e.location_id, w, MODEL_ID, NOISY_LAYER, noisy.astype(np.float32))
            io.write_embedding(seq, io.embedding_path(root, MODEL_ID, NOISY_LAYER, e.location_id, w))

    io.write_manifest(
        root,
        [{"model_id": MODEL_ID, "layers": 2, "dim": EMB_DIM, "sample_rate": SAMPLE_RATE}],
    )
    return table, words


def write_survey_locations(table, path):
    io.write_locations(table, path)
    return path
