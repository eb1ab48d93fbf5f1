# Dynamic time warping over embedding sequences.
#
# The distance between two frame sequences is the minimum accumulated
# local cost over all monotone warping paths: a diagonal step counts the
# local cost twice, horizontal/vertical steps once, and the total is
# divided by the sum of the two lengths so words of different duration
# stay comparable.

import numpy as np

from dialectmap import DtwConfig, EmbeddingSequence, dtw_distance

rng = np.random.default_rng(1)

# %% Two pronunciations of the "same word": one is a time-stretched copy.
base = np.cumsum(rng.normal(size=(20, 4)), axis=0).astype(np.float32)
stretched = np.repeat(base, 2, axis=0)  # twice as slow

x = EmbeddingSequence("loc_a", "word", "demo", 1, base)
y = EmbeddingSequence("loc_b", "word", "demo", 1, stretched)

print("identical:         ", dtw_distance(x, x))
print("stretched copy:    ", round(dtw_distance(x, y), 4), "(pure time stretching is free)")

# %% A genuinely different pronunciation lands much further away.
other = np.cumsum(rng.normal(size=(20, 4)), axis=0).astype(np.float32)
z = EmbeddingSequence("loc_c", "word", "demo", 1, other)
print("different signal:  ", round(dtw_distance(x, z), 4))

# %% Hand-checkable examples.
print()
a = EmbeddingSequence("a", "w", "demo", 1, np.array([[0.0], [0.0]], dtype=np.float32))
b = EmbeddingSequence("b", "w", "demo", 1, np.array([[1.0]], dtype=np.float32))
print("[(0),(0)] vs [(1)] ->", dtw_distance(a, b), "(= 2/3: two cells of cost 1 over length 3)")

# %% A Sakoe-Chiba band restricts how far the path may wander off the
# diagonal. It must cover the length difference (here 20 frames) or no
# path exists; wider bands can only lower the distance.
for band in (20, 24, 30, None):
    print(f"band={band}: ", round(dtw_distance(x, y, DtwConfig(band=band)), 6))
