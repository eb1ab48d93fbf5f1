# Vowel/consonant-sensitive alignment with PMI-induced segment costs.
#
# Starting from unit costs, the induction loop aligns every same-word
# location pair, counts aligned segment pairs, converts their pointwise
# mutual information into costs in [0, 1], and repeats until the
# alignments stop changing. Systematic sound correspondences end up
# cheap; accidental pairings end up expensive.

from dialectmap import SegmentDistanceTable, Transcription, align, induce, segment


def tr(loc, word, ipa):
    return Transcription(loc, word, tuple(segment(t) for t in ipa.split()))


# Two dialect areas: the north systematically fricativizes final /k/ to
# /x/ and raises /a/ to /e/ in some words.
corpus = [
    tr("south1", "dough", "d e: k"),
    tr("south2", "dough", "d e: k"),
    tr("north1", "dough", "d e: x"),
    tr("north2", "dough", "d e: x"),
    tr("south1", "arms", "a r m"),
    tr("south2", "arms", "a r m"),
    tr("north1", "arms", "e r m"),
    tr("north2", "arms", "e r m"),
    tr("south1", "fire", "v y: r"),
    tr("south2", "fire", "v y: r"),
    tr("north1", "fire", "v u: r"),
    tr("north2", "fire", "v u: r"),
]

table, iterations = induce(corpus, max_iter=15, smoothing=0.5)
print(f"induction converged after {iterations} iteration(s)\n")

print("correspondence pairs (systematic, cheap):")
for pair in (("k", "x"), ("a", "e"), ("y:", "u:")):
    print(f"  d{pair} = {table.sub_cost(*pair):.3f}")

print("identity pairs:")
for tok in ("d", "r", "m"):
    print(f"  d({tok},{tok}) = {table.sub_cost(tok, tok):.3f}")

# %% The vowel/consonant constraint holds no matter what the costs say:
# a vowel can never substitute a consonant, so aligning "a" with "t"
# needs two gap columns.
unit = SegmentDistanceTable.unit()
dist, columns = align(tr("x", "w", "a"), tr("y", "w", "t"), unit)
print("\nalign 'a' vs 't':", columns, "normalized distance", dist)

# %% Distances between whole transcriptions, with the induced table.
d_corr, cols = align(tr("south1", "dough", "d e: k"), tr("north1", "dough", "d e: x"), table)
print("\nsouth/north 'dough' alignment:", cols)
print("normalized distance:", round(d_corr, 4), "(cheap: k~x is a learned correspondence)")
