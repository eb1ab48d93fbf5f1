# Agglomerative clustering with seven linkages, and picking the one
# whose dendrogram is most faithful to the distances (highest cophenetic
# correlation).

import numpy as np

from dialectmap import (
    DistanceMatrix,
    METHODS,
    cophenetic_correlation,
    cut,
    inversions,
    linkage,
    select_method,
)

rng = np.random.default_rng(7)

# %% Three tight groups of points on a line, plus a bit of noise.
centers = np.array([0.0, 5.0, 12.0])
xs = np.sort(np.concatenate([c + rng.normal(0, 0.3, size=5) for c in centers]))
v = np.abs(xs[:, None] - xs[None, :])
m = DistanceMatrix(tuple(f"p{i:02d}" for i in range(len(xs))), v)

for method in METHODS:
    d = linkage(m, method)
    ccc = cophenetic_correlation(m, d)
    heights = ", ".join(f"{h:.2f}" for _, _, h in d.merges[-3:])
    flag = " (inversions!)" if inversions(d) else ""
    print(f"{method}: ccc={ccc:.4f}  last merges at [{heights}]{flag}")

# %% select_method runs all seven and keeps the ccc argmax.
method, dendro, ccc = select_method(m)
print(f"\nselected: {method} with ccc={ccc:.4f}")

partition = cut(dendro, 3)
print("3-way cut:")
for label, members in enumerate(partition.clusters()):
    print(f"  cluster {label}: {members}")

# %% Centroid linkage can produce inversions (a merge lower than the
# previous one); cutting by merge order instead of height keeps the
# partitions nested anyway.
tri = np.array([[0.0, 0.0], [1.0, 0.0], [0.5, 0.9]])
dv = np.sqrt(((tri[:, None] - tri[None, :]) ** 2).sum(-1))
mtri = DistanceMatrix(("a", "b", "c"), dv)
duc = linkage(mtri, "uc")
print("\nnear-equilateral triangle under uc:", [round(h, 3) for _, _, h in duc.merges],
      "inversions at", inversions(duc))
