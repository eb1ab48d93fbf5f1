# The whole pipeline on a small synthetic survey, end to end:
# embedding archive -> DTW distance matrix -> linkage sweep -> CDistance
# against the gold grouping -> cluster + MDS GeoJSON maps.
#
# Outputs land in demos/output/. Everything is seeded and deterministic;
# rerunning reproduces the files byte for byte.

from pathlib import Path

import numpy as np

from dialectmap import EmbeddingSequence, Location, LocationTable, io
from dialectmap.cli import main

OUT = Path(__file__).parent / "output"
ARCHIVE = OUT / "archive"
rng = np.random.default_rng(42)

# %% Build a 3-group survey of 12 locations around three Dutch-ish centers.
centers = {"west": (52.2, 4.6), "north": (53.2, 6.4), "south": (51.2, 5.9)}
entries = []
for g, (group, (lat, lon)) in enumerate(centers.items()):
    for i in range(4):
        entries.append(
            Location(f"{group}{i}", f"{group.title()} {i}", lat + 0.05 * i, lon + 0.02 * i, group)
        )
table = LocationTable(tuple(entries))
OUT.mkdir(exist_ok=True)
io.write_locations(table, OUT / "locations.csv")

# %% Synthesize embedding sequences: one base signal per word, a strong
# per-group offset, light per-location noise. Layer 2 gets no group
# signal at all, so the sweep should prefer layer 1.
words = [f"w{k}" for k in range(5)]
offsets = {g: np.eye(8)[i] * 6.0 for i, g in enumerate(centers)}
for word in words:
    base = rng.normal(size=(rng.integers(8, 13), 8))
    for e in table.entries:
        group = e.gold_label
        good = base + offsets[group] + rng.normal(0, 0.05, size=base.shape)
        noisy = base + rng.normal(0, 2.0, size=base.shape)
        for layer, frames in ((1, good), (2, noisy)):
            seq = EmbeddingSequence(e.location_id, word, "demo", layer, frames.astype(np.float32))
            io.write_embedding(seq, io.embedding_path(ARCHIVE, "demo", layer, e.location_id, word))
io.write_manifest(ARCHIVE, [{"model_id": "demo", "layers": 2, "dim": 8, "sample_rate": 16000}])

# %% Distance matrices for both layers, then the sweep.
for layer in (1, 2):
    main([
        "dist-acoustic",
        "--archive", str(ARCHIVE), "--model", "demo", "--layer", str(layer),
        "--locations", str(OUT / "locations.csv"),
        "--out", str(OUT / f"demo_l{layer}.csv"),
    ])

main([
    "sweep",
    f"demo:1:{OUT / 'demo_l1.csv'}",
    f"demo:2:{OUT / 'demo_l2.csv'}",
    "--gold", str(OUT / "locations.csv"),
    "--out", str(OUT / "report.csv"),
    "--maps-dir", str(OUT / "maps"),
])

print("\nreport.csv:")
print((OUT / "report.csv").read_text(), end="")
print("wrote", sorted(p.name for p in (OUT / "maps").iterdir()))
