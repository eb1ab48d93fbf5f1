"""On-disk formats: embeddings, transcriptions, locations, matrices, maps.

Binary embeddings use a fixed little-endian layout; all text formats are
UTF-8 with ``\\n`` line endings so golden files diff cleanly. Writers and
readers are reentrant and keep no shared state.
"""

from __future__ import annotations

import csv
import json
import logging
import re
import struct
import unicodedata
from pathlib import Path

import numpy as np

from .model import (
    DistanceMatrix,
    Dendrogram,
    EmbeddingSequence,
    LocationTable,
    Partition,
    SegmentDistanceTable,
    Transcription,
    ValidationError,
    validate_location_table,
    GAP,
    PMI_INDUCED,
    UNIT,
)
from .segments import DEFAULT_TABLE

log = logging.getLogger(__name__)

EMBEDDING_MAGIC = b"DEMB"
EMBEDDING_VERSION = 1
_HEADER = struct.Struct("<4sHHII")  # magic, version, reserved, T, d

FORMAT_VERSION = 1

MATRIX_SYMMETRY_TOL = 1e-9
MATRIX_DIAGONAL_TOL = 1e-12


class FileFormatError(ValueError):
    """A file does not conform to its declared format."""


# ---------------------------------------------------------------------------
# embeddings (.demb) and the archive layout


def write_embedding(seq: EmbeddingSequence, path):
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    frames = np.ascontiguousarray(seq.frames, dtype="<f4")
    header = _HEADER.pack(EMBEDDING_MAGIC, EMBEDDING_VERSION, 0, seq.n_frames, seq.dim)
    with open(path, "wb") as fh:
        fh.write(header)
        fh.write(frames.tobytes())


def read_embedding(path, *, location_id=None, word_id=None, model_id=None, layer=None):
    """Read a ``.demb`` file.

    Identity fields are not stored in the file; they are taken from the
    keyword arguments or, failing that, inferred from an archive-layout
    path ``<model>/layerNN/<location>/<word>.demb``.
    """
    path = Path(path)
    data = path.read_bytes()
    if len(data) < _HEADER.size:
        raise FileFormatError(f"{path}: file too short for header ({len(data)} bytes)")
    magic, version, _reserved, t, d = _HEADER.unpack_from(data)
    if magic != EMBEDDING_MAGIC:
        raise FileFormatError(f"{path}: bad magic {magic!r}, expected {EMBEDDING_MAGIC!r}")
    if version != EMBEDDING_VERSION:
        raise FileFormatError(f"{path}: unsupported version {version}")
    expected = _HEADER.size + 4 * t * d
    if len(data) != expected:
        raise FileFormatError(
            f"{path}: truncated or oversized payload, expected {expected} bytes, got {len(data)}"
        )
    frames = np.frombuffer(data, dtype="<f4", offset=_HEADER.size).reshape(t, d)
    inferred = _infer_ids_from_path(path)
    return EmbeddingSequence(
        location_id=location_id if location_id is not None else inferred[2],
        word_id=word_id if word_id is not None else inferred[3],
        model_id=model_id if model_id is not None else inferred[0],
        layer=layer if layer is not None else inferred[1],
        frames=frames,
    )


_LAYER_DIR = re.compile(r"^layer(\d{2,})$")


def _infer_ids_from_path(path: Path):
    word = path.stem
    parts = path.parent.parts
    if len(parts) >= 3:
        m = _LAYER_DIR.match(parts[-2])
        if m:
            return parts[-3], int(m.group(1)), parts[-1], word
    return "", 1, "", word


def embedding_path(root, model_id, layer, location_id, word_id) -> Path:
    if int(layer) < 1:
        raise ValidationError(f"layer must be >= 1, got {layer}")
    return Path(root) / model_id / f"layer{int(layer):02d}" / location_id / f"{word_id}.demb"


def write_manifest(root, models):
    """``models``: list of dicts with model_id, layers, dim, sample_rate."""
    payload = {"format_version": FORMAT_VERSION, "models": list(models)}
    path = Path(root) / "manifest.json"
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_manifest(root):
    path = Path(root) / "manifest.json"
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    if payload.get("format_version") != FORMAT_VERSION:
        raise FileFormatError(f"{path}: unsupported format_version {payload.get('format_version')}")
    return payload["models"]


def archive_words(root, model_id, layer, location_id):
    """Word ids with an embedding file present for this location."""
    d = Path(root) / model_id / f"layer{int(layer):02d}" / location_id
    if not d.is_dir():
        return []
    return sorted(p.stem for p in d.glob("*.demb"))


# ---------------------------------------------------------------------------
# transcriptions (TSV)


def read_transcriptions(path, class_table=None):
    """Parse a transcription TSV: ``location<TAB>word<TAB>segments``.

    Segment tokens are space-separated, NFC-normalized and classified via
    the segment class table. Lines starting with ``#`` and blank lines are
    skipped. Duplicate (location, word) rows: last one wins, with a warning.
    """
    table = class_table or DEFAULT_TABLE
    out = {}
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip() or line.lstrip().startswith("#"):
                continue
            cols = line.split("\t")
            if len(cols) != 3 or not cols[0].strip() or not cols[1].strip() or not cols[2].strip():
                raise FileFormatError(
                    f"{path}:{lineno}: malformed row, expected location<TAB>word<TAB>segments"
                )
            loc, word, seg_field = cols[0].strip(), cols[1].strip(), cols[2].strip()
            tokens = [unicodedata.normalize("NFC", t) for t in seg_field.split()]
            segments = tuple(table.segment(t) for t in tokens)
            key = (loc, word)
            if key in out:
                log.warning("%s:%d: duplicate transcription for %s, keeping the later row", path, lineno, key)
            out[key] = Transcription(loc, word, segments)
    return list(out.values())


# ---------------------------------------------------------------------------
# locations (CSV)


def read_locations(path) -> LocationTable:
    """CSV with header ``location,name,lat,lon,gold`` (gold may be empty)."""
    rows = []
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        for r in reader:
            rows.append(r)
    return validate_location_table(rows)


def write_locations(table: LocationTable, path):
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["location", "name", "lat", "lon", "gold"])
        for e in table.entries:
            w.writerow([e.location_id, e.name, _fmt(e.lat), _fmt(e.lon), e.gold_label or ""])


# ---------------------------------------------------------------------------
# distance matrices (CSV)


def _fmt(v: float) -> str:
    return f"{float(v):.9g}"


def write_distance_matrix(m: DistanceMatrix, path):
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write("id," + ",".join(m.index) + "\n")
        for i, loc in enumerate(m.index):
            fh.write(loc + "," + ",".join(_fmt(v) for v in m.values[i]) + "\n")


def read_distance_matrix(path) -> DistanceMatrix:
    path = Path(path)
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise FileFormatError(f"{path}: empty file") from None
        if not header or header[0] != "id":
            raise FileFormatError(f"{path}: first header field must be 'id'")
        index = tuple(header[1:])
        n = len(index)
        values = np.zeros((n, n))
        rows_seen = 0
        for i, row in enumerate(reader):
            if i >= n:
                raise FileFormatError(f"{path}: more data rows than index entries ({n})")
            if len(row) != n + 1:
                raise FileFormatError(f"{path}: row {i + 2} has {len(row)} fields, expected {n + 1}")
            if row[0] != index[i]:
                raise FileFormatError(
                    f"{path}: row {i + 2} label {row[0]!r} does not match header order ({index[i]!r})"
                )
            values[i] = [float(v) for v in row[1:]]
            rows_seen += 1
        if rows_seen != n:
            raise FileFormatError(f"{path}: {rows_seen} data rows for {n} index entries")
    asym = np.max(np.abs(values - values.T), initial=0.0)
    if asym > MATRIX_SYMMETRY_TOL:
        raise FileFormatError(f"{path}: asymmetry {asym:.3g} exceeds tolerance {MATRIX_SYMMETRY_TOL}")
    diag = np.max(np.abs(np.diag(values)), initial=0.0)
    if diag > MATRIX_DIAGONAL_TOL:
        raise FileFormatError(f"{path}: nonzero diagonal {diag:.3g} exceeds tolerance {MATRIX_DIAGONAL_TOL}")
    values = (values + values.T) / 2.0
    np.fill_diagonal(values, 0.0)
    return DistanceMatrix(index, values)


# ---------------------------------------------------------------------------
# dendrograms (JSON) and partitions (CSV)


def write_dendrogram(d: Dendrogram, path):
    payload = {
        "format_version": FORMAT_VERSION,
        "n": d.n,
        "labels": list(d.labels),
        "merges": [[a, b, h] for a, b, h in d.merges],
    }
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


def read_dendrogram(path) -> Dendrogram:
    with open(path, encoding="utf-8") as fh:
        payload = json.load(fh)
    try:
        return Dendrogram(int(payload["n"]), tuple(payload["labels"]), tuple(map(tuple, payload["merges"])))
    except (KeyError, TypeError) as exc:
        raise FileFormatError(f"{path}: not a dendrogram file ({exc})") from None


def write_partition(p: Partition, path, index=None):
    order = list(index) if index is not None else sorted(p.assignment)
    missing = [loc for loc in order if loc not in p.assignment]
    if missing:
        raise ValidationError([f"partition is missing location {loc!r}" for loc in missing])
    with open(path, "w", encoding="utf-8", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["location", "cluster"])
        for loc in order:
            w.writerow([loc, p.assignment[loc]])


def read_partition(path) -> Partition:
    labels = {}
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != ["location", "cluster"]:
            raise FileFormatError(f"{path}: expected header location,cluster")
        for r in reader:
            labels[r["location"]] = int(r["cluster"])
    if not labels:
        raise FileFormatError(f"{path}: empty partition")
    return Partition.from_labels(sorted(labels), labels)


# ---------------------------------------------------------------------------
# GeoJSON maps


def write_geojson(table: LocationTable, path, *, partition: Partition = None, colors=None):
    """Point FeatureCollection with a ``cluster`` or ``rgb`` property per location.

    ``colors`` is a mapping location_id -> "#RRGGBB" (or a sequence aligned
    with the table). Exactly one of ``partition``/``colors`` must be given.
    """
    if (partition is None) == (colors is None):
        raise ValueError("pass exactly one of partition= or colors=")
    if colors is not None and not hasattr(colors, "keys"):
        if len(colors) != len(table.entries):
            raise ValidationError(f"{len(colors)} colors for {len(table.entries)} locations")
        colors = {e.location_id: c for e, c in zip(table.entries, colors)}
    features = []
    for e in table.entries:
        props = {"location": e.location_id, "name": e.name}
        if partition is not None:
            if e.location_id not in partition.assignment:
                raise ValidationError(f"partition is missing location {e.location_id!r}")
            props["cluster"] = int(partition.assignment[e.location_id])
        else:
            if e.location_id not in colors:
                raise ValidationError(f"no color for location {e.location_id!r}")
            props["rgb"] = colors[e.location_id]
        features.append(
            {
                "type": "Feature",
                "geometry": {"type": "Point", "coordinates": [e.lon, e.lat]},
                "properties": props,
            }
        )
    payload = {"type": "FeatureCollection", "features": features}
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, ensure_ascii=False)
        fh.write("\n")


# ---------------------------------------------------------------------------
# segment cost tables (TSV)


def write_cost_table(table: SegmentDistanceTable, path):
    """``tokenA<TAB>tokenB<TAB>cost`` rows; the gap token is ``-``."""
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(f"# format_version: {FORMAT_VERSION}\n")
        fh.write(f"# provenance: {table.provenance}\n")
        for (a, b), cost in sorted(table.sub.items()):
            fh.write(f"{a}\t{b}\t{_fmt(cost)}\n")
        for tok, cost in sorted(table.indel.items()):
            fh.write(f"{tok}\t{GAP}\t{_fmt(cost)}\n")


def read_cost_table(path) -> SegmentDistanceTable:
    sub = {}
    indel = {}
    provenance = PMI_INDUCED
    path = Path(path)
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            line = line.rstrip("\n")
            if not line.strip():
                continue
            if line.startswith("#"):
                m = re.match(r"#\s*provenance:\s*(\w+)", line)
                if m:
                    provenance = m.group(1)
                continue
            cols = line.split("\t")
            if len(cols) != 3:
                raise FileFormatError(f"{path}:{lineno}: expected tokenA<TAB>tokenB<TAB>cost")
            a, b, cost = cols[0], cols[1], float(cols[2])
            if a == GAP and b == GAP:
                raise FileFormatError(f"{path}:{lineno}: gap-gap pair is not a valid entry")
            if GAP in (a, b):
                tok = b if a == GAP else a
                indel[tok] = cost
            else:
                sub[(a, b)] = cost
    if provenance == UNIT:
        return SegmentDistanceTable.unit()
    return SegmentDistanceTable(sub, indel, provenance)
