"""Core domain types shared by the whole pipeline.

Every type is validated on construction and immutable afterwards, so
instances are safe to share across threads. NumPy payloads are stored as
read-only arrays.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Sequence

import numpy as np

VOWEL = "vowel"
CONSONANT = "consonant"
GAP = "-"

UNIT = "unit"
PMI_INDUCED = "pmi_induced"


class ValidationError(ValueError):
    """A domain object violates its invariants.

    ``violations`` holds one message per problem found, so callers can
    report everything at once instead of failing on the first row.
    """

    def __init__(self, violations):
        if isinstance(violations, str):
            violations = [violations]
        self.violations = list(violations)
        super().__init__("; ".join(self.violations))


class MissingSegmentCostError(KeyError):
    """A segment token has no entry in a pmi-induced cost table."""

    def __init__(self, token, kind):
        self.token = token
        self.kind = kind
        super().__init__(f"no {kind} cost for segment {token!r}")


def _readonly(a, dtype=None):
    arr = np.array(a, dtype=dtype, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class Location:
    location_id: str
    name: str
    lat: float
    lon: float
    gold_label: Optional[str] = None


@dataclass(frozen=True)
class LocationTable:
    """Survey locations with WGS84 coordinates and optional gold labels."""

    entries: tuple

    def __post_init__(self):
        entries = tuple(self.entries)
        object.__setattr__(self, "entries", entries)
        violations = []
        seen = set()
        for row, e in enumerate(entries):
            if not e.location_id:
                violations.append(f"row {row}: empty location_id")
            elif e.location_id in seen:
                violations.append(f"row {row}: duplicate location_id {e.location_id!r}")
            seen.add(e.location_id)
            if not (-90.0 <= e.lat <= 90.0):
                violations.append(f"row {row} ({e.location_id}): lat {e.lat} out of range [-90, 90]")
            if not (-180.0 <= e.lon <= 180.0):
                violations.append(f"row {row} ({e.location_id}): lon {e.lon} out of range [-180, 180]")
        labels = {e.gold_label for e in entries if e.gold_label is not None}
        if len(labels) == 1:
            violations.append("gold standard has a single label; at least 2 groups required")
        if violations:
            raise ValidationError(violations)

    def __len__(self):
        return len(self.entries)

    def ids(self):
        return tuple(e.location_id for e in self.entries)

    def get(self, location_id) -> Location:
        try:
            return self._by_id[location_id]
        except AttributeError:
            object.__setattr__(self, "_by_id", {e.location_id: e for e in self.entries})
            return self._by_id[location_id]

    def coords(self, location_id):
        e = self.get(location_id)
        return (e.lat, e.lon)

    def has_gold(self):
        return all(e.gold_label is not None for e in self.entries) and len(self.entries) > 0

    def gold_partition(self) -> "Partition":
        missing = [e.location_id for e in self.entries if e.gold_label is None]
        if missing:
            raise ValidationError([f"location {i} has no gold label" for i in missing])
        return Partition.from_labels(self.ids(), {e.location_id: e.gold_label for e in self.entries})


def validate_location_table(rows) -> LocationTable:
    """Turn parsed location rows into a validated :class:`LocationTable`.

    ``rows`` may be mappings (keys ``location``/``location_id``, ``name``,
    ``lat``, ``lon``, ``gold``/``gold_label``) or :class:`Location` objects.
    Raises :class:`ValidationError` listing every row-level violation.
    """
    entries = []
    violations = []
    for row, r in enumerate(rows):
        if isinstance(r, Location):
            entries.append(r)
            continue
        loc_id = r.get("location_id", r.get("location", ""))
        name = r.get("name", loc_id)
        gold = r.get("gold_label", r.get("gold")) or None
        try:
            lat = float(r.get("lat", ""))
            lon = float(r.get("lon", ""))
        except (TypeError, ValueError):
            violations.append(f"row {row} ({loc_id!r}): lat/lon not numeric")
            continue
        entries.append(Location(str(loc_id), str(name), lat, lon, gold))
    if violations:
        raise ValidationError(violations)
    return LocationTable(tuple(entries))


@dataclass(frozen=True)
class EmbeddingSequence:
    """Time-ordered feature frames for one (location, word, model, layer)."""

    location_id: str
    word_id: str
    model_id: str
    layer: int
    frames: np.ndarray

    def __post_init__(self):
        frames = np.asarray(self.frames, dtype=np.float32)
        if frames.ndim != 2:
            raise ValidationError(f"frames must be a T x d matrix, got shape {frames.shape}")
        if frames.shape[0] < 1 or frames.shape[1] < 1:
            raise ValidationError(f"frames must have T >= 1 and d >= 1, got shape {frames.shape}")
        if not np.all(np.isfinite(frames)):
            raise ValidationError("frames contain non-finite values")
        if int(self.layer) < 1:
            raise ValidationError(f"layer must be >= 1, got {self.layer}")
        object.__setattr__(self, "layer", int(self.layer))
        frames = np.ascontiguousarray(frames)
        frames.setflags(write=False)
        object.__setattr__(self, "frames", frames)

    @property
    def n_frames(self):
        return self.frames.shape[0]

    @property
    def dim(self):
        return self.frames.shape[1]

    def __eq__(self, other):
        if not isinstance(other, EmbeddingSequence):
            return NotImplemented
        return (
            self.location_id == other.location_id
            and self.word_id == other.word_id
            and self.model_id == other.model_id
            and self.layer == other.layer
            and self.frames.shape == other.frames.shape
            and np.array_equal(self.frames, other.frames)
        )


@dataclass(frozen=True)
class Segment:
    """One IPA segment: base character plus attached diacritics, pre-tokenized."""

    token: str
    cls: str

    def __post_init__(self):
        if not self.token:
            raise ValidationError("empty segment token")
        if self.cls not in (VOWEL, CONSONANT):
            raise ValidationError(f"segment class must be {VOWEL!r} or {CONSONANT!r}, got {self.cls!r}")


@dataclass(frozen=True)
class Transcription:
    location_id: str
    word_id: str
    segments: tuple

    def __post_init__(self):
        segments = tuple(self.segments)
        if not segments:
            raise ValidationError(f"empty transcription for ({self.location_id}, {self.word_id})")
        object.__setattr__(self, "segments", segments)

    def tokens(self):
        return tuple(s.token for s in self.segments)


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric nonnegative location-by-location matrix with zero diagonal."""

    index: tuple
    values: np.ndarray

    def __post_init__(self):
        index = tuple(self.index)
        object.__setattr__(self, "index", index)
        values = np.asarray(self.values, dtype=np.float64)
        n = len(index)
        violations = []
        if n < 2:
            violations.append(f"need at least 2 locations, got {n}")
        if len(set(index)) != n:
            violations.append("duplicate location ids in index")
        if values.shape != (n, n):
            violations.append(f"values shape {values.shape} does not match index length {n}")
        else:
            if not np.all(np.isfinite(values)):
                violations.append("non-finite distance values")
            else:
                if np.any(values < 0):
                    violations.append("negative distance values")
                if not np.array_equal(values, values.T):
                    violations.append("matrix is not exactly symmetric")
                if np.any(np.diag(values) != 0.0):
                    violations.append("nonzero diagonal")
        if violations:
            raise ValidationError(violations)
        values = np.ascontiguousarray(values)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @property
    def n(self):
        return len(self.index)

    def condensed(self):
        """Upper-triangle distances in row-major pair order (i < j)."""
        iu = np.triu_indices(self.n, k=1)
        return self.values[iu]

    def reindex(self, order) -> "DistanceMatrix":
        """Same matrix with rows/columns permuted to ``order`` (ids)."""
        pos = {loc: i for i, loc in enumerate(self.index)}
        perm = [pos[loc] for loc in order]
        if sorted(perm) != list(range(self.n)):
            raise ValidationError("reindex order is not a permutation of the index")
        return DistanceMatrix(tuple(order), self.values[np.ix_(perm, perm)])


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merge list over ``n`` leaves.

    Leaves are nodes ``0..n-1``; merge ``t`` creates node ``n+t``. Heights
    may decrease between consecutive merges only for the centroid family
    (inversions); the linkage routines check monotonicity per method.
    """

    n: int
    labels: tuple
    merges: tuple

    def __post_init__(self):
        labels = tuple(self.labels)
        merges = tuple((int(a), int(b), float(h)) for a, b, h in self.merges)
        object.__setattr__(self, "labels", labels)
        object.__setattr__(self, "merges", merges)
        violations = []
        n = self.n
        if len(labels) != n:
            violations.append(f"{len(labels)} labels for n={n}")
        if len(merges) != n - 1:
            violations.append(f"{len(merges)} merges for n={n}, expected {n - 1}")
        live = set(range(n))
        for t, (a, b, h) in enumerate(merges):
            for node in (a, b):
                if node not in live:
                    violations.append(f"merge {t} references consumed or unknown node {node}")
            if a == b:
                violations.append(f"merge {t} merges node {a} with itself")
            live.discard(a)
            live.discard(b)
            live.add(n + t)
            if not np.isfinite(h) or h < 0:
                violations.append(f"merge {t} has invalid height {h}")
        if violations:
            raise ValidationError(violations)

    def leaves_under(self):
        """Mapping node_id -> tuple of leaf positions below that node."""
        members = {i: (i,) for i in range(self.n)}
        for t, (a, b, _h) in enumerate(self.merges):
            members[self.n + t] = members[a] + members[b]
        return members


@dataclass(frozen=True)
class Partition:
    """Cluster assignment per location, labels ``0..k-1`` all in use."""

    assignment: Mapping
    k: int

    def __post_init__(self):
        assignment = MappingProxyType(dict(self.assignment))
        object.__setattr__(self, "assignment", assignment)
        violations = []
        used = set(assignment.values())
        if used != set(range(self.k)):
            violations.append(
                f"labels used {sorted(used)} do not cover 0..{self.k - 1} exactly"
            )
        if violations:
            raise ValidationError(violations)

    @classmethod
    def from_labels(cls, index: Sequence[str], labels: Mapping) -> "Partition":
        """Canonicalize arbitrary labels to 0..k-1 by first appearance in index order."""
        missing = [loc for loc in index if loc not in labels]
        if missing:
            raise ValidationError([f"no cluster label for location {loc!r}" for loc in missing])
        relabel = {}
        assignment = {}
        for loc in index:
            raw = labels[loc]
            if raw not in relabel:
                relabel[raw] = len(relabel)
            assignment[loc] = relabel[raw]
        return cls(assignment, k=len(relabel))

    def __eq__(self, other):
        if not isinstance(other, Partition):
            return NotImplemented
        return self.k == other.k and dict(self.assignment) == dict(other.assignment)

    def locations(self):
        return frozenset(self.assignment)

    def clusters(self):
        """Members per label, each tuple sorted by location id."""
        out = [[] for _ in range(self.k)]
        for loc in sorted(self.assignment):
            out[self.assignment[loc]].append(loc)
        return [tuple(c) for c in out]

    def relabeled_on(self, index: Sequence[str]) -> "Partition":
        """Canonical form of this partition w.r.t. the given index order."""
        return Partition.from_labels(index, self.assignment)


@dataclass(frozen=True)
class SegmentDistanceTable:
    """Substitution and indel costs for segment tokens, all within [0, 1].

    ``unit`` tables are functional (identity 0, anything else 1) and ignore
    the stored maps; ``pmi_induced`` tables answer from the maps only and
    raise :class:`MissingSegmentCostError` for unknown tokens.
    """

    sub: Mapping = field(default_factory=dict)
    indel: Mapping = field(default_factory=dict)
    provenance: str = UNIT

    def __post_init__(self):
        if self.provenance not in (UNIT, PMI_INDUCED):
            raise ValidationError(f"unknown provenance {self.provenance!r}")
        sub = {}
        violations = []
        for (a, b), cost in dict(self.sub).items():
            key = (a, b) if a <= b else (b, a)
            cost = float(cost)
            if key in sub and sub[key] != cost:
                violations.append(f"conflicting costs for pair {key}")
            if not np.isfinite(cost) or not (0.0 <= cost <= 1.0):
                violations.append(f"substitution cost for {key} out of [0, 1]: {cost}")
            sub[key] = cost
        indel = {}
        for tok, cost in dict(self.indel).items():
            cost = float(cost)
            if not np.isfinite(cost) or not (0.0 <= cost <= 1.0):
                violations.append(f"indel cost for {tok!r} out of [0, 1]: {cost}")
            indel[tok] = cost
        if violations:
            raise ValidationError(violations)
        object.__setattr__(self, "sub", MappingProxyType(sub))
        object.__setattr__(self, "indel", MappingProxyType(indel))

    @classmethod
    def unit(cls) -> "SegmentDistanceTable":
        return cls({}, {}, UNIT)

    def sub_cost(self, a: str, b: str) -> float:
        if self.provenance == UNIT:
            return 0.0 if a == b else 1.0
        key = (a, b) if a <= b else (b, a)
        try:
            return self.sub[key]
        except KeyError:
            raise MissingSegmentCostError((a, b), "substitution") from None

    def indel_cost(self, token: str) -> float:
        if self.provenance == UNIT:
            return 1.0
        try:
            return self.indel[token]
        except KeyError:
            raise MissingSegmentCostError(token, "indel") from None
