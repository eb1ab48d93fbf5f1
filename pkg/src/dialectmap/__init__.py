"""Pronunciation distances, clustering and map output for dialect surveys.

The pipeline: per-word pronunciation distances (DTW over acoustic
embedding sequences, or vowel/consonant-sensitive Levenshtein with
PMI-induced segment costs) are averaged into a symmetric location
distance matrix, clustered agglomeratively with seven linkages, scored
against a gold partition with the spatial CDistance measure, and drawn
as cluster or MDS color maps.
"""

from .model import (
    Dendrogram,
    DistanceMatrix,
    EmbeddingSequence,
    Location,
    LocationTable,
    MissingSegmentCostError,
    Partition,
    Segment,
    SegmentDistanceTable,
    Transcription,
    ValidationError,
    validate_location_table,
)
from .segments import SegmentClassTable, UnknownSegmentError, classify, segment
from .dtw import DtwConfig, dtw_distance
from .levenshtein import (
    AlignmentCounts,
    DegenerateTableError,
    align,
    collect_counts,
    induce,
    pmi_table,
)
from .distmatrix import build_matrix, matrix_from_embeddings, matrix_from_transcriptions
from .cluster import (
    METHODS,
    CorrelationUndefinedError,
    cophenetic_correlation,
    cophenetic_matrix,
    cut,
    inversions,
    linkage,
    select_method,
)
from .cdistance import (
    EARTH_RADIUS_KM,
    GroundMetric,
    TransportPlan,
    cdistance,
    cluster_emd,
    haversine_km,
    solve_transport,
)
from .mds import MdsResult, classical_mds, mds_to_rgb

__version__ = "0.1.0"

__all__ = [
    "AlignmentCounts",
    "CorrelationUndefinedError",
    "DegenerateTableError",
    "Dendrogram",
    "DistanceMatrix",
    "DtwConfig",
    "EARTH_RADIUS_KM",
    "EmbeddingSequence",
    "GroundMetric",
    "Location",
    "LocationTable",
    "METHODS",
    "MdsResult",
    "MissingSegmentCostError",
    "Partition",
    "Segment",
    "SegmentClassTable",
    "SegmentDistanceTable",
    "Transcription",
    "TransportPlan",
    "UnknownSegmentError",
    "ValidationError",
    "align",
    "build_matrix",
    "cdistance",
    "classical_mds",
    "classify",
    "cluster_emd",
    "collect_counts",
    "cophenetic_correlation",
    "cophenetic_matrix",
    "cut",
    "dtw_distance",
    "inversions",
    "haversine_km",
    "induce",
    "linkage",
    "matrix_from_embeddings",
    "matrix_from_transcriptions",
    "mds_to_rgb",
    "pmi_table",
    "segment",
    "select_method",
    "solve_transport",
    "validate_location_table",
]
