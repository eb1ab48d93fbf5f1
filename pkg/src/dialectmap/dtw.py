"""Normalized dynamic time warping between embedding sequences.

Step pattern: a diagonal step adds twice the local cost, horizontal and
vertical steps add it once, and the first cell is counted once. The
accumulated minimum-path cost is divided by the sum of the two sequence
lengths, which makes distances comparable across words of different
duration. The pattern is symmetric, so the distance is exactly symmetric
in its arguments.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import inf
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from .model import ValidationError


@dataclass(frozen=True)
class DtwConfig:
    local_metric: str = "euclidean"
    normalize: str = "by_m_plus_n"
    band: Optional[int] = None  # Sakoe-Chiba radius in frames; None = full DP

    def __post_init__(self):
        if self.local_metric != "euclidean":
            raise ValidationError(f"unsupported local metric {self.local_metric!r}")
        if self.normalize != "by_m_plus_n":
            raise ValidationError(f"unsupported normalization {self.normalize!r}")
        if self.band is not None and self.band < 0:
            raise ValidationError(f"band must be >= 0, got {self.band}")


DEFAULT_CONFIG = DtwConfig()


def _frames(x):
    frames = getattr(x, "frames", x)
    frames = np.asarray(frames)
    if frames.ndim != 2:
        raise ValidationError(f"expected a T x d frame matrix, got shape {frames.shape}")
    if not np.all(np.isfinite(frames)):
        raise ValidationError("non-finite frame values")
    return frames


def dtw_distance(x, y, config: DtwConfig = DEFAULT_CONFIG) -> float:
    """Normalized DTW distance between two frame sequences.

    Accepts :class:`~dialectmap.model.EmbeddingSequence` objects or plain
    T x d arrays. Fails if dimensions differ or the band is too narrow to
    admit any warping path.
    """
    fx = _frames(x)
    fy = _frames(y)
    n, m = fx.shape[0], fy.shape[0]
    if fx.shape[1] != fy.shape[1]:
        raise ValidationError(f"dimension mismatch: {fx.shape[1]} vs {fy.shape[1]}")
    band = config.band
    if band is not None and band < abs(n - m):
        raise ValidationError(
            f"band radius {band} is narrower than the length difference {abs(n - m)}; no path exists"
        )

    local = cdist(fx, fy).tolist()
    prev = None
    cur = None
    for i in range(n):
        ci = local[i]
        if band is None:
            lo, hi = 0, m
        else:
            lo, hi = max(0, i - band), min(m, i + band + 1)
        prev, cur = cur, [inf] * m
        for j in range(lo, hi):
            c = ci[j]
            if i == 0 and j == 0:
                cur[0] = c
                continue
            best = inf
            if i > 0 and j > 0:
                best = prev[j - 1] + 2.0 * c
            if i > 0:
                v = prev[j] + c
                if v < best:
                    best = v
            if j > 0:
                v = cur[j - 1] + c
                if v < best:
                    best = v
            cur[j] = best
    total = cur[m - 1]
    if total == inf:
        raise ValidationError("no admissible warping path within the band")
    return total / (n + m)
