"""Classical (Torgerson) multidimensional scaling and RGB map colors."""

from __future__ import annotations

from typing import NamedTuple

import numpy as np

from .model import DistanceMatrix, ValidationError


class MdsResult(NamedTuple):
    coords: np.ndarray  # n x dims
    eigenvalues: np.ndarray  # all n, raw, descending
    stress: float  # relative distance reconstruction error


def classical_mds(m: DistanceMatrix, dims: int) -> MdsResult:
    """Spectral embedding of a distance matrix via the double-centered Gram matrix.

    ``B = -1/2 J (D o D) J`` is eigendecomposed; coordinates are the top
    eigenvectors scaled by the square root of their (clamped) eigenvalues.
    Negative eigenvalues are reported raw but contribute zero coordinates;
    dialect distances are not guaranteed Euclidean-embeddable. Each
    eigenvector's first nonzero component is made positive so colorings
    reproduce across runs.
    """
    n = m.n
    if not (1 <= dims <= n - 1):
        raise ValidationError(f"dims must be in 1..{n - 1}, got {dims}")
    d2 = m.values * m.values
    j = np.eye(n) - np.full((n, n), 1.0 / n)
    b = -0.5 * (j @ d2 @ j)
    b = (b + b.T) / 2.0
    evals, evecs = np.linalg.eigh(b)
    order = np.argsort(evals)[::-1]
    evals = evals[order]
    evecs = evecs[:, order]

    for idx in range(n):
        col = evecs[:, idx]
        nonzero = np.nonzero(np.abs(col) > 1e-12)[0]
        if len(nonzero) and col[nonzero[0]] < 0:
            evecs[:, idx] = -col

    scale = np.sqrt(np.clip(evals[:dims], 0.0, None))
    coords = evecs[:, :dims] * scale

    recon = np.sqrt(np.maximum(0.0, ((coords[:, None, :] - coords[None, :, :]) ** 2).sum(axis=2)))
    num = float(((recon - m.values) ** 2).sum())
    den = float((m.values**2).sum())
    stress = np.sqrt(num / den) if den > 0 else 0.0

    eigenvalues = np.array(evals)
    eigenvalues.setflags(write=False)
    coords = np.ascontiguousarray(coords)
    coords.setflags(write=False)
    return MdsResult(coords, eigenvalues, float(stress))


def mds_to_rgb(coords) -> list:
    """Min-max scale up to three dimensions onto 0..255 and format as hex.

    Missing dimensions are padded with zeros; a constant dimension maps to
    the midpoint 128. Rounding is half-up.
    """
    c = np.asarray(coords, dtype=float)
    if c.ndim != 2:
        raise ValidationError(f"expected an n x dims coordinate matrix, got shape {c.shape}")
    n, dims = c.shape
    if dims > 3:
        c = c[:, :3]
    elif dims < 3:
        c = np.hstack([c, np.zeros((n, 3 - dims))])
    channels = np.empty((n, 3), dtype=int)
    for k in range(3):
        col = c[:, k]
        span = col.max() - col.min()
        if span == 0.0:
            channels[:, k] = 128
        else:
            channels[:, k] = np.floor((col - col.min()) / span * 255.0 + 0.5).astype(int)
    return ["#{:02x}{:02x}{:02x}".format(*row) for row in channels]
