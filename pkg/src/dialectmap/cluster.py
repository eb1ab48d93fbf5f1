"""Agglomerative clustering with seven linkages, cutting, and cophenetics.

All seven methods run through the Lance-Williams recurrence. The
centroid family (uc, wc, mv) updates squared distances internally and
reports square-rooted merge heights; the others work on raw distances.
Equal merge candidates are broken by the smallest (left, right) node-id
pair, so runs are reproducible everywhere.
"""

from __future__ import annotations

import logging
import math

import numpy as np

from .model import Dendrogram, DistanceMatrix, Partition, ValidationError

log = logging.getLogger(__name__)

METHODS = ("sl", "cl", "ga", "wa", "uc", "wc", "mv")
SQUARED_METHODS = frozenset({"uc", "wc", "mv"})
MONOTONE_METHODS = frozenset({"sl", "cl", "ga", "wa", "mv"})


class CorrelationUndefinedError(ValueError):
    """Pearson correlation is undefined (zero variance on one side)."""


def _lw_update(method, d_ik, d_jk, d_ij, ni, nj, nk):
    if method == "sl":
        return 0.5 * d_ik + 0.5 * d_jk - 0.5 * abs(d_ik - d_jk)
    if method == "cl":
        return 0.5 * d_ik + 0.5 * d_jk + 0.5 * abs(d_ik - d_jk)
    if method == "ga":
        return (ni * d_ik + nj * d_jk) / (ni + nj)
    if method == "wa":
        return 0.5 * d_ik + 0.5 * d_jk
    if method == "uc":
        s = ni + nj
        return (ni * d_ik + nj * d_jk) / s - (ni * nj * d_ij) / (s * s)
    if method == "wc":
        return 0.5 * d_ik + 0.5 * d_jk - 0.25 * d_ij
    if method == "mv":
        s = ni + nj + nk
        return ((ni + nk) * d_ik + (nj + nk) * d_jk - nk * d_ij) / s
    raise ValidationError(f"unknown linkage method {method!r}")


def linkage(m: DistanceMatrix, method: str) -> Dendrogram:
    """Merge the globally closest pair n-1 times via Lance-Williams updates."""
    if method not in METHODS:
        raise ValidationError(f"unknown linkage method {method!r}; expected one of {METHODS}")
    n = m.n
    squared = method in SQUARED_METHODS

    dist = {}
    for i in range(n):
        for j in range(i + 1, n):
            v = float(m.values[i, j])
            dist[(i, j)] = v * v if squared else v
    size = {i: 1 for i in range(n)}

    merges = []
    for t in range(n - 1):
        best_key = min(dist, key=lambda k: (dist[k], k))
        a, b = best_key
        d_ab = dist[best_key]
        height = math.sqrt(d_ab) if squared else d_ab
        new = n + t
        merges.append((a, b, height))

        others = [k for k in size if k != a and k != b]
        for k in others:
            d_ak = dist[(a, k) if a < k else (k, a)]
            d_bk = dist[(b, k) if b < k else (k, b)]
            dist[(k, new)] = _lw_update(method, d_ak, d_bk, d_ab, size[a], size[b], size[k])
        for k in others:
            del dist[(a, k) if a < k else (k, a)]
            del dist[(b, k) if b < k else (k, b)]
        del dist[best_key]
        size[new] = size.pop(a) + size.pop(b)

    d = Dendrogram(n, m.index, tuple(merges))
    inv = inversions(d)
    if inv:
        log.warning("%s linkage produced %d inversion(s) at merge(s) %s", method, len(inv), inv)
    return d


def inversions(d: Dendrogram):
    """Merge indices whose height drops below the previous merge's height."""
    heights = [h for _a, _b, h in d.merges]
    return [t for t in range(1, len(heights)) if heights[t] < heights[t - 1]]


def cut(d: Dendrogram, k: int) -> Partition:
    """Partition after exactly n-k merges in merge order (inversion-safe)."""
    n = d.n
    if not (1 <= k <= n):
        raise ValidationError(f"k must be in 1..{n}, got {k}")
    parent = list(range(n)) + [0] * (n - 1)

    def find(x):
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for t, (a, b, _h) in enumerate(d.merges[: n - k]):
        node = n + t
        parent[node] = node
        parent[find(a)] = node
        parent[find(b)] = node

    labels = {d.labels[i]: find(i) for i in range(n)}
    return Partition.from_labels(d.labels, labels)


def cophenetic_matrix(d: Dendrogram) -> np.ndarray:
    """Pairwise heights at which leaves first share a cluster."""
    n = d.n
    members = {i: [i] for i in range(n)}
    out = np.zeros((n, n))
    for t, (a, b, h) in enumerate(d.merges):
        left = members.pop(a)
        right = members.pop(b)
        for i in left:
            for j in right:
                out[i, j] = h
                out[j, i] = h
        members[n + t] = left + right
    return out


def cophenetic_correlation(m: DistanceMatrix, d: Dendrogram) -> float:
    """Pearson correlation between original and cophenetic pair distances."""
    if tuple(d.labels) != tuple(m.index):
        raise ValidationError("dendrogram labels do not match the matrix index")
    iu = np.triu_indices(m.n, k=1)
    x = m.values[iu]
    y = cophenetic_matrix(d)[iu]
    xc = x - x.mean()
    yc = y - y.mean()
    vx = float(xc @ xc)
    vy = float(yc @ yc)
    if vx == 0.0 or vy == 0.0:
        raise CorrelationUndefinedError(
            "zero variance in original or cophenetic distances; correlation undefined"
        )
    if np.array_equal(x, y):
        # identical vectors correlate perfectly; skip the rounding noise
        return 1.0
    r = float(xc @ yc) / math.sqrt(vx * vy)
    return max(-1.0, min(1.0, r))


CCC_TIE_TOL = 1e-12


def select_method(m: DistanceMatrix):
    """Run all seven linkages and keep the most faithful dendrogram.

    Returns ``(method, dendrogram, ccc)`` maximizing the cophenetic
    correlation coefficient; ties go to the earlier method in the fixed
    order sl < cl < ga < wa < uc < wc < mv. Differences below 1e-12
    count as ties, so rounding noise cannot upset the method order.
    """
    if m.n < 3:
        raise ValidationError("method selection needs at least 3 locations (ccc undefined for 2)")
    best = None
    failures = []
    for method in METHODS:
        try:
            d = linkage(m, method)
            ccc = cophenetic_correlation(m, d)
        except (ValidationError, CorrelationUndefinedError) as exc:
            failures.append(f"{method}: {exc}")
            continue
        if best is None or ccc > best[2] + CCC_TIE_TOL:
            best = (method, d, ccc)
    if best is None:
        raise ValidationError(["all seven linkage methods failed"] + failures)
    return best
