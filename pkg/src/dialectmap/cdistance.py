"""Spatially-aware partition comparison via two-level optimal transport.

Clusters are compared as point clouds on the map: the distance between
two clusters is the earth mover's distance between uniform distributions
over their member coordinates, and two partitions are compared by an
optimal transport over whole clusters, normalized by the cost of the
independence (product) coupling so the score lands in [0, 1]. Zero means
the partitions are identical.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .model import LocationTable, Partition, ValidationError

EARTH_RADIUS_KM = 6371.0

MASS_TOL = 1e-12
PLAN_TOL = 1e-9


class GroundMetric(str, Enum):
    HAVERSINE_KM = "haversine"
    EUCLIDEAN = "euclidean"


class TransportError(ValueError):
    """The transportation solver failed or was fed an invalid instance."""


def haversine_km(lat1, lon1, lat2, lon2) -> float:
    """Great-circle distance in km on a sphere of radius 6371 km."""
    phi1, phi2 = math.radians(lat1), math.radians(lat2)
    dphi = phi2 - phi1
    dlam = math.radians(lon2) - math.radians(lon1)
    a = math.sin(dphi / 2.0) ** 2 + math.cos(phi1) * math.cos(phi2) * math.sin(dlam / 2.0) ** 2
    return 2.0 * EARTH_RADIUS_KM * math.asin(min(1.0, math.sqrt(a)))


def ground_distance_matrix(points_a, points_b, metric: GroundMetric) -> np.ndarray:
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    if metric == GroundMetric.EUCLIDEAN:
        diff = a[:, None, :] - b[None, :, :]
        return np.sqrt((diff * diff).sum(axis=2))
    out = np.empty((len(a), len(b)))
    for i, (lat1, lon1) in enumerate(a):
        for j, (lat2, lon2) in enumerate(b):
            out[i, j] = haversine_km(lat1, lon1, lat2, lon2)
    return out


@dataclass(frozen=True)
class TransportPlan:
    supplies: np.ndarray
    demands: np.ndarray
    plan: np.ndarray
    cost: float

    def __post_init__(self):
        supplies = np.asarray(self.supplies, dtype=float)
        demands = np.asarray(self.demands, dtype=float)
        plan = np.asarray(self.plan, dtype=float)
        if np.max(np.abs(plan.sum(axis=1) - supplies)) > PLAN_TOL:
            raise TransportError("plan row sums do not match supplies")
        if np.max(np.abs(plan.sum(axis=0) - demands)) > PLAN_TOL:
            raise TransportError("plan column sums do not match demands")
        for name, arr in (("supplies", supplies), ("demands", demands), ("plan", plan)):
            a = np.array(arr)
            a.setflags(write=False)
            object.__setattr__(self, name, a)


def _transport_ssp(s, t, c):
    """Successive shortest augmenting paths with node potentials.

    Exact for the balanced transportation problem: every augmentation
    follows a shortest path in the residual graph, so the final flow is
    an optimal vertex. Ties settle on the lowest node index, which makes
    the plan deterministic.
    """
    n, m = c.shape
    eps = 1e-15
    flow = np.zeros((n, m))
    rs = s.copy()
    rt = t.copy()
    pot_s = np.zeros(n)
    pot_t = np.zeros(m)
    max_rounds = 4 * (n + m) * max(n, m) + 16

    for _round in range(max_rounds):
        if rs.sum() <= 1e-14:
            break
        dist_s = np.where(rs > eps, 0.0, np.inf)
        dist_t = np.full(m, np.inf)
        par_t = np.full(m, -1, dtype=np.int64)  # parent source of each sink
        par_s = np.full(n, -1, dtype=np.int64)  # parent sink of each source (-1 = path root)
        done_s = np.zeros(n, dtype=bool)
        done_t = np.zeros(m, dtype=bool)

        while True:
            cand_s = np.where(done_s, np.inf, dist_s)
            cand_t = np.where(done_t, np.inf, dist_t)
            i = int(np.argmin(cand_s))
            j = int(np.argmin(cand_t))
            if cand_s[i] <= cand_t[j]:
                if not np.isfinite(cand_s[i]):
                    break
                done_s[i] = True
                rc = np.maximum(c[i] + pot_s[i] - pot_t, 0.0)
                nd = dist_s[i] + rc
                better = nd < dist_t
                dist_t[better] = nd[better]
                par_t[better] = i
            else:
                if not np.isfinite(cand_t[j]):
                    break
                done_t[j] = True
                holders = flow[:, j] > eps
                if holders.any():
                    rc = np.maximum(-c[:, j] + pot_t[j] - pot_s, 0.0)
                    nd = np.where(holders, dist_t[j] + rc, np.inf)
                    better = nd < dist_s
                    dist_s[better] = nd[better]
                    par_s[better] = j

        open_t = rt > eps
        if not np.any(open_t & np.isfinite(dist_t)):
            raise TransportError("no augmenting path; transport instance is infeasible")
        target = int(np.argmin(np.where(open_t, dist_t, np.inf)))
        d_star = dist_t[target]

        # bottleneck along the alternating path back to a root source
        path = []  # (i, j, forward?)
        delta = rt[target]
        j = target
        while True:
            i = int(par_t[j])
            path.append((i, j, True))
            if par_s[i] == -1:
                delta = min(delta, rs[i])
                break
            j2 = int(par_s[i])
            path.append((i, j2, False))
            delta = min(delta, flow[i, j2])
            j = j2
        for i, jj, forward in path:
            if forward:
                flow[i, jj] += delta
            else:
                flow[i, jj] -= delta
        root = path[-1][0]
        rs[root] -= delta
        rt[target] -= delta
        pot_s += np.minimum(dist_s, d_star)
        pot_t += np.minimum(dist_t, d_star)
    else:
        raise TransportError("transport solver failed to converge")
    return flow


def solve_transport(supplies, demands, cost_matrix) -> TransportPlan:
    """Exact optimum of the balanced transportation problem.

    The instances here are tiny (at most one node per survey location),
    so an exact successive-shortest-paths solve is cheap and fully
    deterministic.
    """
    s = np.asarray(supplies, dtype=float)
    t = np.asarray(demands, dtype=float)
    c = np.asarray(cost_matrix, dtype=float)
    if np.any(s < 0) or np.any(t < 0):
        raise TransportError("negative mass")
    if abs(s.sum() - 1.0) > MASS_TOL or abs(t.sum() - 1.0) > MASS_TOL:
        raise TransportError(
            f"masses must each sum to 1 (got {s.sum()!r} and {t.sum()!r})"
        )
    if c.shape != (len(s), len(t)):
        raise TransportError(f"cost matrix shape {c.shape} does not match {(len(s), len(t))}")
    if not np.all(np.isfinite(c)) or np.any(c < 0):
        raise TransportError("costs must be finite and nonnegative")

    plan = np.clip(_transport_ssp(s, t, c), 0.0, None)
    cost = float((plan * c).sum())
    return TransportPlan(s, t, plan, cost)


def cluster_emd(points_a, points_b, metric: GroundMetric = GroundMetric.HAVERSINE_KM) -> float:
    """EMD between uniform distributions over two coordinate sets."""
    a = np.asarray(points_a, dtype=float)
    b = np.asarray(points_b, dtype=float)
    if len(a) == 0 or len(b) == 0:
        raise ValidationError("cluster_emd needs non-empty point sets")
    cost = ground_distance_matrix(a, b, metric)
    supplies = np.full(len(a), 1.0 / len(a))
    demands = np.full(len(b), 1.0 / len(b))
    return solve_transport(supplies, demands, cost).cost


def cdistance(
    p: Partition,
    q: Partition,
    table: LocationTable,
    metric: GroundMetric = GroundMetric.HAVERSINE_KM,
) -> float:
    """Transport cost between two partitions over the naive coupling cost.

    Returns a score in [0, 1]; identical partitions give 0, and the score
    is symmetric and invariant under cluster relabeling on either side.
    """
    if p.locations() != q.locations():
        raise ValidationError("partitions cover different location sets")
    missing = [loc for loc in p.locations() if loc not in {e.location_id for e in table.entries}]
    if missing:
        raise ValidationError([f"no coordinates for location {loc!r}" for loc in sorted(missing)])

    coords = {e.location_id: (e.lat, e.lon) for e in table.entries}
    clusters_p = [np.array([coords[loc] for loc in c]) for c in p.clusters()]
    clusters_q = [np.array([coords[loc] for loc in c]) for c in q.clusters()]
    total = len(p.locations())

    inter = np.empty((p.k, q.k))
    for i, ca in enumerate(clusters_p):
        for j, cb in enumerate(clusters_q):
            inter[i, j] = cluster_emd(ca, cb, metric)

    mass_p = np.array([len(c) for c in clusters_p], dtype=float) / total
    mass_q = np.array([len(c) for c in clusters_q], dtype=float) / total
    otd = solve_transport(mass_p, mass_q, inter).cost
    naive = float(mass_p @ inter @ mass_q)
    if naive == 0.0:
        return 0.0
    return max(0.0, min(1.0, otd / naive))
