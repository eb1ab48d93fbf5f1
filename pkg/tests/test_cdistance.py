import itertools
import math

import numpy as np
import pytest

import dialectmap as dm
from dialectmap.cdistance import GroundMetric, TransportError, ground_distance_matrix

from oracles import cdistance_oracle, emd_oracle

EUCL = GroundMetric.EUCLIDEAN


def line_table(xs, labels=None, gold=None):
    labels = labels or [f"p{i}" for i in range(len(xs))]
    entries = tuple(
        dm.Location(lab, lab, float(x), 0.0, gold[i] if gold else None)
        for i, (lab, x) in enumerate(zip(labels, xs))
    )
    return dm.LocationTable(entries)


class TestHaversine:
    def test_zero_iff_identical(self):
        assert dm.haversine_km(52.0, 4.0, 52.0, 4.0) == 0.0
        assert dm.haversine_km(52.0, 4.0, 52.0, 4.1) > 0.0

    def test_symmetry(self):
        assert dm.haversine_km(52.0, 4.0, 53.1, 5.2) == dm.haversine_km(53.1, 5.2, 52.0, 4.0)

    def test_one_degree_latitude(self):
        # about 111.2 km on the 6371 km sphere
        d = dm.haversine_km(52.0, 4.0, 53.0, 4.0)
        assert d == pytest.approx(2 * math.pi * 6371.0 / 360.0, rel=1e-9)


class TestSolveTransport:
    def test_single_cell(self):
        plan = dm.solve_transport([1.0], [1.0], [[0.7]])
        assert plan.plan[0, 0] == pytest.approx(1.0, abs=1e-12)
        assert plan.cost == pytest.approx(0.7, abs=1e-12)

    def test_diagonal_optimum(self):
        plan = dm.solve_transport([0.5, 0.5], [0.5, 0.5], [[0.0, 1.0], [1.0, 0.0]])
        assert plan.cost == pytest.approx(0.0, abs=1e-12)

    def test_two_plan_example(self):
        plan = dm.solve_transport([0.5, 0.5], [0.5, 0.5], [[4.5, 5.5], [5.5, 4.5]])
        assert plan.cost == pytest.approx(4.5, abs=1e-9)

    def test_marginals_hold(self):
        rng = np.random.default_rng(9)
        s = rng.dirichlet(np.ones(4))
        t = rng.dirichlet(np.ones(3))
        c = rng.uniform(0, 5, size=(4, 3))
        plan = dm.solve_transport(s, t, c)
        assert np.allclose(plan.plan.sum(axis=1), s, atol=1e-9)
        assert np.allclose(plan.plan.sum(axis=0), t, atol=1e-9)

    def test_unbalanced_rejected(self):
        with pytest.raises(TransportError):
            dm.solve_transport([0.5, 0.4], [0.5, 0.5], [[1, 1], [1, 1]])

    def test_negative_cost_rejected(self):
        with pytest.raises(TransportError):
            dm.solve_transport([1.0], [1.0], [[-1.0]])

    def test_matches_enumeration(self):
        from oracles import transport_oracle

        rng = np.random.default_rng(10)
        for _ in range(25):
            n, m = (int(v) for v in rng.integers(1, 5, size=2))
            units_a = rng.integers(1, 4, size=n)
            total = int(units_a.sum())
            if total < m:
                units_a[0] += m - total
                total = m
            # compose the same total into m positive parts
            cuts = sorted(rng.choice(np.arange(1, total), size=m - 1, replace=False)) if m > 1 else []
            units_b = np.diff(np.concatenate(([0], cuts, [total])))
            c = rng.uniform(0, 3, size=(n, m))
            got = dm.solve_transport(units_a / total, units_b / total, c).cost
            want = transport_oracle(list(units_a), list(units_b), c.tolist())
            assert got == pytest.approx(want, abs=1e-9)


class TestClusterEmd:
    def test_identical_sets(self):
        pts = [(0.0, 0.0), (1.0, 0.0)]
        assert dm.cluster_emd(pts, pts, EUCL) == pytest.approx(0.0, abs=1e-12)

    def test_line_example(self):
        a = [(0.0, 0.0), (1.0, 0.0)]
        b = [(0.0, 0.0), (10.0, 0.0)]
        assert dm.cluster_emd(a, b, EUCL) == pytest.approx(4.5, abs=1e-9)

    def test_singletons_reduce_to_ground_distance(self):
        assert dm.cluster_emd([(0.0, 0.0)], [(3.0, 4.0)], EUCL) == pytest.approx(5.0, abs=1e-12)

    def test_empty_rejected(self):
        with pytest.raises(dm.ValidationError):
            dm.cluster_emd([], [(0.0, 0.0)], EUCL)

    def test_unequal_sizes_match_oracle(self):
        rng = np.random.default_rng(33)
        for _ in range(10):
            na, nb = int(rng.integers(1, 6)), int(rng.integers(1, 6))
            a = rng.uniform(0, 10, size=(na, 2))
            b = rng.uniform(0, 10, size=(nb, 2))
            got = dm.cluster_emd(a, b, EUCL)
            cost = ground_distance_matrix(a, b, EUCL)
            assert got == pytest.approx(emd_oracle(cost.tolist()), abs=1e-9)


class TestCDistance:
    def test_identity_is_zero(self):
        table = line_table([0.0, 1.0, 10.0, 11.0])
        p = dm.Partition.from_labels(table.ids(), {"p0": 0, "p1": 0, "p2": 1, "p3": 1})
        assert dm.cdistance(p, p, table, EUCL) == 0.0

    def test_line_example_is_point_nine(self):
        table = line_table([0.0, 1.0, 10.0, 11.0])
        p = dm.Partition.from_labels(table.ids(), {"p0": 0, "p1": 0, "p2": 1, "p3": 1})
        q = dm.Partition.from_labels(table.ids(), {"p0": 0, "p1": 1, "p2": 0, "p3": 1})
        assert dm.cdistance(p, q, table, EUCL) == pytest.approx(0.9, abs=1e-9)

    def test_symmetry_and_label_permutation_invariance(self):
        rng = np.random.default_rng(40)
        pts = rng.uniform(0, 5, size=(6, 2))
        entries = tuple(dm.Location(f"p{i}", f"p{i}", float(a), float(b)) for i, (a, b) in enumerate(pts))
        table = dm.LocationTable(entries)
        ids = table.ids()
        p = dm.Partition.from_labels(ids, {f"p{i}": i % 3 for i in range(6)})
        q = dm.Partition.from_labels(ids, {f"p{i}": (i // 2) % 2 for i in range(6)})
        d1 = dm.cdistance(p, q, table, EUCL)
        assert dm.cdistance(q, p, table, EUCL) == pytest.approx(d1, abs=1e-12)
        relabeled = dm.Partition.from_labels(ids, {f"p{i}": (p.assignment[f"p{i}"] + 1) % 3 for i in range(6)})
        assert dm.cdistance(relabeled, q, table, EUCL) == pytest.approx(d1, abs=1e-12)

    def test_range(self):
        rng = np.random.default_rng(41)
        for _ in range(15):
            pts = rng.uniform(0, 5, size=(5, 2))
            entries = tuple(dm.Location(f"p{i}", f"p{i}", float(a), float(b)) for i, (a, b) in enumerate(pts))
            table = dm.LocationTable(entries)
            ids = table.ids()
            p = dm.Partition.from_labels(ids, {i: int(rng.integers(2)) for i in ids})
            q = dm.Partition.from_labels(ids, {i: int(rng.integers(2)) for i in ids})
            assert 0.0 <= dm.cdistance(p, q, table, EUCL) <= 1.0

    def test_rigid_motion_invariance(self):
        rng = np.random.default_rng(42)
        pts = rng.uniform(0, 5, size=(6, 2))
        theta = 0.7
        rot = np.array([[np.cos(theta), -np.sin(theta)], [np.sin(theta), np.cos(theta)]])
        moved = pts @ rot.T + np.array([3.0, -2.0])
        labels = {f"p{i}": i % 2 for i in range(6)}
        labels_q = {f"p{i}": (i < 3) * 1 for i in range(6)}
        scores = []
        for cloud in (pts, moved):
            entries = tuple(dm.Location(f"p{i}", f"p{i}", float(a), float(b)) for i, (a, b) in enumerate(cloud))
            table = dm.LocationTable(entries)
            p = dm.Partition.from_labels(table.ids(), labels)
            q = dm.Partition.from_labels(table.ids(), labels_q)
            scores.append(dm.cdistance(p, q, table, EUCL))
        assert scores[0] == pytest.approx(scores[1], abs=1e-9)

    def test_mismatched_location_sets(self):
        table = line_table([0.0, 1.0])
        p = dm.Partition.from_labels(["p0", "p1"], {"p0": 0, "p1": 1})
        q = dm.Partition.from_labels(["p0"], {"p0": 0})
        with pytest.raises(dm.ValidationError):
            dm.cdistance(p, q, table, EUCL)

    def test_matches_bruteforce_small(self):
        # every partition pair of 4 points into <= 3 clusters
        rng = np.random.default_rng(43)
        pts = rng.uniform(0, 4, size=(4, 2))
        entries = tuple(dm.Location(f"p{i}", f"p{i}", float(a), float(b)) for i, (a, b) in enumerate(pts))
        table = dm.LocationTable(entries)
        ids = table.ids()

        def dist(i, j):
            return float(np.hypot(*(pts[i] - pts[j])))

        partitions = []
        for labels in itertools.product(range(3), repeat=4):
            canon = dm.Partition.from_labels(ids, dict(zip(ids, labels)))
            if canon not in partitions:
                partitions.append(canon)
        assert len(partitions) == 14  # partitions of a 4-set into <= 3 blocks

        for p, q in itertools.product(partitions, repeat=2):
            got = dm.cdistance(p, q, table, EUCL)
            clusters_p = [tuple(int(loc[1]) for loc in c) for c in p.clusters()]
            clusters_q = [tuple(int(loc[1]) for loc in c) for c in q.clusters()]
            want = cdistance_oracle(clusters_p, clusters_q, pts, dist)
            assert got == pytest.approx(want, abs=1e-9)
