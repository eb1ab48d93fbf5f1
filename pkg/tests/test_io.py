import json
import logging

import numpy as np
import pytest

import dialectmap as dm
from dialectmap import io

import fixtures


class TestEmbeddingFormat:
    def test_header_layout_and_zero_payload(self, tmp_path):
        seq = dm.EmbeddingSequence("loc", "w", "m", 1, np.zeros((1, 2), dtype=np.float32))
        path = tmp_path / "x.demb"
        io.write_embedding(seq, path)
        data = path.read_bytes()
        # magic(4) + version(2) + reserved(2) + T(4) + d(4) + 1*2 floats(8)
        assert len(data) == 24
        assert data[:4] == b"DEMB"
        assert data[4:6] == (1).to_bytes(2, "little")
        assert data[6:8] == b"\x00\x00"
        assert int.from_bytes(data[8:12], "little") == 1
        assert int.from_bytes(data[12:16], "little") == 2
        assert data[16:] == b"\x00" * 8

    def test_file_size_arithmetic(self, tmp_path):
        seq = dm.EmbeddingSequence("loc", "w", "m", 1, np.ones((3, 1024), dtype=np.float32))
        path = tmp_path / "big.demb"
        io.write_embedding(seq, path)
        assert path.stat().st_size == 16 + 3 * 1024 * 4

    def test_roundtrip_bit_identical(self, tmp_path):
        rng = np.random.default_rng(3)
        seq = fixtures.random_embedding(rng, 5, 7, loc="Eelde", word="deeg", model="m1", layer=2)
        path = io.embedding_path(tmp_path, "m1", 2, "Eelde", "deeg")
        io.write_embedding(seq, path)
        back = io.read_embedding(path)
        assert back == seq
        assert back.frames.tobytes() == seq.frames.tobytes()

    def test_bad_magic(self, tmp_path):
        path = tmp_path / "x.demb"
        path.write_bytes(b"XEMB" + bytes(20))
        with pytest.raises(io.FileFormatError) as err:
            io.read_embedding(path)
        assert "magic" in str(err.value)

    def test_unsupported_version(self, tmp_path):
        path = tmp_path / "x.demb"
        good = tmp_path / "good.demb"
        io.write_embedding(dm.EmbeddingSequence("l", "w", "m", 1, np.zeros((1, 1), dtype=np.float32)), good)
        data = bytearray(good.read_bytes())
        data[4] = 9
        path.write_bytes(bytes(data))
        with pytest.raises(io.FileFormatError) as err:
            io.read_embedding(path)
        assert "version" in str(err.value)

    def test_truncation_reports_sizes(self, tmp_path):
        seq = dm.EmbeddingSequence("l", "w", "m", 1, np.ones((2, 2), dtype=np.float32))
        path = tmp_path / "x.demb"
        io.write_embedding(seq, path)
        path.write_bytes(path.read_bytes()[:-4])
        with pytest.raises(io.FileFormatError) as err:
            io.read_embedding(path)
        assert "32" in str(err.value) and "28" in str(err.value)

    def test_archive_path_layout(self, tmp_path):
        p = io.embedding_path(tmp_path, "w2v", 7, "Joure", "arms")
        assert str(p).endswith("w2v/layer07/Joure/arms.demb")
        with pytest.raises(dm.ValidationError):
            io.embedding_path(tmp_path, "w2v", 0, "Joure", "arms")

    def test_manifest_roundtrip(self, tmp_path):
        models = [{"model_id": "m", "layers": 24, "dim": 1024, "sample_rate": 16000}]
        io.write_manifest(tmp_path, models)
        assert io.read_manifest(tmp_path) == models


class TestTranscriptions:
    def test_ipa_segment_row(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("# comment line\nEelde\tdeeg\td ɛ i x\n", encoding="utf-8")
        (t,) = io.read_transcriptions(path)
        assert t.location_id == "Eelde" and t.word_id == "deeg"
        assert [s.token for s in t.segments] == ["d", "ɛ", "i", "x"]
        assert [s.cls for s in t.segments] == ["consonant", "vowel", "vowel", "consonant"]

    def test_malformed_row(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Eelde\tdeeg\t\n", encoding="utf-8")
        with pytest.raises(io.FileFormatError) as err:
            io.read_transcriptions(path)
        assert "malformed" in str(err.value)

    def test_unknown_segment_is_ingestion_error(self, tmp_path):
        path = tmp_path / "t.tsv"
        path.write_text("Eelde\tdeeg\td 4 x\n", encoding="utf-8")
        with pytest.raises(Exception) as err:
            io.read_transcriptions(path)
        assert "unknown base" in str(err.value)

    def test_duplicate_last_wins_with_warning(self, tmp_path, caplog):
        path = tmp_path / "t.tsv"
        path.write_text("A\tw\td e\nA\tw\tt a\n", encoding="utf-8")
        with caplog.at_level(logging.WARNING):
            (t,) = io.read_transcriptions(path)
        assert [s.token for s in t.segments] == ["t", "a"]
        assert any("duplicate" in r.message for r in caplog.records)


class TestDistanceMatrixCsv:
    def test_small_roundtrip_exact(self, tmp_path):
        m = dm.DistanceMatrix(("a", "b"), np.array([[0.0, 0.5], [0.5, 0.0]]))
        path = tmp_path / "m.csv"
        io.write_distance_matrix(m, path)
        back = io.read_distance_matrix(path)
        assert back.index == m.index
        assert np.array_equal(back.values, m.values)

    def test_write_read_write_is_stable(self, tmp_path):
        rng = np.random.default_rng(5)
        m = fixtures.random_distance_matrix(rng, 9)
        p1, p2 = tmp_path / "a.csv", tmp_path / "b.csv"
        io.write_distance_matrix(m, p1)
        io.write_distance_matrix(io.read_distance_matrix(p1), p2)
        assert p1.read_bytes() == p2.read_bytes()

    def test_asymmetry_rejected(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("id,a,b\na,0,0.5\nb,0.6,0\n", encoding="utf-8")
        with pytest.raises(io.FileFormatError) as err:
            io.read_distance_matrix(path)
        assert "asymmetry" in str(err.value)

    def test_tiny_asymmetry_averaged(self, tmp_path):
        path = tmp_path / "m.csv"
        path.write_text("id,a,b\na,0,0.5000000001\nb,0.4999999999,0\n", encoding="utf-8")
        m = io.read_distance_matrix(path)
        assert m.values[0, 1] == m.values[1, 0] == pytest.approx(0.5, abs=1e-12)

    def test_survey_scale_shape(self, tmp_path):
        rng = np.random.default_rng(6)
        m = fixtures.random_distance_matrix(rng, 106)
        path = tmp_path / "m.csv"
        io.write_distance_matrix(m, path)
        lines = path.read_text(encoding="utf-8").splitlines()
        assert len(lines) == 107
        assert all(len(line.split(",")) == 107 for line in lines)

    def test_nine_significant_digits(self, tmp_path):
        v = 0.123456789123
        m = dm.DistanceMatrix(("a", "b"), np.array([[0.0, v], [v, 0.0]]))
        path = tmp_path / "m.csv"
        io.write_distance_matrix(m, path)
        assert "0.123456789" in path.read_text(encoding="utf-8")


class TestDendrogramPartitionLocations:
    def test_dendrogram_roundtrip(self, tmp_path):
        d = dm.Dendrogram(3, ("a", "b", "c"), ((0, 1, 1.0), (2, 3, 2.5)))
        path = tmp_path / "d.json"
        io.write_dendrogram(d, path)
        back = io.read_dendrogram(path)
        assert back.n == 3 and back.labels == d.labels and back.merges == d.merges
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["merges"] == [[0, 1, 1.0], [2, 3, 2.5]]

    def test_partition_roundtrip(self, tmp_path):
        p = dm.Partition.from_labels(["x", "y", "z"], {"x": 0, "y": 1, "z": 0})
        path = tmp_path / "p.csv"
        io.write_partition(p, path, index=("x", "y", "z"))
        assert io.read_partition(path) == p
        assert path.read_text(encoding="utf-8").splitlines()[0] == "location,cluster"

    def test_partition_missing_location(self, tmp_path):
        p = dm.Partition.from_labels(["x"], {"x": 0})
        with pytest.raises(dm.ValidationError) as err:
            io.write_partition(p, tmp_path / "p.csv", index=("x", "y"))
        assert "y" in str(err.value)

    def test_locations_roundtrip(self, tmp_path):
        table = fixtures.survey_location_table()
        path = tmp_path / "loc.csv"
        io.write_locations(table, path)
        back = io.read_locations(path)
        assert back.ids() == table.ids()
        assert back.entries[0].gold_label == table.entries[0].gold_label
        assert back.entries[0].lat == pytest.approx(table.entries[0].lat, abs=1e-9)


class TestGeoJson:
    def test_cluster_map(self, tmp_path):
        rows = [
            {"location": f"l{i}", "name": f"n{i}", "lat": 50 + i * 0.01, "lon": 4.0, "gold": f"g{i % 4}"}
            for i in range(106)
        ]
        table = dm.validate_location_table(rows)
        p = table.gold_partition()
        path = tmp_path / "map.geojson"
        io.write_geojson(table, path, partition=p)
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert payload["type"] == "FeatureCollection"
        assert len(payload["features"]) == 106
        clusters = {f["properties"]["cluster"] for f in payload["features"]}
        assert clusters == {0, 1, 2, 3}
        assert payload["features"][0]["geometry"]["coordinates"] == [4.0, 50.0]

    def test_single_location(self, tmp_path):
        table = dm.LocationTable((dm.Location("solo", "Solo", 52.0, 4.0),))
        path = tmp_path / "map.geojson"
        io.write_geojson(table, path, colors={"solo": "#808080"})
        payload = json.loads(path.read_text(encoding="utf-8"))
        assert len(payload["features"]) == 1
        assert payload["features"][0]["properties"]["rgb"] == "#808080"

    def test_missing_location_named(self, tmp_path):
        table = dm.LocationTable(
            (dm.Location("a", "A", 52.0, 4.0), dm.Location("b", "B", 52.1, 4.1))
        )
        p = dm.Partition({"a": 0, "b": 1}, k=2)
        missing = dm.Partition({"a": 0}, k=1)
        with pytest.raises(dm.ValidationError) as err:
            io.write_geojson(table, tmp_path / "m.geojson", partition=missing)
        assert "b" in str(err.value)
        io.write_geojson(table, tmp_path / "ok.geojson", partition=p)


class TestCostTable:
    def test_roundtrip(self, tmp_path):
        t = dm.SegmentDistanceTable({("a", "b"): 0.25, ("a", "a"): 0.0}, {"a": 0.5, "b": 1.0}, "pmi_induced")
        path = tmp_path / "costs.tsv"
        io.write_cost_table(t, path)
        back = io.read_cost_table(path)
        assert back.provenance == "pmi_induced"
        assert back.sub_cost("b", "a") == 0.25
        assert back.indel_cost("b") == 1.0

    def test_unit_table_roundtrip(self, tmp_path):
        path = tmp_path / "unit.tsv"
        io.write_cost_table(dm.SegmentDistanceTable.unit(), path)
        back = io.read_cost_table(path)
        assert back.provenance == "unit"
        assert back.sub_cost("x", "y") == 1.0
