"""
Tests for the file repositories.
"""

import json

import numpy as np
import pytest
import scipy.sparse as sp
from pydantic import ValidationError

from hdxcodes.models import CheckRecord, InstanceHeader, Report
from hdxcodes.services.local_code import build_local_code
from hdxcodes.storage import (
    CodewordRepository,
    InstanceRepository,
    LocalCodeRepository,
    MatrixRepository,
    ReportRepository,
    StoreError,
)


class TestInstanceRepository:
    """Tests for instance headers and sidecars."""

    def test_round_trip(self, tmp_path, complex3):
        repo = InstanceRepository(tmp_path)
        path = repo.save(complex3, "x.json")
        assert (tmp_path / "x.tri").stat().st_size == 5616 * 9

        header = repo.load_header(path)
        assert header.counts == {"vertices": 624, "edges": 5616, "triangles": 5616}
        assert header.sidecar == "x.tri"

        loaded = repo.load(path)
        assert np.array_equal(loaded.group.keys, complex3.group.keys)
        assert np.array_equal(loaded.vertex_rep, complex3.vertex_rep)

    def test_truncated_sidecar(self, tmp_path, complex3):
        repo = InstanceRepository(tmp_path)
        path = repo.save(complex3, "x.json")
        sidecar = tmp_path / "x.tri"
        sidecar.write_bytes(sidecar.read_bytes()[:100])
        with pytest.raises(StoreError):
            repo.load_triangles(path)

    def test_missing_header(self, tmp_path):
        with pytest.raises(StoreError):
            InstanceRepository(tmp_path).load_header("absent.json")

    def test_invalid_header(self, tmp_path):
        (tmp_path / "bad.json").write_text(json.dumps({"q": 3}))
        with pytest.raises(StoreError):
            InstanceRepository(tmp_path).load_header("bad.json")


class TestHeaderSchema:
    def test_digits_must_match_n(self):
        with pytest.raises(ValidationError):
            InstanceHeader(
                q=3, n=1, phi=[1, 1], group_order=5616,
                counts={"vertices": 624, "edges": 5616, "triangles": 5616},
                digits_per_triangle=8, sidecar="x.tri",
            )

    def test_vertex_table_must_match_counts(self):
        with pytest.raises(ValidationError):
            InstanceHeader(
                q=3, n=1, phi=[1, 1], group_order=5616,
                counts={"vertices": 624, "edges": 5616, "triangles": 5616},
                digits_per_triangle=9, sidecar="x.tri", vertices=[(1, 0)],
            )


class TestCodewordRepository:
    """Tests for digit-string words."""

    def test_round_trip(self, tmp_path):
        repo = CodewordRepository(tmp_path)
        word = np.array([0, 1, 2, 2, 1, 0])
        repo.save(word, 3, "w.txt")
        assert (tmp_path / "w.txt").read_text() == "012210\n"
        assert np.array_equal(repo.load("w.txt", 3, length=6), word)

    def test_digit_out_of_range(self, tmp_path):
        (tmp_path / "w.txt").write_text("0123\n")
        with pytest.raises(StoreError):
            CodewordRepository(tmp_path).load("w.txt", 3)

    def test_not_digits(self, tmp_path):
        (tmp_path / "w.txt").write_text("01a\n")
        with pytest.raises(StoreError):
            CodewordRepository(tmp_path).load("w.txt", 3)

    def test_length_checked(self, tmp_path):
        (tmp_path / "w.txt").write_text("0120\n")
        with pytest.raises(StoreError):
            CodewordRepository(tmp_path).load("w.txt", 3, length=5)

    def test_large_alphabet_rejected(self, tmp_path):
        with pytest.raises(StoreError):
            CodewordRepository(tmp_path).save(np.zeros(3), 11, "w.txt")


class TestMatrixRepository:
    """Tests for triplet exports."""

    def test_round_trip_drops_zeros(self, tmp_path):
        repo = MatrixRepository(tmp_path)
        dense = np.array([[0, 4, 1], [5, 0, 0]])
        repo.save(sp.csr_matrix(dense), 5, "h.mtx")
        lines = (tmp_path / "h.mtx").read_text().splitlines()
        assert lines[0].split()[1:] == ["2", "3", "2", "5"]
        matrix, modulus = repo.load("h.mtx")
        assert modulus == 5
        assert np.array_equal(matrix.toarray(), dense % 5)

    def test_missing_header(self, tmp_path):
        (tmp_path / "h.mtx").write_text("0 0 1\n")
        with pytest.raises(StoreError):
            MatrixRepository(tmp_path).load("h.mtx")

    def test_entry_count_checked(self, tmp_path):
        (tmp_path / "h.mtx").write_text("%%MatrixMarket-like: 2 2 3 5\n0 0 1\n")
        with pytest.raises(StoreError):
            MatrixRepository(tmp_path).load("h.mtx")


class TestLocalCodeRepository:
    def test_round_trip(self, tmp_path):
        repo = LocalCodeRepository(tmp_path)
        spec = build_local_code(5, 1, 1)
        repo.save(spec, "c.json")
        loaded = repo.load("c.json")
        assert loaded.dim == spec.dim == 8
        assert np.array_equal(loaded.basis_eval, spec.basis_eval)
        assert loaded.formula_checked

    def test_corrupted_basis(self, tmp_path):
        repo = LocalCodeRepository(tmp_path)
        repo.save(build_local_code(5, 0, 1), "c.json")
        data = json.loads((tmp_path / "c.json").read_text())
        data["basis_eval"][0][0] = (data["basis_eval"][0][0] + 1) % 5
        (tmp_path / "c.json").write_text(json.dumps(data))
        with pytest.raises(StoreError):
            repo.load("c.json")


class TestReportRepository:
    """Tests for report persistence and merging."""

    def test_round_trip(self, tmp_path):
        repo = ReportRepository(tmp_path)
        report = Report(command="stats", seed=None)
        report.add(CheckRecord.from_bool("counts", "face counts match", True, vertices=624))
        repo.save(report, "r.json")
        loaded = repo.load("r.json")
        assert loaded.records[0].values == {"vertices": 624}
        assert loaded.exit_code() == 0

    def test_merge_prefixes_command(self, tmp_path):
        repo = ReportRepository(tmp_path)
        first = Report(command="stats")
        first.add(CheckRecord.report("lambda2", "link spectrum", value=0.5))
        first.timing["total"] = 1.0
        second = Report(command="code")
        second.add(CheckRecord.from_bool("rank", "rank check", False))
        repo.save(first, "a.json")
        repo.save(second, "b.json")

        merged = repo.merge(["a.json", "b.json"])
        assert [r.name for r in merged.records] == ["stats/lambda2", "code/rank"]
        assert merged.timing == {"stats/total": 1.0}
        assert merged.config == {"inputs": ["a.json", "b.json"]}
        assert merged.exit_code() == 1

    def test_invalid_report(self, tmp_path):
        (tmp_path / "r.json").write_text("{not json")
        with pytest.raises(StoreError):
            ReportRepository(tmp_path).load("r.json")
