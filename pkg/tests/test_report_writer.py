import json
import math

import pytest

from automation.report_writer import (
    FAIL, PASS, ReportTable, TaskResult, build_summary, emit_report, format_cell, write_table,
)
from utils.errors import ReportError


class TestFormatCell:
    @pytest.mark.parametrize("value, text", [
        (0.1, "0.1"),
        (1.0 / 3.0, "0.3333333333333333"),
        (-0.25, "-0.25"),
        (1e-300, "1e-300"),
        (math.inf, "inf"),
        (-math.inf, "-inf"),
        (math.nan, "nan"),
        (None, ""),
        (True, "true"),
        (3, "3"),
        ("pass", "pass"),
    ])
    def test_cells(self, value, text):
        assert format_cell(value) == text

    def test_round_trip(self):
        value = 0.1 + 0.2
        assert float(format_cell(value)) == value


class TestTaskResult:
    def test_flags_are_counted(self):
        result = TaskResult("lt_table", "01_lt_table")
        assert result.flag(True) == PASS
        assert result.flag(False) == FAIL
        assert result.check(False) == FAIL
        assert (result.passed, result.failed, result.check_failures) == (1, 1, 1)

    def test_summary(self):
        ok = TaskResult("edges", "01_edges", passed=3)
        bad = TaskResult("lt_table", "02_lt_table", status="error", error="boom", error_kind="parameter")
        summary = build_summary("demo", [ok, bad], {"b": 2.0, "a": 1.0}, 2)
        assert summary["counts"] == {"pass": 3, "fail": 0, "check_failures": 0, "errors": 1}
        assert list(summary["tolerances"]) == ["a", "b"]
        assert summary["tasks"][1]["error_kind"] == "parameter"
        assert "numpy" in summary["versions"] and "scipy" in summary["versions"]


class TestEmitReport:
    def _results(self):
        result = TaskResult("counting_table", "01_counting_table")
        result.tables.append(ReportTable("01_counting_table", ["lambda", "N", "upper"],
                                         [(0.1, 1, math.inf), (0.3, None, 2.0)]))
        return [result]

    def test_files(self, reports_dir):
        files = emit_report("demo", self._results(), reports_dir, {"spectrum_kappa": 1e-12}, 0)
        assert [f.name for f in files] == ["01_counting_table.csv", "summary.json"]
        lines = (reports_dir / "01_counting_table.csv").read_text().splitlines()
        assert lines == ["lambda,N,upper", "0.1,1,inf", "0.3,,2.0"]
        summary = json.loads((reports_dir / "summary.json").read_text())
        assert summary["scenario"] == "demo"
        assert summary["exit_code"] == 0

    def test_rerun_is_byte_identical(self, tmp_path):
        first = emit_report("demo", self._results(), tmp_path / "a", {}, 0)
        second = emit_report("demo", self._results(), tmp_path / "b", {}, 0)
        for a, b in zip(first, second):
            assert a.read_bytes() == b.read_bytes()

    def test_unwritable_directory(self, tmp_path):
        blocker = tmp_path / "file"
        blocker.write_text("")
        with pytest.raises(ReportError):
            emit_report("demo", self._results(), blocker / "sub", {}, 0)

    def test_ragged_row(self, tmp_path):
        with pytest.raises(ReportError):
            write_table(ReportTable("t", ["a", "b"], [(1,)]), tmp_path / "t.csv")
