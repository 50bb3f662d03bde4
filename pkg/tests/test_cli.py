import csv
import json
from pathlib import Path

import pytest
from typer.testing import CliRunner

from main import app

runner = CliRunner()
SCENARIOS = Path(__file__).resolve().parent.parent / "scenarios"


@pytest.fixture
def delta_file(tmp_path):
    path = tmp_path / "delta.json"
    path.write_text(json.dumps({"atoms": [{"x": 0.0, "mass": 1.0}]}))
    return path


@pytest.mark.cli
class TestCli:
    def test_config_info(self):
        result = runner.invoke(app, ["config-info"])
        assert result.exit_code == 0
        assert "spectrum.tolerance" in result.output

    def test_spectrum(self, delta_file, tmp_path):
        out = tmp_path / "spectrum.csv"
        result = runner.invoke(app, ["spectrum", "--measure", str(delta_file), "--output", str(out)])
        assert result.exit_code == 0
        rows = list(csv.reader(out.open()))
        assert rows[0] == ["nu", "lambda", "kappa", "err"]
        assert float(rows[1][1]) == pytest.approx(-0.25, rel=1e-12)

    def test_eval(self, delta_file, tmp_path):
        out = tmp_path / "profile.csv"
        result = runner.invoke(app, ["eval", "-m", str(delta_file), "--alpha", "2", "--from", "-1",
                                     "--to", "1", "--step", "0.5", "--output", str(out)])
        assert result.exit_code == 0
        rows = list(csv.reader(out.open()))
        assert rows[3] == ["0.0", "0.5", "4.0"]
        assert len(rows) == 6

    def test_eval_bad_measure(self, tmp_path):
        path = tmp_path / "bad.json"
        path.write_text(json.dumps({"atoms": [{"x": 0.0, "mass": -1.0}]}))
        result = runner.invoke(app, ["eval", "-m", str(path), "--from", "0", "--to", "1", "--step", "0.1"])
        assert result.exit_code == 2

    def test_spectrum_missing_file(self, tmp_path):
        result = runner.invoke(app, ["spectrum", "-m", str(tmp_path / "absent.json")])
        assert result.exit_code == 2

    def test_run(self, tmp_path):
        result = runner.invoke(app, ["run", str(SCENARIOS / "zero_measure.json"), "--out", str(tmp_path / "r")])
        assert result.exit_code == 0
        assert (tmp_path / "r" / "summary.json").exists()

    def test_run_bad_scenario(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{")
        result = runner.invoke(app, ["run", str(path)])
        assert result.exit_code == 2
