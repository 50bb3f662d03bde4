import pytest

from utils.config import Config, config


class TestConfig:
    def test_defaults_loaded_from_settings(self):
        assert config.spectrum.fd_step == pytest.approx(1e-3)
        assert config.decomposition.product_tolerance == pytest.approx(1e-12)
        assert config.bounds.epsilon_points_per_decade == 64
        assert config.data["logging"]["level"] == "INFO"

    def test_missing_file_falls_back_to_defaults(self, tmp_path):
        cfg = Config(str(tmp_path / "absent.yaml"))
        assert cfg.otelbaev.profile_cells == 256
        assert cfg.corpus.size == 200
        assert cfg.app_name == "otelbaev-bounds"

    def test_yaml_sections_override_defaults(self, tmp_path):
        path = tmp_path / "settings.yaml"
        path.write_text("spectrum:\n  tolerance: 1.0e-9\ncorpus:\n  size: 7\n")
        cfg = Config(str(path))
        assert cfg.spectrum.tolerance == pytest.approx(1e-9)
        assert cfg.corpus.size == 7
        assert cfg.spectrum.fd_pad == pytest.approx(40.0)

    def test_environment_overrides(self, tmp_path, monkeypatch):
        monkeypatch.setenv("OTELBAEV_SEED", "42")
        monkeypatch.setenv("OTELBAEV_THREADS", "3")
        monkeypatch.setenv("OTELBAEV_REPORTS_DIR", str(tmp_path / "out"))
        cfg = Config(str(tmp_path / "absent.yaml"))
        assert cfg.corpus.seed == 42
        assert cfg.runner.threads == 3
        assert cfg.reports_dir == tmp_path / "out"

    def test_tolerances_summary(self):
        tol = config.tolerances()
        assert tol["decomposition_midpoint"] == pytest.approx(1e-9)
        assert tol["spectrum_kappa"] == pytest.approx(config.spectrum.tolerance)
