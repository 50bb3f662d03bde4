import os
import yaml
from pathlib import Path
from typing import Dict, Any, Optional
from pydantic import BaseModel, Field
from dotenv import load_dotenv

load_dotenv()

class OtelbaevConfig(BaseModel):
    sublevel_tolerance: float = Field(1e-6, gt=0)
    integral_rel_tolerance: float = Field(1e-6, gt=0)
    bisection_rel_tolerance: float = Field(1e-12, gt=0)
    profile_cells: int = Field(256, ge=8)
    quadrature_nodes: int = Field(16, ge=2)
    max_refinement_depth: int = Field(40, ge=1)

class DecompositionConfig(BaseModel):
    max_intervals: int = Field(1_000_000, ge=1)
    product_tolerance: float = 1e-12
    midpoint_tolerance: float = 1e-9

class SpectrumConfig(BaseModel):
    tolerance: float = Field(1e-12, gt=0)
    kappa_margin: float = Field(1.01, ge=1.0)
    kappa_abs_margin: float = Field(1e-6, ge=0)
    fd_step: float = Field(1e-3, gt=0)
    fd_pad: float = Field(40.0, gt=0)
    lt_identity_rel_tolerance: float = 1e-6

class BoundsConfig(BaseModel):
    epsilon_points_per_decade: int = Field(64, ge=1)
    epsilon_decades: int = Field(6, ge=1)
    eta_grid_points: int = Field(200, ge=2)

class RunnerConfig(BaseModel):
    threads: int = Field(1, ge=1)

class CorpusConfig(BaseModel):
    size: int = Field(200, ge=1)
    max_atoms: int = Field(20, ge=0)
    max_segments: int = Field(10, ge=0)
    seed: int = 0

class Config:
    def __init__(self, config_path: Optional[str] = None):
        if config_path is None:
            config_path = Path(__file__).parent.parent.parent / "config" / "settings.yaml"

        self.data: Dict[str, Any] = {}
        if Path(config_path).exists():
            with open(config_path, 'r') as file:
                self.data = yaml.safe_load(file) or {}

        self.otelbaev = OtelbaevConfig(**self.data.get('otelbaev', {}))
        self.decomposition = DecompositionConfig(**self.data.get('decomposition', {}))
        self.spectrum = SpectrumConfig(**self.data.get('spectrum', {}))
        self.bounds = BoundsConfig(**self.data.get('bounds', {}))
        self.runner = RunnerConfig(**self.data.get('runner', {}))
        self.corpus = CorpusConfig(**self.data.get('corpus', {}))

        # Environment variables
        if os.getenv('OTELBAEV_SEED'):
            self.corpus.seed = int(os.getenv('OTELBAEV_SEED'))
        if os.getenv('OTELBAEV_CORPUS_SIZE'):
            self.corpus.size = int(os.getenv('OTELBAEV_CORPUS_SIZE'))
        if os.getenv('OTELBAEV_THREADS'):
            self.runner.threads = max(1, int(os.getenv('OTELBAEV_THREADS')))

        # Directories
        self.reports_dir = Path(os.getenv(
            'OTELBAEV_REPORTS_DIR',
            self.data.get('output', {}).get('reports_dir', './reports')
        ))

        app = self.data.get('app', {})
        self.app_name = app.get('name', 'otelbaev-bounds')
        self.version = str(app.get('version', '1.0.0'))

    def tolerances(self) -> Dict[str, float]:
        """Tolerances recorded in every report summary"""
        return {
            "pointwise_d": 0.0,
            "sublevel_length": self.otelbaev.sublevel_tolerance,
            "power_integral_rel": self.otelbaev.integral_rel_tolerance,
            "bisection_rel": self.otelbaev.bisection_rel_tolerance,
            "spectrum_kappa": self.spectrum.tolerance,
            "decomposition_product": self.decomposition.product_tolerance,
            "decomposition_midpoint": self.decomposition.midpoint_tolerance,
        }

# Global config instance
config = Config()
