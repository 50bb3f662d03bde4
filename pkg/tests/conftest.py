import logging
import os

import numpy as np
import pytest

from core.measure import build_measure
from generators.example_generator import corpus, generate_example
from utils.config import CorpusConfig

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)

SEED = int(os.getenv("OTELBAEV_SEED", "0"))
SMALL_CORPUS = CorpusConfig(size=12, max_atoms=6, max_segments=4, seed=SEED)
FULL_CORPUS = CorpusConfig(size=200, max_atoms=20, max_segments=10, seed=SEED)


def pytest_configure(config):
    """Pytest configuration hook"""
    config.addinivalue_line("markers", "slow: full-size corpus runs")
    config.addinivalue_line("markers", "property: randomized property suites")
    config.addinivalue_line("markers", "acceptance: reference values and closed forms")
    config.addinivalue_line("markers", "cli: command-line and scenario runner tests")


@pytest.fixture
def delta0():
    return build_measure([(0.0, 1.0)])


@pytest.fixture
def double_delta0():
    """2 delta_0"""
    return build_measure([(0.0, 2.0)])


@pytest.fixture
def symmetric_pair():
    return build_measure([(-1.0, 1.0), (1.0, 1.0)])


@pytest.fixture
def box():
    return build_measure(density=[(-1.0, 1.0, 1.0)])


@pytest.fixture
def mixed():
    return build_measure([(-1.5, 0.8), (0.25, 1.2)], [(1.0, 2.5, 0.6)])


@pytest.fixture
def comb():
    return generate_example("sparse_comb", {"alpha": 2.0, "masses": [1.0 / k ** 2 for k in range(1, 6)],
                                            "spacing_factor": 2.0})


@pytest.fixture
def rng():
    return np.random.default_rng(SEED)


@pytest.fixture(scope="session")
def small_corpus():
    return corpus(settings=SMALL_CORPUS)


@pytest.fixture(scope="session")
def full_corpus():
    return corpus(settings=FULL_CORPUS)


@pytest.fixture
def reports_dir(tmp_path):
    return tmp_path / "reports"
