"""
Named measure families, their known Otelbaev profiles, and the random corpus.

Every infinite family is produced as a truncation to the dyadic blocks k <= K.
"""
import logging
import math
from typing import Any, Callable, Dict, List, Optional, Sequence

import numpy as np

from analysis.comparison import DyadicBlocks
from core.measure import Measure, build_measure
from utils.config import CorpusConfig, config
from utils.errors import MeasureError, ParameterError

logger = logging.getLogger(__name__)


def _positive(value: float, name: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise ParameterError(f"{name} is not a number: {value!r}")
    if not (math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be positive, got {value!r}")
    return value


def _depth(K: Any) -> int:
    if isinstance(K, bool) or not isinstance(K, int) or K < 0:
        raise ParameterError(f"truncation depth K must be a non-negative integer, got {K!r}")
    return K


def _even_blocks(K: int) -> List[int]:
    return [k for k in range(2, K + 1, 2)]


class ExampleGenerator:
    """Registry of the example families, addressable by name from scenario files"""

    def __init__(self):
        self.families: Dict[str, Callable[..., Measure]] = {
            "single_delta": self.single_delta,
            "double_delta": self.double_delta,
            "compact_uniform": self.compact_uniform,
            "sparse_comb": self.sparse_comb,
            "lt_counterexample": self.lt_counterexample,
            "nw_counterexample": self.nw_counterexample,
        }

    def generate(self, name: str, params: Optional[Dict[str, Any]] = None) -> Measure:
        if name not in self.families:
            raise ParameterError(f"unknown example {name!r}; known: {', '.join(sorted(self.families))}")
        params = params or {}
        try:
            m = self.families[name](**params)
        except TypeError as e:
            raise ParameterError(f"bad parameters for {name}: {e}")
        logger.debug(f"generated {name}({params}): {m!r}")
        return m

    @staticmethod
    def single_delta(c: float = 1.0) -> Measure:
        return build_measure([(0.0, _positive(c, "c"))])

    @staticmethod
    def double_delta(y: float, c: float = 1.0) -> Measure:
        """c (delta_0 + delta_y)"""
        y = _positive(y, "y")
        c = _positive(c, "c")
        return build_measure([(0.0, c), (y, c)])

    @staticmethod
    def compact_uniform(c: float, R: float) -> Measure:
        """Density c on [-R, R]"""
        c = _positive(c, "c")
        R = _positive(R, "R")
        return build_measure(density=[(-R, R, c)])

    @staticmethod
    def sparse_comb(alpha: float, masses: Sequence[float], spacing_factor: float = 2.0,
                    positions: Optional[Sequence[float]] = None) -> Measure:
        """Atoms a_k at x_k with x_{k+1} - x_k > max(1/(alpha a_k), 1/(alpha a_{k+1})).

        Without explicit positions the gaps are spacing_factor times that
        minimum, starting from x_1 = 0.
        """
        alpha = _positive(alpha, "alpha")
        if not masses:
            raise ParameterError("a comb needs at least one atom")
        masses = [_positive(a, f"masses[{k}]") for k, a in enumerate(masses)]
        need = [max(1.0 / (alpha * a), 1.0 / (alpha * b)) for a, b in zip(masses[:-1], masses[1:])]

        if positions is None:
            if _positive(spacing_factor, "spacing_factor") <= 1.0:
                raise ParameterError(f"spacing_factor must exceed 1, got {spacing_factor!r}")
            xs = [0.0]
            for gap in need:
                xs.append(xs[-1] + spacing_factor * gap)
        else:
            if len(positions) != len(masses):
                raise ParameterError(f"{len(positions)} positions for {len(masses)} masses")
            xs = [float(x) for x in positions]
            for k, gap in enumerate(need):
                if not xs[k + 1] - xs[k] > gap:
                    raise ParameterError(
                        f"x_{k + 2} - x_{k + 1} = {xs[k + 1] - xs[k]!r} is not greater than "
                        f"max((alpha a_{k + 1})^-1, (alpha a_{k + 2})^-1) = {gap!r}")
        return build_measure(list(zip(xs, masses)))

    @staticmethod
    def lt_counterexample(p: float, K: int) -> Measure:
        """Boxes of height 2^(k/p) and width 2^(-k) centered at x_k, even k <= K"""
        p = _positive(p, "p")
        if p <= 1.0:
            raise ParameterError(f"p must exceed 1, got {p!r}")
        K = _depth(K)
        density = []
        for k in _even_blocks(K):
            x_k, half = DyadicBlocks.center(k), 2.0 ** (-(k + 1))
            density.append((x_k - half, x_k + half, 2.0 ** (k / p)))
        return build_measure(density=density)

    @staticmethod
    def nw_counterexample(gamma: float, K: int) -> Measure:
        """q1 + q2 with q1 = 1 near x_k and q2 = 8 2^(-k/(2 gamma)) on x_k +- 2^(k-3), even k <= K"""
        gamma = _positive(gamma, "gamma")
        if gamma >= 0.5:
            raise ParameterError(f"gamma must lie in (0, 1/2), got {gamma!r}")
        K = _depth(K)
        sigma = (0.5 - gamma) / (0.5 + gamma)
        density = []
        for k in _even_blocks(K):
            x_k = DyadicBlocks.center(k)
            narrow = 2.0 ** (-(k * sigma + 1.0))
            density.append((x_k - narrow, x_k + narrow, 1.0))
            wide = 2.0 ** (k - 3)
            density.append((x_k - wide, x_k + wide, 8.0 * 2.0 ** (-k / (2.0 * gamma))))
        return build_measure(density=density)


example_generator = ExampleGenerator()


def generate_example(name: str, params: Optional[Dict[str, Any]] = None) -> Measure:
    return example_generator.generate(name, params)


# Known profiles

def single_delta_qstar(c: float, alpha: float, x: float) -> float:
    """q*_alpha of c delta_0: plateau (alpha c)^2 on |x| <= 1/(2 alpha c), then 1/(4x^2)"""
    if abs(x) <= 0.5 / (alpha * c):
        return (alpha * c) ** 2
    return 1.0 / (4.0 * x * x)


def double_delta_qstar(y: float, x: float) -> float:
    """q*_2 of delta_0 + delta_y, y > 0"""
    y = _positive(y, "y")

    def left(t: float) -> float:
        return 1.0 / (4.0 * t * t)

    def right(t: float) -> float:
        return 1.0 / (4.0 * (y - t) ** 2)

    if x <= -0.25:
        return left(x)
    if x >= y + 0.25:
        return right(x)
    if y >= 0.5:
        if x <= 0.25:
            return 4.0
        if x <= 0.5 * y:
            return left(x)
        if x <= y - 0.25:
            return right(x)
        return 4.0
    if y >= 0.25:
        if x <= y - 0.25:
            return 4.0
        if x <= 0.5 * y:
            return right(x)
        if x <= 0.25:
            return left(x)
        return 4.0
    if x <= y - 0.25:
        return 4.0
    if x <= y - 0.125:
        return right(x)
    if x <= 0.125:
        return 16.0
    if x <= 0.25:
        return left(x)
    return 4.0


def single_delta_lt_upper(gamma: float, c: float = 1.0) -> float:
    """4^(gamma+1) times the integral of (q*_2)^(gamma+1/2) for c delta_0; (4 gamma + 2)/gamma 16^gamma at c = 1"""
    gamma = _positive(gamma, "gamma")
    c = _positive(c, "c")
    return 4.0 ** (gamma + 1.0) * (2.0 * c) ** (2.0 * gamma) * (1.0 + 0.5 / gamma)


def double_delta_lt_upper(y: float, gamma: float) -> float:
    """4^(gamma+1) times the integral of (q*_2)^(gamma+1/2) for delta_0 + delta_y"""
    y = _positive(y, "y")
    g = _positive(gamma, "gamma")
    if y >= 0.5:
        return 4.0 * 16.0 ** g / g + 8.0 * 16.0 ** g - 2.0 * 4.0 ** g * y ** (-2.0 * g) / g
    if y >= 0.25:
        return (g * 4.0 ** (2.0 * g + 2.0) * y + y ** (-2.0 * g) * 4.0 ** (g + 0.5)) / g
    return (4.0 ** (3.0 * g + 0.5) + y * g * 4.0 ** (2.0 * g + 2.0)
            + g * 4.0 ** (3.0 * g + 2.5) * (0.125 - 0.5 * y)) / g


def double_delta_far_limit(gamma: float) -> float:
    """Value as y -> infinity; it is not the single delta value"""
    g = _positive(gamma, "gamma")
    return 4.0 * 16.0 ** g / g + 8.0 * 16.0 ** g


def double_delta_near_limit(gamma: float) -> float:
    """Value as y -> 0, equal to that of 2 delta_0"""
    g = _positive(gamma, "gamma")
    return (4.0 ** (3.0 * g + 0.5) + g * 4.0 ** (3.0 * g + 1.0)) / g


# Random corpus

def random_measure(rng: np.random.Generator, max_atoms: int = 20, max_segments: int = 10) -> Measure:
    """Mixed measure on [-4, 4]: up to max_atoms atoms and max_segments density segments"""
    if max_atoms < 0 or max_segments < 0 or max_atoms + max_segments == 0:
        raise ParameterError(f"need room for at least one atom or segment, got {max_atoms}/{max_segments}")
    n_atoms = int(rng.integers(0, max_atoms + 1))
    n_segments = int(rng.integers(0, max_segments + 1))
    if n_atoms + n_segments == 0:
        if max_atoms:
            n_atoms = 1
        else:
            n_segments = 1

    atoms = [(float(x), float(a)) for x, a in
             zip(rng.uniform(-4.0, 4.0, n_atoms), rng.uniform(0.1, 2.0, n_atoms))]
    lefts = rng.uniform(-4.0, 3.5, n_segments)
    widths = rng.uniform(0.05, 1.5, n_segments)
    values = rng.uniform(0.05, 2.0, n_segments)
    density = [(float(l), float(l + w), float(v)) for l, w, v in zip(lefts, widths, values)]
    try:
        return build_measure(atoms, density)
    except MeasureError as e:
        raise ParameterError(f"random draw produced an invalid measure: {e}")


def corpus(seed: Optional[int] = None, size: Optional[int] = None,
           settings: Optional[CorpusConfig] = None) -> List[Measure]:
    """Deterministic list of random measures"""
    settings = settings or config.corpus
    seed = settings.seed if seed is None else seed
    size = settings.size if size is None else size
    rng = np.random.default_rng(seed)
    measures = [random_measure(rng, settings.max_atoms, settings.max_segments) for _ in range(size)]
    logger.info(f"corpus seed={seed}: {len(measures)} measures")
    return measures
