"""
Classical functionals of an absolutely continuous measure q(x) dx, used to
contrast the Otelbaev-based bounds with the classical Lieb-Thirring and the
subcritical Netrusov-Weidl estimates.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Tuple

from core.measure import IntervalSpec, Measure, mass
from utils.errors import ParameterError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class DyadicBlocks:
    """F_0 = [-1, 1], F_k = [-2^k, -2^(k-1)] u [2^(k-1), 2^k] for 1 <= k <= K"""
    K: int

    def __post_init__(self):
        if not isinstance(self.K, int) or self.K < 0:
            raise ParameterError(f"truncation depth must be a non-negative integer, got {self.K!r}")

    def block(self, k: int) -> List[Tuple[float, float]]:
        if not 0 <= k <= self.K:
            raise ParameterError(f"block {k} outside 0..{self.K}")
        if k == 0:
            return [(-1.0, 1.0)]
        lo, hi = 2.0 ** (k - 1), 2.0 ** k
        return [(-hi, -lo), (lo, hi)]

    def positive(self, k: int) -> Tuple[float, float]:
        if k < 1:
            raise ParameterError(f"positive half-block needs k >= 1, got {k}")
        return 2.0 ** (k - 1), 2.0 ** k

    @staticmethod
    def center(k: int) -> float:
        return 3.0 * 2.0 ** (k - 2)

    @property
    def extent(self) -> Tuple[float, float]:
        return -(2.0 ** self.K), 2.0 ** self.K


@dataclass(frozen=True)
class NWFunctionals:
    gamma: float
    sigma: float
    K: int
    A: float
    B: float
    block_terms: Tuple[float, ...]
    unit_terms: Tuple[Tuple[int, float], ...]


def _absolutely_continuous(m: Measure, what: str):
    if m.atoms:
        raise ParameterError(f"{what} is defined for absolutely continuous measures only; "
                             f"found {len(m.atoms)} atom(s)")


def classical_lt_integral(m: Measure, gamma: float) -> float:
    """Exact integral of q^{1/2+gamma} for the piecewise-constant density q"""
    _absolutely_continuous(m, "the classical Lieb-Thirring integral")
    if not gamma > 0:
        raise ParameterError(f"gamma must be positive, got {gamma!r}")
    p = 0.5 + gamma
    return math.fsum((s.right - s.left) * s.value ** p for s in m.density)


def maximal_function(m: Measure, x: float) -> float:
    """Centered Hardy-Littlewood maximal function of the density at x.

    The window average c0/(2r) + c1/2 is monotone between breakpoints, so the
    supremum sits at some r = |b - x| or in the limit r -> 0.
    """
    _absolutely_continuous(m, "the maximal function")
    if m.is_zero:
        return 0.0
    st = m.structure
    P, V = st.points, st.gap_value
    # r -> 0: mean of the one-sided densities
    left = right = 0.0
    for i in range(len(P) - 1):
        if P[i] < x <= P[i + 1]:
            left = V[i]
        if P[i] <= x < P[i + 1]:
            right = V[i]
    best = 0.5 * (left + right)
    for b in P:
        r = abs(b - x)
        if r > 0:
            best = max(best, mass(m, IntervalSpec.closed(x - r, x + r)) / (2.0 * r))
    return best


def _weighted_mass(left: float, right: float, value: float, sigma: float) -> float:
    """Integral of (1+|x|)^sigma * value over [left, right]"""
    def primitive(t: float) -> float:
        # odd antiderivative of (1+|x|)^sigma
        return math.copysign(((1.0 + abs(t)) ** (sigma + 1.0) - 1.0) / (sigma + 1.0), t)
    return value * (primitive(right) - primitive(left))


def nw_functionals(m: Measure, gamma: float, K: int) -> NWFunctionals:
    """A_gamma and B_gamma truncated to the blocks k <= K.

    B_gamma sums over the unit intervals [j, j+1] with 0 <= j < 2^K.
    """
    _absolutely_continuous(m, "the Netrusov-Weidl functionals")
    if not 0.0 < gamma < 0.5:
        raise ParameterError(f"gamma must lie in (0, 1/2) for the subcritical functionals, got {gamma!r}")
    blocks = DyadicBlocks(K)
    sigma = (0.5 - gamma) / (0.5 + gamma)
    p = 0.5 + gamma

    block_terms = []
    for k in range(K + 1):
        weighted = 0.0
        for lo, hi in blocks.block(k):
            weighted += math.fsum(_weighted_mass(max(s.left, lo), min(s.right, hi), s.value, sigma)
                                  for s in m.density if s.right > lo and s.left < hi)
        block_terms.append(weighted ** p)
    series = math.fsum(block_terms)
    a_value = series + series ** (2.0 * gamma / p)

    _, hi = blocks.extent
    unit_terms = []
    for j in range(int(hi)):
        w = mass(m, IntervalSpec.closed(float(j), float(j + 1)))
        if w > 0:
            unit_terms.append((j, w ** (2.0 * gamma) + w ** p))
    b_value = math.fsum(t for _, t in unit_terms)
    logger.debug(f"NW functionals gamma={gamma}, K={K}: A={a_value!r}, B={b_value!r}")
    return NWFunctionals(gamma, sigma, K, a_value, b_value, tuple(block_terms), tuple(unit_terms))
