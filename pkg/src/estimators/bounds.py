"""
Two-sided spectral estimates for H = -d^2/dx^2 - m from Otelbaev's function.

Counting and eigenvalue bounds use q*_alpha at the two fixed averaging
parameters ALPHA_SMALL = 1/(pi^2 + 3/4) (lower side) and BETA = 2 (upper side).
Every value is tagged with the estimate that produced it.
"""
import logging
import math
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np

from core.decomposition import build_decomposition
from core.measure import Measure, support_hull
from core.otelbaev import otelbaev_function, power_integral, sublevel_integral, sublevel_measure, sup_norm
from utils.config import BoundsConfig, config
from utils.errors import ParameterError

logger = logging.getLogger(__name__)

ALPHA_SMALL = 1.0 / (math.pi ** 2 + 0.75)
BETA = 2.0

COUNTING_SOURCES = {
    "lower1": "sublevel length times min sqrt(q*) at alpha, threshold 4 lambda",
    "lower2": "sqrt(lambda) times sublevel length at alpha, threshold 4 lambda",
    "lower3_literal": "sup over sqrt(eta) >= lambda of eta times sublevel length",
    "lower3_variant": "sup over eta >= lambda of sqrt(eta) times sublevel length",
    "upper1": "sublevel length times max sqrt(q*) at beta, threshold lambda/4",
    "upper2": "sublevel length times sqrt(sup q*_beta)",
    "upper3": "4 times the integral of sqrt(q*_beta) over the sublevel set",
    "upper_bracketing": "number of decomposition intervals with lambda <= 1/|I|^2",
}


@dataclass
class CountingBounds:
    lam: float
    lower1: float = 0.0
    lower2: float = 0.0
    lower3_literal: float = 0.0
    lower3_variant: float = 0.0
    upper1: float = 0.0
    upper2: float = 0.0
    upper3: float = 0.0
    upper_bracketing: float = 0.0
    errors: Dict[str, float] = field(default_factory=dict)

    @property
    def best_lower(self) -> float:
        """Lower bounds that enter the sandwich; lower3 is reported only"""
        return max(self.lower1, self.lower2)

    @property
    def best_upper(self) -> float:
        return min(self.upper1, self.upper2, self.upper3, self.upper_bracketing)

    def source(self, name: str) -> str:
        return COUNTING_SOURCES[name]


@dataclass
class LTBounds:
    gamma: float
    lower_qstar: float = 0.0
    upper_qstar: float = 0.0
    lower_c1: float = 0.0
    upper_c2: float = 0.0
    upper_decomp: float = 0.0
    decomp_by_length: float = 0.0
    upper_compact: float = 0.0
    lower_mass: Optional[float] = None
    upper_mass: Optional[float] = None
    errors: Dict[str, float] = field(default_factory=dict)

    def lowers(self) -> Dict[str, float]:
        out = {"lower_qstar": self.lower_qstar, "lower_c1": self.lower_c1}
        if self.lower_mass is not None:
            out["lower_mass"] = self.lower_mass
        return out

    def uppers(self) -> Dict[str, float]:
        out = {"upper_qstar": self.upper_qstar, "upper_c2": self.upper_c2,
               "upper_decomp": self.upper_decomp, "upper_compact": self.upper_compact}
        if self.upper_mass is not None:
            out["upper_mass"] = self.upper_mass
        return out


@dataclass(frozen=True)
class DecompositionLTBound:
    """The same bound summed over interval masses and over interval lengths; equal when the tiling is exact"""
    gamma: float
    by_mass: float
    by_length: float

    @property
    def discrepancy(self) -> float:
        scale = max(self.by_mass, self.by_length)
        return abs(self.by_mass - self.by_length) / scale if scale > 0 else 0.0


@dataclass(frozen=True)
class SpectralEdgeBounds:
    lambda1_lo: float
    lambda1_hi: float
    Lambda_lo: float
    Lambda_hi: float
    Q1: float
    Q2: float


@dataclass(frozen=True)
class CombBounds:
    gamma: float
    weight_sum: float
    lower: float
    upper: float


def _check_positive(value: float, name: str):
    if not (isinstance(value, (int, float)) and math.isfinite(value) and value > 0):
        raise ParameterError(f"{name} must be positive, got {value!r}")


def _lt_lower_constant(gamma: float) -> float:
    return gamma / (gamma + 0.5) * 0.25 ** (gamma + 0.5)


def _single_alpha_constants(gamma: float) -> Tuple[float, float]:
    c1 = gamma / (gamma + 0.5) * (1.0 / (2.0 * math.pi ** 2 + 1.5)) ** (1.0 + 2.0 * gamma)
    c2 = 2.0 ** (4.0 * gamma + 3.0)
    return c1, c2


@lru_cache(maxsize=64)
def _bracketing_lengths(m: Measure) -> Tuple[float, ...]:
    return tuple(iv.length for iv in build_decomposition(m, BETA).carrying())


def _length(m: Measure, alpha: float, lam: float) -> float:
    return sublevel_measure(m, alpha, lam).total_length


def _best_over_grid(lo: float, hi: float, points: int, value) -> float:
    if hi < lo:
        return 0.0
    grid = np.geomspace(lo, hi, points) if hi > lo else np.array([lo])
    return max(value(float(eta)) for eta in grid)


def counting_bounds(m: Measure, lam: float, with_lower3: bool = True,
                    settings: Optional[BoundsConfig] = None) -> CountingBounds:
    """Bounds on N(-lam), the number of eigenvalues strictly below -lam.

    The two lower3 readings take a grid search each; with_lower3=False skips them.
    """
    _check_positive(lam, "lambda")
    settings = settings or config.bounds
    out = CountingBounds(lam)
    if m.is_zero:
        return out

    low = sublevel_measure(m, ALPHA_SMALL, 4.0 * lam)
    # the minimum of q* over {q* >= t} is t itself, the set being closed and bounded
    if not low.is_empty:
        out.lower1 = 0.5 * math.sqrt(4.0 * lam) * low.total_length
        out.lower2 = math.sqrt(lam) * low.total_length
    out.errors["lower1"] = out.errors["lower2"] = math.sqrt(lam) * low.err

    if with_lower3:
        sup_small = sup_norm(m, ALPHA_SMALL)[0]
        grid_points = settings.eta_grid_points
        out.lower3_literal = _best_over_grid(
            lam * lam, 0.25 * sup_small, grid_points,
            lambda eta: eta * _length(m, ALPHA_SMALL, 4.0 * eta))
        out.lower3_variant = _best_over_grid(
            lam, 0.25 * sup_small, grid_points,
            lambda eta: math.sqrt(eta) * _length(m, ALPHA_SMALL, 4.0 * eta))

    high = sublevel_measure(m, BETA, 0.25 * lam)
    sup_beta, sup_beta_err = sup_norm(m, BETA)
    if not high.is_empty:
        # the maximum over a non-empty sublevel set is the global supremum
        out.upper1 = math.sqrt(sup_beta + sup_beta_err) * high.total_length
        out.upper2 = out.upper1
    out.errors["upper1"] = out.errors["upper2"] = math.sqrt(sup_beta + sup_beta_err) * high.err
    value, err = sublevel_integral(m, BETA, -1.0, 0.25 * lam)
    out.upper3 = 4.0 * value
    out.errors["upper3"] = 4.0 * err

    out.upper_bracketing = float(sum(1 for length in _bracketing_lengths(m) if lam * length ** 2 <= 1.0))
    logger.debug(f"counting bounds at lambda={lam}: [{out.best_lower}, {out.best_upper}]")
    return out


def eigenvalue_bounds(m: Measure, n: int, rel_tol: float = 1e-10,
                      settings: Optional[BoundsConfig] = None) -> Tuple[float, float]:
    """Interval (lo, hi) containing the n-th negative eigenvalue, hi = 0 when none is certified"""
    if not isinstance(n, int) or n < 1:
        raise ParameterError(f"eigenvalue index must be a positive integer, got {n!r}")
    settings = settings or config.bounds
    if m.is_zero:
        return 0.0, 0.0

    s_beta = sup_norm(m, BETA)[0]
    # lo = -inf{lam: L(M_beta(lam/4)) <= (n-1)/sqrt(s_beta)}; the length falls in lam
    target = (n - 1) / math.sqrt(s_beta)
    a, b = 0.0, 4.0 * s_beta
    if n > 1:
        if _length(m, BETA, 0.25 * b) > target:
            # the top level set is a plateau of positive length; just above it the set is empty
            b *= 1.0 + 1e-9
        while b - a > rel_tol * b:
            mid = 0.5 * (a + b)
            if _length(m, BETA, 0.25 * mid) <= target:
                b = mid
            else:
                a = mid
    lo = -b

    # hi = -sup{lam: sqrt(lam) L(M_alpha(4 lam)) >= n}; scan down from the top of the range
    top = 0.25 * sup_norm(m, ALPHA_SMALL)[0]
    points = settings.epsilon_points_per_decade * settings.epsilon_decades + 1
    grid = np.geomspace(top, top * 10.0 ** (-settings.epsilon_decades), points)

    def feasible(lam: float) -> bool:
        return math.sqrt(lam) * _length(m, ALPHA_SMALL, 4.0 * lam) >= n

    hi = 0.0
    for k, lam in enumerate(grid):
        if feasible(float(lam)):
            good, bad = float(lam), float(grid[k - 1]) if k > 0 else float(lam)
            while bad - good > rel_tol * bad:
                mid = 0.5 * (good + bad)
                if feasible(mid):
                    good = mid
                else:
                    bad = mid
            hi = -good
            break
    logger.debug(f"lambda_{n} in [{lo!r}, {hi!r}]")
    return lo, hi


def n_minus_lower(m: Measure, settings: Optional[BoundsConfig] = None) -> float:
    """sup over eps of eps^(3/2)/2 times the integral of 1/q*_alpha over {q*_alpha >= eps}"""
    settings = settings or config.bounds
    if m.is_zero:
        return 0.0
    top = sup_norm(m, ALPHA_SMALL)[0]
    points = settings.epsilon_points_per_decade * settings.epsilon_decades + 1
    best = 0.0
    for eps in np.geomspace(top * 10.0 ** (-settings.epsilon_decades), top, points):
        value, _ = sublevel_integral(m, ALPHA_SMALL, 2.0, float(eps))
        best = max(best, 0.5 * float(eps) ** 1.5 * value)
    return best


def spectral_edges(m: Measure) -> SpectralEdgeBounds:
    """Ground state interval and the essential spectrum edge"""
    if m.is_zero:
        return SpectralEdgeBounds(0.0, 0.0, 0.0, 0.0, 0.0, 0.0)
    s_two, err_two = sup_norm(m, BETA)
    s_small = sup_norm(m, ALPHA_SMALL)[0]
    # compact support: q*_2 decays at infinity, so both limits vanish and Lambda = 0
    return SpectralEdgeBounds(-4.0 * (s_two + err_two), -0.25 * s_small, 0.0, 0.0, 0.0, 0.0)


def lt_bounds(m: Measure, gamma: float) -> LTBounds:
    """All Lieb-Thirring estimates applicable at exponent gamma"""
    _check_positive(gamma, "gamma")
    out = LTBounds(gamma)
    half = abs(gamma - 0.5) < 1e-15
    if m.is_zero:
        if half:
            out.lower_mass = out.upper_mass = 0.0
        return out

    small = power_integral(m, ALPHA_SMALL, gamma)
    two = power_integral(m, BETA, gamma)
    one = power_integral(m, 1.0, gamma)
    out.lower_qstar = _lt_lower_constant(gamma) * small.value
    out.upper_qstar = 4.0 ** (gamma + 1.0) * two.value
    out.errors["lower_qstar"] = _lt_lower_constant(gamma) * small.err
    out.errors["upper_qstar"] = 4.0 ** (gamma + 1.0) * two.err
    c1, c2 = _single_alpha_constants(gamma)
    out.lower_c1 = c1 * one.value
    out.upper_c2 = c2 * one.value
    out.errors["lower_c1"], out.errors["upper_c2"] = c1 * one.err, c2 * one.err

    total = m.total_mass
    if half:
        out.lower_mass = ALPHA_SMALL / 32.0 * total
        out.upper_mass = 0.5 * total

    decomp = decomposition_lt_bound(m, gamma)
    out.upper_decomp, out.decomp_by_length = decomp.by_mass, decomp.by_length
    lo, hi = support_hull(m)
    out.upper_compact = (2.0 ** (3.0 + 4.0 * gamma) * (hi - lo) * total ** (1.0 + 2.0 * gamma)
                         + 2.0 ** (4.0 * gamma + 1.0) * (1.0 + 2.0 ** (2.0 * gamma) / gamma) * total ** (2.0 * gamma))
    return out


def decomposition_lt_bound(m: Measure, gamma: float) -> DecompositionLTBound:
    """2^{2 gamma} sum mu_k(I_k)^{2 gamma} over the alpha = 2 decomposition, next to sum |I_k|^{-2 gamma}"""
    carrying = build_decomposition(m, BETA).carrying()
    by_mass = 2.0 ** (2.0 * gamma) * math.fsum(iv.mass ** (2.0 * gamma) for iv in carrying)
    by_length = math.fsum(iv.length ** (-2.0 * gamma) for iv in carrying)
    return DecompositionLTBound(gamma, by_mass, by_length)


def comb_spacing_violations(m: Measure, alpha: float) -> List[str]:
    """Neighbouring atoms closer than max(1/(alpha a_k), 1/(alpha a_{k+1}))"""
    out = []
    atoms = m.atoms
    for left, right in zip(atoms[:-1], atoms[1:]):
        need = max(1.0 / (alpha * left.mass), 1.0 / (alpha * right.mass))
        if right.position - left.position <= need:
            out.append(f"x={right.position!r} - x={left.position!r} <= max(1/(alpha a_k), 1/(alpha a_k+1)) = {need!r}")
    return out


def comb_lt_bounds(m: Measure, gamma: float) -> CombBounds:
    """Comb sandwich c1 W <= LT_gamma <= c2 W with W = sum (2 a_k)^{2 gamma}.

    With the atoms separated at alpha = 2, each atom carries a plateau of
    q*_2 worth exactly (2 a_k)^{2 gamma} and the gaps at most 1/(2 gamma) of it.
    """
    _check_positive(gamma, "gamma")
    if m.density:
        raise ParameterError("comb bounds need a purely atomic measure")
    violations = comb_spacing_violations(m, BETA)
    if violations:
        raise ParameterError(f"comb spacing hypothesis fails at alpha=2: {violations[0]}")
    weight = math.fsum((BETA * a.mass) ** (2.0 * gamma) for a in m.atoms)
    upper = 4.0 ** (gamma + 1.0) * (1.0 + 0.5 / gamma) * weight
    # q*_small >= (ALPHA_SMALL / 2)^2 q*_2
    lower = _lt_lower_constant(gamma) * (0.5 * ALPHA_SMALL) ** (1.0 + 2.0 * gamma) * weight
    return CombBounds(gamma, weight, lower, upper)


def comb_plateau_integrals(m: Measure, alpha: float, gamma: float) -> List[Tuple[float, float, float]]:
    """(x_k, integral of q*^{1/2+gamma} over the plateau around x_k, (alpha a_k)^{2 gamma})"""
    _check_positive(gamma, "gamma")
    fn = otelbaev_function(m, alpha)
    rows = []
    for atom in m.atoms:
        half = 0.5 / (alpha * atom.mass)
        value, _ = fn.integrate(-(1.0 + 2.0 * gamma), atom.position - half, atom.position + half)
        rows.append((atom.position, value, (alpha * atom.mass) ** (2.0 * gamma)))
    return rows


def counting_rows(bounds: List[CountingBounds], exact: List[Optional[int]]) -> List[Tuple]:
    """Rows (lambda, lower1, lower2, lower3_literal, lower3_variant, N_exact, upper1, upper2, upper3, upper_bracketing)"""
    return [(b.lam, b.lower1, b.lower2, b.lower3_literal, b.lower3_variant, n,
             b.upper1, b.upper2, b.upper3, b.upper_bracketing) for b, n in zip(bounds, exact)]
