"""
Covering of the line by intervals I_k = [a_k, a_{k+1}] carrying one "unit" of
mass each: mu_k(I_k) |I_k| = 1/alpha.

The sweep starts at a_0 = 0 and moves right, then repeats on the mirrored
measure to the left. An atom sitting on a breakpoint may be split between the
two neighbouring intervals. On the endpoint nearer the origin gamma is the part
of that atom left out of the interval; on the far endpoint it is the part
taken in.
"""
import logging
import math
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Tuple

from core.measure import IntervalSpec, Measure, build_measure, mass, reflect
from core.otelbaev import eval_point, positive_root
from utils.config import DecompositionConfig, config
from utils.errors import ConvergenceError, ParameterError

logger = logging.getLogger(__name__)

_RESIDUAL_REL = 1e-14


@dataclass(frozen=True)
class DecompositionInterval:
    index: int
    lo: float
    hi: float
    gamma_lo: float
    gamma_hi: float
    measure: Measure

    @property
    def length(self) -> float:
        return self.hi - self.lo

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def mass(self) -> float:
        return self.measure.total_mass

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)


@dataclass(frozen=True)
class Decomposition:
    alpha: float
    source: Measure
    intervals: Tuple[DecompositionInterval, ...]

    @property
    def points(self) -> List[float]:
        """Breakpoints with the -inf / +inf sentinels"""
        return [self.intervals[0].lo] + [iv.hi for iv in self.intervals]

    @property
    def indices(self) -> List[int]:
        return [iv.index for iv in self.intervals]

    def carrying(self) -> List[DecompositionInterval]:
        """Bounded intervals with positive mass"""
        return [iv for iv in self.intervals if iv.bounded and iv.mass > 0]


@dataclass
class CheckResult:
    name: str
    residual: float
    tolerance: float

    @property
    def passed(self) -> bool:
        return self.residual <= self.tolerance


@dataclass
class DecompositionReport:
    alpha: float
    checks: Dict[str, CheckResult] = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks.values() if not c.passed]


def _next_breakpoint(m: Measure, alpha: float, a: float, gamma: float) -> Tuple[float, float]:
    """sup{x > a: m([a, x)) - gamma <= 1/(alpha (x - a))} and the split mass at that point"""
    st = m.structure
    P, A, V = st.points, st.atom_mass, st.gap_value
    n = len(P)
    i = next((k for k in range(n) if P[k] > a), n)
    # value of m([a, x)) - gamma just right of a, and the density there
    f = m.atom_at(a) - gamma
    slope = V[i - 1] if 1 <= i <= n - 1 else 0.0
    pos = a
    while i < n:
        b = P[i]
        f_b = f + slope * (b - pos)
        if alpha * (b - a) * f_b >= 1.0:
            t0 = pos - a
            t = positive_root(alpha * slope, alpha * (f - slope * t0))
            return a + min(t, b - a), 0.0
        f_after = f_b + A[i]
        if alpha * (b - a) * f_after >= 1.0:
            split = 1.0 / (alpha * (b - a)) - f_b
            split = min(max(split, 0.0), A[i])
            return b, split
        f, pos = f_after, b
        slope = V[i] if i <= n - 2 else 0.0
        i += 1
    return a + 1.0 / (alpha * f), 0.0


def _interval_measure(m: Measure, lo: float, hi: float, gamma_lo: float, gamma_hi: float) -> Measure:
    """m restricted to [lo, hi) minus gamma_lo at lo plus gamma_hi at hi"""
    atoms = []
    for atom in m.atoms:
        if atom.position == lo:
            rest = atom.mass - gamma_lo
            if rest > 0:
                atoms.append((lo, rest))
        elif lo < atom.position < hi:
            atoms.append((atom.position, atom.mass))
    if gamma_hi > 0:
        atoms.append((hi, gamma_hi))
    density = [(max(s.left, lo), min(s.right, hi), s.value) for s in m.density if s.right > lo and s.left < hi]
    return build_measure(atoms, density)


def _sweep_right(m: Measure, alpha: float, gamma0: float, cap: int) -> List[Tuple[float, float, float, float, Measure]]:
    """(lo, hi, gamma_lo, gamma_hi, mu_k) for the intervals right of 0"""
    out = []
    a, gamma = 0.0, gamma0
    tiny = _RESIDUAL_REL * max(m.total_mass, 1e-300)
    while True:
        residual = mass(m, IntervalSpec(a, math.inf, True, False)) if math.isfinite(a) else 0.0
        if residual - gamma <= tiny:
            out.append((a, math.inf, gamma, 0.0, build_measure()))
            return out
        if len(out) >= cap:
            raise ConvergenceError(f"decomposition exceeded {cap} intervals at a={a!r}")
        b, split = _next_breakpoint(m, alpha, a, gamma)
        if split >= m.atom_at(b) * (1.0 - _RESIDUAL_REL):
            split = m.atom_at(b)
        out.append((a, b, gamma, split, _interval_measure(m, a, b, gamma, split)))
        logger.debug(f"interval [{a!r}, {b!r}] gamma_hi={split!r}")
        a, gamma = b, split


def build_decomposition(m: Measure, alpha: float, settings: Optional[DecompositionConfig] = None) -> Decomposition:
    """Cover the line by intervals of unit alpha-weighted mass, starting at 0"""
    if not (math.isfinite(alpha) and alpha > 0):
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    settings = settings or config.decomposition
    if m.is_zero:
        empty = build_measure()
        return Decomposition(alpha, m, (
            DecompositionInterval(-1, -math.inf, 0.0, 0.0, 0.0, empty),
            DecompositionInterval(0, 0.0, math.inf, 0.0, 0.0, empty),
        ))

    right = _sweep_right(m, alpha, 0.0, settings.max_intervals)
    # the atom at 0, if any, belongs wholly to the right-hand side
    mirrored = reflect(m)
    left = _sweep_right(mirrored, alpha, mirrored.atom_at(0.0), settings.max_intervals)

    intervals = []
    for k, (lo, hi, g_lo, g_hi, mu) in enumerate(reversed(left)):
        index = -len(left) + k
        intervals.append(DecompositionInterval(index, -hi, -lo, g_hi, g_lo, reflect(mu)))
    for k, (lo, hi, g_lo, g_hi, mu) in enumerate(right):
        intervals.append(DecompositionInterval(k, lo, hi, g_lo, g_hi, mu))
    logger.info(f"decomposition alpha={alpha}: {len(intervals)} intervals, "
                f"{sum(1 for iv in intervals if iv.bounded and iv.mass > 0)} carrying mass")
    return Decomposition(alpha, m, tuple(intervals))


def verify_decomposition(dec: Decomposition, settings: Optional[DecompositionConfig] = None) -> DecompositionReport:
    """Residuals of the tiling, splitting, unit-mass and midpoint properties"""
    settings = settings or config.decomposition
    report = DecompositionReport(dec.alpha)
    ivs = dec.intervals
    m = dec.source

    tiling = 0.0
    if ivs[0].lo != -math.inf or ivs[-1].hi != math.inf:
        tiling = math.inf
    for prev, nxt in zip(ivs[:-1], ivs[1:]):
        tiling = max(tiling, abs(nxt.lo - prev.hi))
    report.checks["tiling"] = CheckResult("tiling", tiling, 0.0)

    gamma_excess = 0.0
    for iv in ivs:
        for g, x in ((iv.gamma_lo, iv.lo), (iv.gamma_hi, iv.hi)):
            if math.isfinite(x):
                gamma_excess = max(gamma_excess, -g, g - m.atom_at(x))
    report.checks["gamma_bounds"] = CheckResult("gamma_bounds", max(gamma_excess, 0.0), 1e-15 * max(m.total_mass, 1.0))

    unbounded = max((iv.mass for iv in ivs if not iv.bounded), default=0.0)
    report.checks["unbounded_empty"] = CheckResult("unbounded_empty", unbounded, 0.0)

    carrying = dec.carrying()
    product = max((abs(iv.mass * iv.length - 1.0 / dec.alpha) * dec.alpha for iv in carrying), default=0.0)
    report.checks["unit_mass"] = CheckResult("unit_mass", product, settings.product_tolerance)

    midpoint = 0.0
    for iv in carrying:
        d = eval_point(m, dec.alpha, iv.midpoint).d
        midpoint = max(midpoint, abs(d - iv.length) / iv.length)
    report.checks["midpoint_width"] = CheckResult("midpoint_width", midpoint, settings.midpoint_tolerance)

    total = math.fsum(iv.mass for iv in ivs)
    conservation = abs(total - m.total_mass) / max(m.total_mass, 1.0)
    report.checks["mass_conservation"] = CheckResult("mass_conservation", conservation, 1e-12)

    additivity = 0.0
    pts = m.structure.points
    test_windows = [IntervalSpec.closed(lo, hi) for lo, hi in zip(pts[:-1], pts[1:])]
    test_windows += [IntervalSpec(iv.lo, iv.hi, False, False) for iv in carrying]
    for window in test_windows:
        split_sum = math.fsum(mass(iv.measure, window) for iv in ivs
                              if iv.hi >= window.lo and iv.lo <= window.hi)
        additivity = max(additivity, abs(split_sum - mass(m, window)) / max(m.total_mass, 1.0))
    report.checks["additivity"] = CheckResult("additivity", additivity, 1e-12)

    for check in report.failures:
        logger.warning(f"decomposition check {check.name} failed: residual {check.residual:.3g} > {check.tolerance:.3g}")
    return report


def decomposition_rows(dec: Decomposition) -> List[Tuple[int, float, float, float, float, float]]:
    """Rows (k, a_k, a_{k+1}, gamma_k, gamma_{k+1}, mu_k(I_k))"""
    return [(iv.index, iv.lo, iv.hi, iv.gamma_lo, iv.gamma_hi, iv.mass) for iv in dec.intervals]
