"""
Otelbaev's averaged function of a measure.

For a measure m and alpha > 0, d_alpha(x) is the width of the smallest closed
window centered at x whose mass reaches 1/(alpha d), and q*_alpha(x) = 1/d_alpha(x)^2.

The window mass g(d) is piecewise linear in d for the measures handled here, so
d_alpha(x) is obtained exactly by sweeping the window outwards over the
structural points. Along x the sweep visits the same points in the same way on
whole stretches ("regimes"), and inside a regime d_alpha has a closed form.
OtelbaevFunction partitions the line into such regimes once per (measure, alpha)
and answers sublevel, sup-norm and integral queries from that profile.
"""
import logging
import math
import threading
from bisect import bisect_left
from dataclasses import dataclass
from functools import lru_cache
from typing import Dict, List, Optional, Tuple

import numpy as np
from scipy.optimize import bisect, brentq

from core.measure import IntervalSpec, Measure, mass, support_hull
from utils.config import OtelbaevConfig, config
from utils.errors import CrossCheckError, ParameterError

logger = logging.getLogger(__name__)

_HIT, _ROOT = 0, 1
_SLIVER_REL = 1e-11
_KEY_OFFSET = 1e-6
_QUAD_REL = 1e-13


@dataclass(frozen=True)
class OtelbaevPoint:
    x: float
    alpha: float
    d: float
    q: float
    err: float = 0.0


@dataclass(frozen=True)
class SublevelSet:
    alpha: float
    lam: float
    components: Tuple[Tuple[float, float], ...]
    total_length: float
    err: float

    @property
    def is_empty(self) -> bool:
        return not self.components


@dataclass(frozen=True)
class PowerIntegral:
    alpha: float
    gamma: float
    exponent: float
    value: float
    err: float
    window: Tuple[float, float]
    tail: float


@dataclass(frozen=True)
class EnvelopeCell:
    lo: float
    hi: float
    q_lower: float
    q_upper: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)


def positive_root(a: float, b: float) -> float:
    """Positive root of a r^2 + b r - 1 = 0 without cancellation"""
    disc = math.sqrt(b * b + 4.0 * a)
    if b >= 0:
        return 2.0 / (b + disc)
    return (disc - b) / (2.0 * a)


def _closed_form(par, x, alpha: float):
    """d_alpha inside one regime; par rows are (kind, s, c, v_left, p_left, v_right, p_right)"""
    kind, s, c = par[..., 0], par[..., 1], par[..., 2]
    with np.errstate(divide='ignore', invalid='ignore', over='ignore'):
        d_hit = 2.0 * s * (x - c)
        k = c + par[..., 3] * (par[..., 4] - x) + par[..., 5] * (x - par[..., 6])
        a = 2.0 * alpha * s
        b = 2.0 * alpha * k
        disc = np.sqrt(b * b + 4.0 * a)
        r = np.where(b >= 0, 2.0 / (b + disc), (disc - b) / (2.0 * a))
        return np.where(kind == _HIT, d_hit, 2.0 * r)


class OtelbaevFunction:
    """Exact evaluator of d_alpha / q*_alpha for one measure and one alpha"""

    def __init__(self, measure: Measure, alpha: float, settings: Optional[OtelbaevConfig] = None):
        if not (isinstance(alpha, (int, float)) and math.isfinite(alpha) and alpha > 0):
            raise ParameterError(f"alpha must be a positive finite number, got {alpha!r}")
        self.measure = measure
        self.alpha = float(alpha)
        self.settings = settings or config.otelbaev
        self._lock = threading.RLock()

        st = measure.structure
        self._points = list(st.points)
        self._atoms = list(st.atom_mass)
        self._gaps = list(st.gap_value)
        self._hull = support_hull(measure)

        self._key_ids: Dict[tuple, int] = {}
        self._key_params: List[np.ndarray] = []
        self._node_d: Dict[float, float] = {}
        self._cells: List[Tuple[float, float, float, float, int]] = []
        self._cover: Optional[Tuple[float, float]] = None
        self._arr: Optional[Dict[str, np.ndarray]] = None
        self._cell_integrals: Dict[float, Tuple[np.ndarray, np.ndarray]] = {}
        self._gl = np.polynomial.legendre.leggauss(self.settings.quadrature_nodes)

        if self._hull is not None:
            lo, hi = self._hull
            self.d_floor = 1.0 / (self.alpha * measure.total_mass)
            self.scale = max(hi - lo, self.d_floor)
            self._sliver = _SLIVER_REL * self.scale
            self._outer_step = self.d_floor / 8.0

    @property
    def is_zero(self) -> bool:
        return self._hull is None

    # pointwise evaluation

    def _sweep(self, x: float) -> Tuple[float, tuple]:
        """Grow the window around x until its mass reaches 1/(alpha d); returns (d, regime key)"""
        P, A, V = self._points, self._atoms, self._gaps
        n = len(P)
        two_alpha = 2.0 * self.alpha
        j = bisect_left(P, x)
        if j < n and P[j] == x:
            g = A[j]
            left, right = j - 1, j + 1
        else:
            g = 0.0
            left, right = j - 1, j
        v_left = V[left] if 0 <= left <= n - 2 else 0.0
        v_right = V[right - 1] if 1 <= right <= n - 1 else 0.0
        r = 0.0
        while True:
            dist_left = x - P[left] if left >= 0 else math.inf
            dist_right = P[right] - x if right < n else math.inf
            r_next = min(dist_left, dist_right)
            slope = v_left + v_right
            if r_next == math.inf:
                return 1.0 / (self.alpha * g), (_ROOT, left, right)
            g_next = g + slope * (r_next - r)
            if two_alpha * r_next * g_next >= 1.0:
                root = positive_root(two_alpha * slope, two_alpha * (g - slope * r))
                return 2.0 * min(root, r_next), (_ROOT, left, right)
            g, r = g_next, r_next
            key = None
            if dist_left == r_next:
                g += A[left]
                key = (_HIT, left, 1)
                left -= 1
                v_left = V[left] if left >= 0 else 0.0
            if dist_right == r_next:
                g += A[right]
                key = (_HIT, right, -1)
                right += 1
                v_right = V[right - 1] if right <= n - 1 else 0.0
            if two_alpha * r * g >= 1.0:
                return 2.0 * r, key

    def d(self, x: float) -> float:
        if self.is_zero:
            return math.inf
        return self._sweep(float(x))[0]

    def point(self, x: float) -> OtelbaevPoint:
        x = float(x)
        if self.is_zero:
            return OtelbaevPoint(x, self.alpha, math.inf, 0.0, 0.0)
        d = self._sweep(x)[0]
        return OtelbaevPoint(x, self.alpha, d, 1.0 / (d * d), 0.0)

    def _d_node(self, x: float) -> float:
        d = self._node_d.get(x)
        if d is None:
            d = self._node_d[x] = self._sweep(x)[0]
        return d

    def _params(self, key: tuple) -> np.ndarray:
        # window mass inside a regime: c + v_left (p_left - x + r) + v_right (x + r - p_right)
        P, A, V = self._points, self._atoms, self._gaps
        n = len(P)
        if key[0] == _HIT:
            _, j, side = key
            return np.array([_HIT, float(side), P[j], 0.0, 0.0, 0.0, 0.0])
        _, left, right = key
        v_left = V[left] if 0 <= left <= n - 2 else 0.0
        v_right = V[right - 1] if 1 <= right <= n - 1 else 0.0
        if left + 1 <= right - 1:
            p_lo, p_hi = P[left + 1], P[right - 1]
            inner = math.fsum(A[left + 1:right]
                              + [V[i] * (P[i + 1] - P[i]) for i in range(left + 1, right - 1)])
        else:
            p_lo = p_hi = 0.0
            inner = 0.0
        return np.array([_ROOT, v_left + v_right, inner, v_left, p_lo, v_right, p_hi])

    def _key_id(self, key: tuple) -> int:
        kid = self._key_ids.get(key)
        if kid is None:
            kid = self._key_ids[key] = len(self._key_params)
            self._key_params.append(self._params(key))
        return kid

    def _closed_scalar(self, kid: int, x: float) -> float:
        return float(_closed_form(self._key_params[kid], x, self.alpha))

    # profile

    def _homogeneous(self, lo: float, hi: float) -> Optional[int]:
        w = hi - lo
        keys = [self._sweep(lo + w * t)[1] for t in (_KEY_OFFSET, 0.5, 1.0 - _KEY_OFFSET)]
        if keys[0] != keys[1] or keys[1] != keys[2]:
            return None
        kid = self._key_id(keys[1])
        for x in (lo, hi):
            exact = self._d_node(x)
            if abs(self._closed_scalar(kid, x) - exact) > 1e-12 * exact:
                return None
        return kid

    def _cells_between(self, nodes: List[float]) -> List[Tuple[float, float, float, float, int]]:
        out = []
        for a, b in zip(nodes[:-1], nodes[1:]):
            if b <= a:
                continue
            stack = [(a, b, 0)]
            while stack:
                lo, hi, depth = stack.pop()
                kid = self._homogeneous(lo, hi)
                if kid is None and hi - lo > self._sliver and depth < 4 * self.settings.max_refinement_depth:
                    mid = 0.5 * (lo + hi)
                    stack.append((mid, hi, depth + 1))
                    stack.append((lo, mid, depth + 1))
                    continue
                out.append((lo, hi, self._d_node(lo), self._d_node(hi), -1 if kid is None else kid))
        return out

    def _outer_nodes(self, start: float, target: float) -> List[float]:
        t, nodes = start, [start]
        while t < target:
            t = t + max(self._outer_step, 0.25 * t)
            nodes.append(t)
        return nodes

    def ensure(self, lo: float, hi: float):
        """Extend the profile so that it covers [lo, hi]"""
        if self.is_zero:
            return
        with self._lock:
            h_lo, h_hi = self._hull
            if self._cover is None:
                nodes = set(self._points)
                if h_hi > h_lo:
                    nodes.update(np.linspace(h_lo, h_hi, self.settings.profile_cells + 1).tolist())
                self._cells = self._cells_between(sorted(nodes))
                self._cover = (h_lo, h_hi)
                self._invalidate()
            c_lo, c_hi = self._cover
            if lo < c_lo:
                ts = self._outer_nodes(h_lo - c_lo, h_lo - lo)
                nodes = sorted(h_lo - t for t in ts[1:]) + [c_lo]
                self._cells = self._cells_between(nodes) + self._cells
                self._cover = (nodes[0], self._cover[1])
                self._invalidate()
            if hi > c_hi:
                ts = self._outer_nodes(c_hi - h_hi, hi - h_hi)
                nodes = [c_hi] + [h_hi + t for t in ts[1:]]
                self._cells = self._cells + self._cells_between(nodes)
                self._cover = (self._cover[0], nodes[-1])
                self._invalidate()
            logger.debug(f"profile alpha={self.alpha} covers {self._cover} with {len(self._cells)} cells")

    def _invalidate(self):
        self._arr = None
        self._cell_integrals.clear()

    def _arrays(self) -> Dict[str, np.ndarray]:
        with self._lock:
            if self._arr is None:
                cells = np.array(self._cells, dtype=float).reshape(-1, 5)
                kid = cells[:, 4].astype(int)
                blank = np.zeros(7)
                params = np.array([self._key_params[k] if k >= 0 else blank for k in kid],
                                  dtype=float).reshape(-1, 7)
                self._arr = {
                    "a": cells[:, 0], "b": cells[:, 1], "da": cells[:, 2], "db": cells[:, 3],
                    "kid": kid, "hom": kid >= 0, "par": params,
                }
            return self._arr

    def profile_cells(self, lo: float, hi: float) -> List[Tuple[float, float, float, float, bool]]:
        """(a, b, d(a), d(b), homogeneous) for the cells meeting [lo, hi]"""
        self.ensure(lo, hi)
        arr = self._arrays()
        sel = (arr["b"] > lo) & (arr["a"] < hi)
        return [(float(a), float(b), float(da), float(db), bool(h)) for a, b, da, db, h in
                zip(arr["a"][sel], arr["b"][sel], arr["da"][sel], arr["db"][sel], arr["hom"][sel])]

    # quadrature

    def _gauss(self, par: np.ndarray, lo, hi, e: float) -> Tuple[np.ndarray, np.ndarray]:
        """Adaptive Gauss-Legendre of d^e on many cells at once; returns values and error estimates"""
        nodes, weights = self._gl
        a, b = np.asarray(lo, dtype=float), np.asarray(hi, dtype=float)
        total = np.zeros(len(a))
        err = np.zeros(len(a))
        owner = np.arange(len(a))

        def quad(lo_, hi_, par_):
            half = 0.5 * (hi_ - lo_)
            x = (0.5 * (lo_ + hi_))[:, None] + half[:, None] * nodes[None, :]
            f = _closed_form(par_[:, None, :], x, self.alpha) ** e
            return half * (f @ weights)

        for _ in range(self.settings.max_refinement_depth):
            if len(a) == 0:
                break
            mid = 0.5 * (a + b)
            whole = quad(a, b, par)
            halves = quad(a, mid, par) + quad(mid, b, par)
            diff = np.abs(whole - halves)
            ok = diff <= _QUAD_REL * np.abs(halves) + 1e-300
            np.add.at(total, owner[ok], halves[ok])
            np.add.at(err, owner[ok], diff[ok])
            bad = ~ok
            a, b, mid, owner, par = a[bad], b[bad], mid[bad], owner[bad], par[bad]
            a, b = np.concatenate((a, mid)), np.concatenate((mid, b))
            owner = np.concatenate((owner, owner))
            par = np.concatenate((par, par))
        if len(a):
            # depth exhausted: keep the last estimate and charge its whole size to the error
            rest = quad(a, b, par)
            np.add.at(total, owner, rest)
            np.add.at(err, owner, np.abs(rest))
        return total, err

    def _full_cell_integrals(self, e: float) -> Tuple[np.ndarray, np.ndarray]:
        with self._lock:
            cached = self._cell_integrals.get(e)
            if cached is None:
                arr = self._arrays()
                hom = arr["hom"]
                vals = np.zeros(len(hom))
                errs = np.zeros(len(hom))
                v, er = self._gauss(arr["par"][hom], arr["a"][hom], arr["b"][hom], e)
                vals[hom], errs[hom] = v, er
                cached = self._cell_integrals[e] = (vals, errs)
            return cached

    def _crossing(self, kid: int, lo: float, hi: float, level: float) -> float:
        f_lo = self._closed_scalar(kid, lo) - level
        f_hi = self._closed_scalar(kid, hi) - level
        if f_lo == 0.0:
            return lo
        if f_hi == 0.0 or f_lo * f_hi > 0:
            return hi if abs(f_hi) <= abs(f_lo) else lo
        return brentq(lambda x: self._closed_scalar(kid, x) - level, lo, hi,
                      xtol=1e-15 * self.scale, rtol=4 * np.finfo(float).eps)

    def integrate(self, e: float, lo: float, hi: float, d_max: float = math.inf) -> Tuple[float, float]:
        """Integral of d_alpha^e over {x in [lo, hi]: d_alpha(x) <= d_max} with an error estimate"""
        if self.is_zero:
            return 0.0, 0.0
        self.ensure(lo, hi)
        with self._lock:
            arr = self._arrays()
            vals, errs = self._full_cell_integrals(e)
        a, b, da, db, hom = arr["a"], arr["b"], arr["da"], arr["db"], arr["hom"]
        sel = (b > lo) & (a < hi) & (np.minimum(da, db) <= d_max)
        fully = sel & hom & (a >= lo) & (b <= hi) & (np.maximum(da, db) <= d_max)
        parts = [float(np.sum(vals[fully]))]
        err = float(np.sum(errs[fully]))
        for i in np.nonzero(sel & ~fully)[0]:
            a_i, b_i = max(a[i], lo), min(b[i], hi)
            if b_i <= a_i:
                continue
            if not hom[i]:
                w = b[i] - a[i]
                mid_d = 0.5 * (da[i] + db[i])
                d_lo = max(mid_d - w, self.d_floor)
                d_hi = mid_d + w
                parts.append((b_i - a_i) * (0.5 * (da[i] + db[i])) ** e)
                err += (b_i - a_i) * max(d_lo ** e, d_hi ** e)
                continue
            kid = int(arr["kid"][i])
            d_a, d_b = self._closed_scalar(kid, a_i), self._closed_scalar(kid, b_i)
            if min(d_a, d_b) > d_max:
                continue
            if max(d_a, d_b) > d_max:
                x_c = self._crossing(kid, a_i, b_i, d_max)
                a_i, b_i = (a_i, x_c) if d_a <= d_max else (x_c, b_i)
                if b_i <= a_i:
                    continue
            v, er = self._gauss(arr["par"][i:i + 1], np.array([a_i]), np.array([b_i]), e)
            parts.append(float(v[0]))
            err += float(er[0])
        return math.fsum(parts), err

    # queries

    def sublevel(self, lam: float) -> SublevelSet:
        if not (math.isfinite(lam) and lam > 0):
            raise ParameterError(f"sublevel threshold must be positive, got {lam!r}")
        if self.is_zero:
            return SublevelSet(self.alpha, lam, (), 0.0, 0.0)
        d_max = 1.0 / math.sqrt(lam)
        h_lo, h_hi = self._hull
        self.ensure(h_lo - 0.5 * d_max, h_hi + 0.5 * d_max)
        arr = self._arrays()
        a, b, da, db, hom = arr["a"], arr["b"], arr["da"], arr["db"], arr["hom"]
        d_near, d_far = np.minimum(da, db), np.maximum(da, db)
        touched = d_near <= d_max
        whole = touched & (~hom | (d_far <= d_max))
        fuzzy = whole & ~hom & (0.5 * (da + db) + (b - a) > d_max)
        err = float(np.sum((b - a)[fuzzy]))
        lo, hi = list(a[whole]), list(b[whole])
        for i in np.nonzero(touched & ~whole)[0]:
            x_c = self._crossing(int(arr["kid"][i]), float(a[i]), float(b[i]), d_max)
            err += 2e-15 * self.scale
            if da[i] <= d_max:
                lo.append(float(a[i]))
                hi.append(x_c)
            else:
                lo.append(x_c)
                hi.append(float(b[i]))
        if not lo:
            return SublevelSet(self.alpha, lam, (), 0.0, 0.0)
        lo, hi = np.array(lo), np.array(hi)
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        # cells tile the line, so pieces either touch or leave a gap
        starts = np.concatenate(([True], lo[1:] > np.maximum.accumulate(hi)[:-1]))
        first = np.nonzero(starts)[0]
        last = np.concatenate((first[1:] - 1, [len(lo) - 1]))
        tops = np.maximum.accumulate(hi)
        comps = tuple((float(lo[s]), float(tops[e])) for s, e in zip(first, last) if tops[e] > lo[s])
        length = math.fsum((hi - lo).tolist())
        if err > self.settings.sublevel_tolerance:
            logger.warning(f"sublevel length error {err:.3g} above tolerance at lambda={lam}")
        return SublevelSet(self.alpha, lam, comps, length, err)

    def sup_norm(self) -> Tuple[float, float]:
        if self.is_zero:
            return 0.0, 0.0
        h_lo, h_hi = self._hull
        self.ensure(h_lo, h_hi)
        candidates = [self._d_node(p) for p in self._points]
        err_d = 0.0
        for a, b, da, db, hom in self.profile_cells(h_lo, h_hi):
            candidates.extend((da, db))
            if not hom:
                err_d = max(err_d, min(da, db) - max(0.5 * (da + db) - (b - a), self.d_floor))
        d_min = min(candidates)
        q = 1.0 / (d_min * d_min)
        err = 0.0 if err_d <= 0 else 1.0 / max(d_min - err_d, self.d_floor) ** 2 - q
        return q, err

    def _tail(self, right_side: bool, e: float) -> Tuple[float, float]:
        """Start and exact integral of d^e on the tail beyond one hull edge"""
        P, A, V = self._points, self._atoms, self._gaps
        atom = A[-1] if right_side else A[0]
        if atom > 0:
            t0 = 1.0 / (2.0 * self.alpha * atom)
            return t0, 2.0 ** e * t0 ** (e + 1.0) / (-(e + 1.0))
        v = V[-1] if right_side else V[0]
        ell = (P[-1] - P[-2]) if right_side else (P[1] - P[0])
        c = 2.0 / (self.alpha * v)
        t0 = max(0.0, (c - 4.0 * ell * ell) / (4.0 * ell))
        u0 = math.asinh(t0 / math.sqrt(c))
        tail = 0.5 * c ** (0.5 * (e + 1.0)) * (math.exp((e + 1.0) * u0) / (-(e + 1.0))
                                             + math.exp((e - 1.0) * u0) / (1.0 - e))
        return t0, tail

    def power_integral(self, gamma: float) -> PowerIntegral:
        if not (math.isfinite(gamma) and gamma > 0):
            raise ParameterError(f"gamma must be positive, got {gamma!r}")
        p = 0.5 + gamma
        if self.is_zero:
            return PowerIntegral(self.alpha, gamma, p, 0.0, 0.0, (0.0, 0.0), 0.0)
        e = -2.0 * p
        h_lo, h_hi = self._hull
        t_left, tail_left = self._tail(False, e)
        t_right, tail_right = self._tail(True, e)
        lo, hi = h_lo - t_left, h_hi + t_right
        inner, err = self.integrate(e, lo, hi)
        value = inner + tail_left + tail_right
        err += 4 * np.finfo(float).eps * value
        if err > self.settings.integral_rel_tolerance * value:
            logger.warning(f"power integral error {err:.3g} above tolerance for gamma={gamma}")
        return PowerIntegral(self.alpha, gamma, p, value, err, (lo, hi), tail_left + tail_right)

    def envelope(self, lo: float, hi: float, max_cell: float) -> List[EnvelopeCell]:
        if not (max_cell > 0 and hi > lo):
            raise ParameterError(f"envelope needs hi > lo and max_cell > 0, got [{lo}, {hi}] / {max_cell}")
        count = max(1, math.ceil((hi - lo) / max_cell))
        xs = np.linspace(lo, hi, count + 1)
        if self.is_zero:
            return [EnvelopeCell(float(a), float(b), 0.0, 0.0) for a, b in zip(xs[:-1], xs[1:])]
        ds = [self._sweep(float(x))[0] for x in xs]
        cells = []
        for a, b, da, db in zip(xs[:-1], xs[1:], ds[:-1], ds[1:]):
            w = float(b - a)
            d_lo = max(0.5 * (da + db) - w, self.d_floor)
            d_hi = 0.5 * (da + db) + w
            cells.append(EnvelopeCell(float(a), float(b), 1.0 / (d_hi * d_hi), 1.0 / (d_lo * d_lo)))
        return cells


@lru_cache(maxsize=128)
def otelbaev_function(m: Measure, alpha: float) -> OtelbaevFunction:
    return OtelbaevFunction(m, float(alpha))


def eval_point(m: Measure, alpha: float, x: float) -> OtelbaevPoint:
    return otelbaev_function(m, alpha).point(x)


def bisect_point(m: Measure, alpha: float, x: float, strict: bool = True,
                 rel_tol: Optional[float] = None) -> OtelbaevPoint:
    """d_alpha(x) by bisection on the defining inequality.

    strict=True uses sup{d: m(window) < 1/(alpha d)}, strict=False the
    non-strict form sup{d: m(window) <= 1/(alpha d)}; both equal d_alpha(x).
    """
    if alpha <= 0:
        raise ParameterError(f"alpha must be positive, got {alpha!r}")
    if m.is_zero:
        return OtelbaevPoint(x, alpha, math.inf, 0.0, 0.0)
    rel_tol = rel_tol or config.otelbaev.bisection_rel_tolerance

    def below(d: float) -> bool:
        product = alpha * d * mass(m, IntervalSpec.window(x, d))
        return product < 1.0 if strict else product <= 1.0

    lo = 0.5 / (alpha * m.total_mass)
    hi = 2.0 / (alpha * m.total_mass)
    while below(hi):
        lo, hi = hi, 2.0 * hi
    d = bisect(lambda t: -1.0 if below(t) else 1.0, lo, hi, xtol=1e-300, rtol=rel_tol, maxiter=400)
    return OtelbaevPoint(x, alpha, d, 1.0 / (d * d), 2.0 * rel_tol * d)


def cross_check_point(m: Measure, alpha: float, x: float, rel_tol: float = 1e-10) -> OtelbaevPoint:
    """Exact value, confirmed by both bisection forms"""
    exact = eval_point(m, alpha, x)
    if m.is_zero:
        return exact
    for strict in (True, False):
        oracle = bisect_point(m, alpha, x, strict=strict)
        if abs(oracle.d - exact.d) > rel_tol * exact.d + oracle.err:
            raise CrossCheckError(
                f"d_alpha({x}) = {exact.d!r} disagrees with bisection ({'strict' if strict else 'non-strict'}) "
                f"{oracle.d!r} at alpha={alpha}")
    return exact


def envelope(m: Measure, alpha: float, window: Tuple[float, float], max_cell: float) -> List[EnvelopeCell]:
    return otelbaev_function(m, alpha).envelope(window[0], window[1], max_cell)


def sublevel_measure(m: Measure, alpha: float, lam: float) -> SublevelSet:
    return otelbaev_function(m, alpha).sublevel(lam)


def sup_norm(m: Measure, alpha: float) -> Tuple[float, float]:
    return otelbaev_function(m, alpha).sup_norm()


def power_integral(m: Measure, alpha: float, gamma: float) -> PowerIntegral:
    return otelbaev_function(m, alpha).power_integral(gamma)


def sublevel_integral(m: Measure, alpha: float, e: float, lam: float) -> Tuple[float, float]:
    """Integral of d_alpha^e over the sublevel set {q*_alpha >= lam}"""
    fn = otelbaev_function(m, alpha)
    if fn.is_zero:
        return 0.0, 0.0
    d_max = 1.0 / math.sqrt(lam)
    h_lo, h_hi = support_hull(m)
    return fn.integrate(e, h_lo - 0.5 * d_max, h_hi + 0.5 * d_max, d_max)


def profile_rows(m: Measure, alpha: float, x0: float, x1: float, step: float) -> List[Tuple[float, float, float]]:
    """Rows (x, d, q) on the grid x0, x0+step, ... <= x1"""
    if step <= 0 or x1 < x0:
        raise ParameterError(f"need step > 0 and x1 >= x0, got step={step!r}, [{x0}, {x1}]")
    fn = otelbaev_function(m, alpha)
    count = int(math.floor((x1 - x0) / step + 1e-9))
    rows = []
    for k in range(count + 1):
        pt = fn.point(x0 + k * step)
        rows.append((pt.x, pt.d, pt.q))
    return rows


