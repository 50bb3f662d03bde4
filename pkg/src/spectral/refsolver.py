"""
Reference negative spectrum of H = -d^2/dx^2 - m.

A solution decaying to the left of the support is propagated across the support
in closed form (hyperbolic, linear or trigonometric between structural points,
u' jumps by -a u at an atom of mass a). -kappa^2 is an eigenvalue iff the
solution also decays to the right, i.e. W(kappa) = u' + kappa u vanishes at the
right edge. The number of zeros of that solution on the line equals the number
of eigenvalues below -kappa^2.
"""
import logging
import math
from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np
from scipy.optimize import brentq

from core.measure import Measure
from core.otelbaev import sup_norm
from utils.config import SpectrumConfig, config
from utils.errors import BoundaryAmbiguousError, CrossCheckError, ParameterError

logger = logging.getLogger(__name__)

_MAX_BRACKET_STEPS = 400


@dataclass(frozen=True)
class SecularTrace:
    kappa: float
    u: float
    du: float
    zeros: int
    value: float


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: Tuple[float, ...]
    kappas: Tuple[float, ...]
    errors: Tuple[float, ...]
    kappa_max: float
    method: str = "transfer"
    warnings: Tuple[str, ...] = ()

    @property
    def count(self) -> int:
        return len(self.eigenvalues)

    def below(self, lam: float) -> int:
        """Number of eigenvalues strictly below -lam"""
        return sum(1 for ev in self.eigenvalues if ev < -lam)


def _hyperbolic(u: float, du: float, omega: float, length: float) -> Tuple[float, float, int]:
    # e^{-omega L} times the propagated pair; the positive factor is dropped
    e2 = math.exp(-2.0 * omega * length)
    c, s = 0.5 * (1.0 + e2), 0.5 * (1.0 - e2)
    zeros = 0
    if du != 0.0 and u != 0.0:
        z = -u * omega / du
        if 0.0 < z <= s / c:
            zeros = 1
    return u * c + du / omega * s, u * omega * s + du * c, zeros


def _linear(u: float, du: float, length: float) -> Tuple[float, float, int]:
    zeros = 0
    if du != 0.0 and u != 0.0:
        t = -u / du
        if 0.0 < t <= length:
            zeros = 1
    return u + du * length, du, zeros


def _trigonometric(u: float, du: float, theta: float, length: float) -> Tuple[float, float, int]:
    phi = math.atan2(du / theta, u)
    # zeros of cos(theta t - phi) for t in (0, L]
    a = (-phi - 0.5 * math.pi) / math.pi
    b = (theta * length - phi - 0.5 * math.pi) / math.pi
    zeros = math.floor(b) - math.floor(a)
    c, s = math.cos(theta * length), math.sin(theta * length)
    return u * c + du / theta * s, -u * theta * s + du * c, zeros


def _step(u: float, du: float, kappa: float, v: float, length: float) -> Tuple[float, float, int]:
    """Solve u'' = (kappa^2 - v) u over one constant-density stretch"""
    w2 = kappa * kappa - v
    if w2 > 0:
        return _hyperbolic(u, du, math.sqrt(w2), length)
    if w2 < 0:
        return _trigonometric(u, du, math.sqrt(-w2), length)
    return _linear(u, du, length)


def _normalize(u: float, du: float) -> Tuple[float, float]:
    scale = max(abs(u), abs(du))
    return u / scale, du / scale


def secular(m: Measure, kappa: float) -> SecularTrace:
    """Propagate the left-decaying solution at energy -kappa^2 across the support"""
    if not (math.isfinite(kappa) and kappa >= 0):
        raise ParameterError(f"kappa must be non-negative, got {kappa!r}")
    st = m.structure
    P, A, V = st.points, st.atom_mass, st.gap_value
    u, du = 1.0, kappa
    zeros = 0
    for i in range(len(P)):
        du -= A[i] * u
        if i + 1 < len(P):
            u, du, z = _step(u, du, kappa, V[i], P[i + 1] - P[i])
            zeros += z
        u, du = _normalize(u, du) if (u or du) else (u, du)
    w = du + kappa * u
    # one more zero on the free right half-line iff u and W disagree in sign
    if u * w < 0:
        zeros += 1
    return SecularTrace(kappa, u, du, zeros, w)


def kappa_bound(m: Measure, settings: Optional[SpectrumConfig] = None) -> float:
    """Scan limit 2 sqrt(sup q*_2) with margin; every eigenvalue is >= -4 sup q*_2"""
    settings = settings or config.spectrum
    q_sup, q_err = sup_norm(m, 2.0)
    return 2.0 * math.sqrt(q_sup + q_err) * settings.kappa_margin + settings.kappa_abs_margin


def negative_spectrum(m: Measure, tol: Optional[float] = None,
                      settings: Optional[SpectrumConfig] = None) -> Spectrum:
    """All negative eigenvalues, bracketed by zero counting and polished on the secular function"""
    settings = settings or config.spectrum
    tol = tol or settings.tolerance
    if tol <= 0:
        raise ParameterError(f"tolerance must be positive, got {tol!r}")
    if m.is_zero:
        return Spectrum((), (), (), 0.0)

    k_max = kappa_bound(m, settings)
    top = secular(m, k_max)
    if top.zeros != 0:
        raise CrossCheckError(f"{top.zeros} eigenvalue(s) below the ground-state bound -{k_max ** 2!r}")
    total = secular(m, 0.0).zeros
    logger.debug(f"spectrum scan on (0, {k_max!r}]: {total} eigenvalue(s)")

    kappas: List[float] = []
    errors: List[float] = []
    hi_prev = k_max
    for nu in range(1, total + 1):
        # kappa_nu = sup{kappa: zeros(kappa) >= nu}; shrink until the bracket holds it alone
        lo, hi = 0.0, hi_prev
        z_lo, z_hi = total, secular(m, hi).zeros
        for _ in range(_MAX_BRACKET_STEPS):
            if hi - lo <= max(tol, 1e-3 * hi) and z_lo == nu and z_hi == nu - 1:
                break
            mid = 0.5 * (lo + hi)
            z_mid = secular(m, mid).zeros
            if z_mid >= nu:
                lo, z_lo = mid, z_mid
            else:
                hi, z_hi = mid, z_mid
        else:
            raise CrossCheckError(f"could not isolate eigenvalue {nu} in [{lo!r}, {hi!r}]")
        w_lo, w_hi = secular(m, lo).value, secular(m, hi).value
        if w_lo * w_hi > 0:
            raise CrossCheckError(
                f"secular function has no sign change on [{lo!r}, {hi!r}] bracketing eigenvalue {nu}")
        if hi - lo <= tol:
            kappa = 0.5 * (lo + hi)
        else:
            kappa = brentq(lambda k: secular(m, k).value, lo, hi, xtol=tol,
                           rtol=4 * np.finfo(float).eps, maxiter=200)
        kappas.append(kappa)
        errors.append(2.0 * kappa * tol + tol * tol)
        hi_prev = kappa

    eigenvalues = tuple(-k * k for k in kappas)
    for a, b in zip(eigenvalues[:-1], eigenvalues[1:]):
        if b <= a:
            raise CrossCheckError(f"eigenvalues out of order or merged: {a!r}, {b!r}")
    return Spectrum(eigenvalues, tuple(kappas), tuple(errors), k_max)


def counting_exact(m: Measure, lam: float, spectrum: Optional[Spectrum] = None) -> int:
    """N(-lam): eigenvalues strictly below -lam, by the spectrum and by zero counting"""
    if not (math.isfinite(lam) and lam > 0):
        raise ParameterError(f"lambda must be positive, got {lam!r}")
    if m.is_zero:
        return 0
    spectrum = spectrum or negative_spectrum(m)
    for ev, err in zip(spectrum.eigenvalues, spectrum.errors):
        if abs(ev + lam) <= err + 4e-16 * lam:
            raise BoundaryAmbiguousError(f"lambda={lam!r} coincides with eigenvalue {ev!r}", ev)
    from_spectrum = spectrum.below(lam)
    from_zeros = secular(m, math.sqrt(lam)).zeros
    if from_spectrum != from_zeros:
        raise CrossCheckError(f"N(-{lam!r}): spectrum gives {from_spectrum}, zero count gives {from_zeros}")
    return from_spectrum


def lt_sum_exact(m: Measure, gamma: float, spectrum: Optional[Spectrum] = None,
                 settings: Optional[SpectrumConfig] = None) -> float:
    """Sum of |lambda|^gamma, checked against gamma * int s^(gamma-1) N(-s) ds"""
    if not (math.isfinite(gamma) and gamma > 0):
        raise ParameterError(f"gamma must be positive, got {gamma!r}")
    settings = settings or config.spectrum
    if m.is_zero:
        return 0.0
    spectrum = spectrum or negative_spectrum(m, settings=settings)
    direct = math.fsum(abs(ev) ** gamma for ev in spectrum.eigenvalues)

    # N(-s) is constant between consecutive |lambda|; sample it by zero counting
    levels = sorted(abs(ev) for ev in spectrum.eigenvalues)
    edges = [0.0] + levels
    pieces = []
    for s0, s1 in zip(edges[:-1], edges[1:]):
        if s1 <= s0:
            continue
        n = secular(m, math.sqrt(0.5 * (s0 + s1))).zeros
        pieces.append(n * (s1 ** gamma - s0 ** gamma))
    identity = math.fsum(pieces)
    if abs(identity - direct) > settings.lt_identity_rel_tolerance * max(direct, 1e-300):
        raise CrossCheckError(f"LT_{gamma}: eigenvalue sum {direct!r} vs counting integral {identity!r}")
    return direct


def spectrum_rows(spectrum: Spectrum) -> List[Tuple[int, float, float, float]]:
    """Rows (nu, lambda, kappa, err)"""
    return [(nu, ev, k, err) for nu, (ev, k, err) in
            enumerate(zip(spectrum.eigenvalues, spectrum.kappas, spectrum.errors), start=1)]
