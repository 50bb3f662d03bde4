"""
Finite-difference cross-check of the negative spectrum.

-u'' is discretized by the three-point stencil on [lo - pad, hi + pad] with zero
boundary values. Each node takes the mass of its own cell [x - h/2, x + h/2),
divided by h, off the diagonal; an atom thus lands on its nearest node. The
error is O(h) for atoms.
"""
import logging
import math
from typing import Optional

import numpy as np
from scipy.linalg import eigh_tridiagonal

from core.measure import Measure, support_hull
from spectral.refsolver import Spectrum
from utils.config import SpectrumConfig, config
from utils.errors import ParameterError

logger = logging.getLogger(__name__)


def _cell_masses(m: Measure, edges: np.ndarray) -> np.ndarray:
    """Mass of every cell [edges[i], edges[i+1])"""
    st = m.structure
    pts = np.asarray(st.points, dtype=float)
    if len(pts) > 1:
        cum = np.concatenate(([0.0], np.cumsum(np.asarray(st.gap_value) * np.diff(pts))))
        density = np.diff(np.interp(edges, pts, cum))
    else:
        density = np.zeros(len(edges) - 1)
    atoms = np.zeros(len(edges) - 1)
    if m.atoms:
        positions = np.array([a.position for a in m.atoms])
        cells = np.searchsorted(edges, positions, side='right') - 1
        np.add.at(atoms, np.clip(cells, 0, len(atoms) - 1), [a.mass for a in m.atoms])
    return density + atoms


def _solve(m: Measure, h: float, pad: float) -> np.ndarray:
    lo, hi = support_hull(m)
    n = int(math.ceil((hi - lo + 2.0 * pad) / h)) - 1
    nodes = (lo - pad) + h * np.arange(1, n + 1)
    edges = np.concatenate((nodes - 0.5 * h, [nodes[-1] + 0.5 * h]))
    diag = 2.0 / h ** 2 - _cell_masses(m, edges) / h
    off = np.full(n - 1, -1.0 / h ** 2)
    # Gershgorin: nothing lies below min(diag) - 2/h^2
    floor = float(np.min(diag)) - 2.0 / h ** 2 - 1.0
    values = eigh_tridiagonal(diag, off, eigvals_only=True, select='v', select_range=(floor, 0.0))
    return np.sort(values[values < 0.0])


def fd_oracle(m: Measure, h: Optional[float] = None, pad: Optional[float] = None,
              check_pad: bool = True, settings: Optional[SpectrumConfig] = None) -> Spectrum:
    """Approximate negative eigenvalues from the finite-difference operator"""
    settings = settings or config.spectrum
    h = h or settings.fd_step
    pad = pad or settings.fd_pad
    if h <= 0 or pad <= 0:
        raise ParameterError(f"grid step and pad must be positive, got h={h!r}, pad={pad!r}")
    if m.is_zero:
        return Spectrum((), (), (), 0.0, method="finite-difference")

    values = _solve(m, h, pad)
    warnings = []
    if check_pad:
        doubled = _solve(m, h, 2.0 * pad)
        if len(doubled) != len(values):
            warnings.append(f"pad {pad} too small: {len(values)} eigenvalues, {len(doubled)} with pad {2 * pad}")
        elif len(values) and np.max(np.abs(doubled - values)) > h:
            shift = float(np.max(np.abs(doubled - values)))
            warnings.append(f"pad {pad} too small: eigenvalues move by {shift:.3g} when it is doubled")
    for w in warnings:
        logger.warning(w)

    kappas = tuple(float(math.sqrt(-v)) for v in values)
    errors = tuple(float(h * math.sqrt(-v)) for v in values)
    k_max = max(kappas) if kappas else 0.0
    logger.debug(f"finite differences h={h}, pad={pad}: {len(values)} eigenvalue(s)")
    return Spectrum(tuple(float(v) for v in values), kappas, errors, k_max,
                    method="finite-difference", warnings=tuple(warnings))

