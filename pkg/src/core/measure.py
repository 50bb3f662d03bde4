"""
Non-negative Radon measures on the line made of finitely many atoms and a
compactly supported piecewise-constant density.

Every interval-mass query is exact up to floating-point rounding, since the
cumulative function is piecewise linear with jumps at the atoms.
"""
import json
import math
import logging
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Tuple, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from utils.errors import MeasureError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Atom:
    position: float
    mass: float


@dataclass(frozen=True)
class DensitySegment:
    left: float
    right: float
    value: float

    @property
    def mass(self) -> float:
        return self.value * (self.right - self.left)


@dataclass(frozen=True)
class IntervalSpec:
    lo: float
    hi: float
    lo_closed: bool = True
    hi_closed: bool = True

    def __post_init__(self):
        if math.isnan(self.lo) or math.isnan(self.hi) or self.lo > self.hi:
            raise MeasureError(f"invalid interval [{self.lo}, {self.hi}]")

    @classmethod
    def closed(cls, lo: float, hi: float) -> "IntervalSpec":
        return cls(lo, hi, True, True)

    @classmethod
    def half_open(cls, lo: float, hi: float) -> "IntervalSpec":
        """The interval [lo, hi)"""
        return cls(lo, hi, True, False)

    @classmethod
    def window(cls, x: float, d: float) -> "IntervalSpec":
        """Closed window of width d centered at x"""
        return cls(x - d / 2, x + d / 2, True, True)


@dataclass(frozen=True)
class Structure:
    """Sorted structural points with the atom mass sitting on each and the density on each gap"""
    points: Tuple[float, ...]
    atom_mass: Tuple[float, ...]
    gap_value: Tuple[float, ...]


@dataclass(frozen=True)
class Measure:
    atoms: Tuple[Atom, ...] = ()
    density: Tuple[DensitySegment, ...] = ()

    @property
    def is_zero(self) -> bool:
        return not self.atoms and not self.density

    @cached_property
    def total_mass(self) -> float:
        return math.fsum([a.mass for a in self.atoms] + [s.mass for s in self.density])

    @cached_property
    def structure(self) -> Structure:
        pts = sorted({a.position for a in self.atoms}
                     | {s.left for s in self.density}
                     | {s.right for s in self.density})
        by_pos = {a.position: a.mass for a in self.atoms}
        gaps = []
        j = 0
        for lo, hi in zip(pts[:-1], pts[1:]):
            while j < len(self.density) and self.density[j].right <= lo:
                j += 1
            inside = j < len(self.density) and self.density[j].left <= lo and hi <= self.density[j].right
            gaps.append(self.density[j].value if inside else 0.0)
        return Structure(tuple(pts), tuple(by_pos.get(p, 0.0) for p in pts), tuple(gaps))

    @cached_property
    def _positions(self) -> np.ndarray:
        return np.asarray([a.position for a in self.atoms], dtype=float)

    def atom_at(self, x: float) -> float:
        positions = self._positions
        i = int(np.searchsorted(positions, x, side='left'))
        if i < len(positions) and positions[i] == x:
            return self.atoms[i].mass
        return 0.0

    def __repr__(self) -> str:
        return f"Measure(atoms={len(self.atoms)}, segments={len(self.density)}, mass={self.total_mass!r})"


Hull = Optional[Tuple[float, float]]


def _finite(value: float, what: str) -> float:
    try:
        value = float(value)
    except (TypeError, ValueError):
        raise MeasureError(f"{what} is not a number: {value!r}")
    if not math.isfinite(value):
        raise MeasureError(f"{what} must be finite, got {value!r}")
    return value


def build_measure(atoms: Iterable[Sequence[float]] = (),
                  density: Iterable[Sequence[float]] = ()) -> Measure:
    """Normalize atoms (position, mass) and segments (left, right, value) into a Measure"""
    merged = {}
    for k, item in enumerate(atoms):
        x, weight = item
        x = _finite(x, f"atom[{k}].position")
        weight = _finite(weight, f"atom[{k}].mass")
        if weight < 0:
            raise MeasureError(f"atom[{k}] has negative mass {weight!r}")
        if weight == 0:
            raise MeasureError(f"atom[{k}] has zero mass; atoms must carry positive mass")
        merged[x] = merged.get(x, 0.0) + weight
    norm_atoms = tuple(Atom(x, merged[x]) for x in sorted(merged))

    raw = []
    for k, item in enumerate(density):
        left, right, value = item
        left = _finite(left, f"density[{k}].from")
        right = _finite(right, f"density[{k}].to")
        value = _finite(value, f"density[{k}].value")
        if value < 0:
            raise MeasureError(f"density[{k}] has negative value {value!r}")
        if right < left:
            raise MeasureError(f"density[{k}] has to={right!r} < from={left!r}")
        if right > left and value > 0:
            raw.append((left, right, value))
    return Measure(norm_atoms, _normalize_segments(raw))


def _normalize_segments(raw: List[Tuple[float, float, float]]) -> Tuple[DensitySegment, ...]:
    # Overlaps add up; equal neighbours merge.
    if not raw:
        return ()
    cuts = sorted({p for seg in raw for p in seg[:2]})
    pieces: List[List[float]] = []
    for lo, hi in zip(cuts[:-1], cuts[1:]):
        value = math.fsum(v for l, r, v in raw if l <= lo and hi <= r)
        if value <= 0:
            continue
        if pieces and pieces[-1][1] == lo and pieces[-1][2] == value:
            pieces[-1][1] = hi
        else:
            pieces.append([lo, hi, value])
    return tuple(DensitySegment(*p) for p in pieces)


def mass(m: Measure, iv: IntervalSpec) -> float:
    """Exact mass of an interval; an atom on an endpoint counts iff that endpoint is closed"""
    if m.is_zero or iv.hi < iv.lo:
        return 0.0
    positions = m._positions
    parts = []
    if m.atoms:
        left = int(np.searchsorted(positions, iv.lo, side='left' if iv.lo_closed else 'right'))
        right = int(np.searchsorted(positions, iv.hi, side='right' if iv.hi_closed else 'left'))
        parts.extend(a.mass for a in m.atoms[left:right])
    if m.density and iv.hi > iv.lo:
        for seg in m.density:
            if seg.right <= iv.lo:
                continue
            if seg.left >= iv.hi:
                break
            parts.append(seg.value * (min(seg.right, iv.hi) - max(seg.left, iv.lo)))
    return max(math.fsum(parts), 0.0)


def support_hull(m: Measure) -> Hull:
    """Smallest closed interval containing the support, or None for the zero measure"""
    if m.is_zero:
        return None
    pts = m.structure.points
    return pts[0], pts[-1]


def brinck_constant(m: Measure) -> float:
    """sup over x of the mass of [x, x+1], from closed windows starting or ending at a breakpoint"""
    if m.is_zero:
        return 0.0
    windows = []
    for p in m.structure.points:
        windows.append(IntervalSpec.closed(p, p + 1.0))
        # (p - 1) + 1 may round below p and drop an atom sitting on p
        windows.append(IntervalSpec.closed(p - 1.0, p))
    return max(mass(m, iv) for iv in windows)


def tail_decay_check(m: Measure, a: float) -> bool:
    """Record the discreteness hypothesis: windows (x-a, x+a) far out carry no mass"""
    if a <= 0:
        raise MeasureError(f"window half-width must be positive, got {a!r}")
    hull = support_hull(m)
    if hull is None:
        return True
    lo, hi = hull
    left = mass(m, IntervalSpec(lo - 3 * a, lo - a, False, False))
    right = mass(m, IntervalSpec(hi + a, hi + 3 * a, False, False))
    return left == 0.0 and right == 0.0


def restrict(m: Measure, iv: IntervalSpec) -> Measure:
    """The measure m restricted to iv"""
    atoms = [(a.position, a.mass) for a in m.atoms
             if (iv.lo < a.position or (iv.lo_closed and a.position == iv.lo))
             and (a.position < iv.hi or (iv.hi_closed and a.position == iv.hi))]
    density = [(max(s.left, iv.lo), min(s.right, iv.hi), s.value) for s in m.density
               if s.right > iv.lo and s.left < iv.hi]
    return build_measure(atoms, density)


def translate(m: Measure, shift: float) -> Measure:
    return build_measure([(a.position + shift, a.mass) for a in m.atoms],
                         [(s.left + shift, s.right + shift, s.value) for s in m.density])


def reflect(m: Measure) -> Measure:
    """Image of m under x -> -x"""
    return build_measure([(-a.position, a.mass) for a in m.atoms],
                         [(-s.right, -s.left, s.value) for s in m.density])


def scale_mass(m: Measure, c: float) -> Measure:
    if c <= 0:
        raise MeasureError(f"mass scale must be positive, got {c!r}")
    return build_measure([(a.position, c * a.mass) for a in m.atoms],
                         [(s.left, s.right, c * s.value) for s in m.density])


def dilate(m: Measure, s: float) -> Measure:
    """The measure A -> s * m(s A)"""
    if s <= 0:
        raise MeasureError(f"dilation factor must be positive, got {s!r}")
    return build_measure([(a.position / s, s * a.mass) for a in m.atoms],
                         [(seg.left / s, seg.right / s, s * s * seg.value) for seg in m.density])


def add(first: Measure, second: Measure) -> Measure:
    return build_measure([(a.position, a.mass) for a in first.atoms + second.atoms],
                         [(s.left, s.right, s.value) for s in first.density + second.density])


# JSON surface: {"atoms":[{"x":..,"mass":..}],"density":[{"from":..,"to":..,"value":..}]}

class AtomModel(BaseModel):
    x: float = Field(allow_inf_nan=False)
    mass: float = Field(gt=0, allow_inf_nan=False)


class SegmentModel(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    from_: float = Field(alias="from", allow_inf_nan=False)
    to: float = Field(allow_inf_nan=False)
    value: float = Field(ge=0, allow_inf_nan=False)


class MeasureModel(BaseModel):
    atoms: List[AtomModel] = Field(default_factory=list)
    density: List[SegmentModel] = Field(default_factory=list)

    def to_measure(self) -> Measure:
        return build_measure([(a.x, a.mass) for a in self.atoms],
                             [(s.from_, s.to, s.value) for s in self.density])

    @classmethod
    def from_measure(cls, m: Measure) -> "MeasureModel":
        return cls(atoms=[AtomModel(x=a.position, mass=a.mass) for a in m.atoms],
                   density=[SegmentModel(from_=s.left, to=s.right, value=s.value) for s in m.density])


def measure_from_dict(data: dict) -> Measure:
    try:
        return MeasureModel.model_validate(data).to_measure()
    except ValidationError as e:
        first = e.errors()[0]
        where = ".".join(str(p) for p in first["loc"])
        raise MeasureError(f"{where}: {first['msg']}")


def measure_to_dict(m: Measure) -> dict:
    return MeasureModel.from_measure(m).model_dump(by_alias=True)


def load_measure(path: Union[str, Path]) -> Measure:
    with open(path, 'r') as f:
        try:
            data = json.load(f)
        except json.JSONDecodeError as e:
            raise MeasureError(f"{path}:{e.lineno}:{e.colno}: {e.msg}")
    return measure_from_dict(data)


def dump_measure(m: Measure) -> str:
    # json writes floats with repr, the shortest round-trip decimal
    return json.dumps(measure_to_dict(m))
