"""The Cantor-cuspidal profile ``psi(x1) = d(x1, C)**alpha`` and the domains it bounds."""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import geometry as geo
from .geometry import DEFAULT_DEPTH, InRemovedInterval, Real


class Region(enum.Enum):
    UPPER = "upper"      # x2 > psi(x1)
    LOWER = "lower"      # x2 < psi(x1)
    ON_GRAPH = "on_graph"


@dataclass(frozen=True)
class PlanePoint:
    x1: float
    x2: float

    def __post_init__(self):
        if not (math.isfinite(self.x1) and math.isfinite(self.x2)):
            raise ValueError(f"non-finite plane point ({self.x1}, {self.x2})")

    def __iter__(self):
        yield self.x1
        yield self.x2


@dataclass(frozen=True)
class Enclosure:
    """Closed float interval ``[lo, hi]`` known to contain a real value."""

    lo: float
    hi: float

    @property
    def mid(self) -> float:
        return 0.5 * (self.lo + self.hi)

    @property
    def width(self) -> float:
        return self.hi - self.lo

    def __contains__(self, value: float) -> bool:
        return self.lo <= value <= self.hi


def _down(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, -math.inf)
    return x


def _up(x: float, ulps: int = 1) -> float:
    for _ in range(ulps):
        x = math.nextafter(x, math.inf)
    return x


def _float_below(q: Fraction) -> float:
    f = float(q)
    return _down(f) if Fraction(f) > q else f


def _float_above(q: Fraction) -> float:
    f = float(q)
    return _up(f) if Fraction(f) < q else f


def power_enclosure(lo: Fraction, hi: Fraction, alpha: float) -> Enclosure:
    """Enclose ``[lo, hi]**alpha`` using monotonicity of ``t -> t**alpha``.

    ``pow`` is accurate to well under 2 ulps, so widening by 2 ulps each side
    keeps the true image inside.
    """
    a = _float_below(lo)
    b = _float_above(hi)
    plo = 0.0 if a <= 0.0 else max(0.0, _down(a ** alpha, 2))
    phi = 0.0 if b <= 0.0 else _up(b ** alpha, 2)
    return Enclosure(plo, phi)


@dataclass(frozen=True)
class CuspProfile:
    alpha: float
    geometry_depth: int = DEFAULT_DEPTH

    def __post_init__(self):
        if not 0.0 < self.alpha < 1.0:
            raise ValueError(f"alpha must lie in (0, 1), got {self.alpha}")
        geo._check_depth(self.geometry_depth)

    # ---------------------------------------------------------------- scalar
    def psi(self, x1: Real) -> Enclosure:
        return psi(self, x1)

    def psi_derivative(self, x1: Real) -> float | None:
        return psi_derivative(self, x1)

    def classify(self, p: PlanePoint, tol: float = 0.0) -> Region:
        return classify(self, p, tol)

    # ---------------------------------------------------------------- arrays
    def psi_array(self, x1):
        d, _, _ = geo.dist_to_cantor_array(x1)
        x1 = np.asarray(x1, dtype=float)
        return np.where((x1 > 0) & (x1 < 1), d ** self.alpha, 0.0)

    def psi_derivative_array(self, x1):
        """``psi'`` on removed intervals; 0 outside ``[0, 1]``; NaN where undefined."""
        x1 = np.asarray(x1, dtype=float)
        d, gen, offset = geo.dist_to_cantor_array(x1)
        out = np.full(x1.shape, np.nan)
        out[(x1 < 0) | (x1 > 1)] = 0.0
        inside = (gen > 0) & (offset != 0)
        with np.errstate(divide="ignore"):
            slope = self.alpha * d[inside] ** (self.alpha - 1.0)
        out[inside] = np.where(offset[inside] < 0, slope, -slope)
        return out


def psi(profile: CuspProfile, x1: Real) -> Enclosure:
    """Certified enclosure of ``psi(x1)``; exactly 0 off ``(0, 1)``."""
    fx = geo.to_fraction(x1)
    if fx <= 0 or fx >= 1:
        return Enclosure(0.0, 0.0)
    bound = geo.dist_to_cantor(fx, profile.geometry_depth)
    return power_enclosure(bound.lo, bound.hi, profile.alpha)


def psi_derivative(profile: CuspProfile, x1: Real) -> float | None:
    """``psi'(x1)``, or ``None`` at midpoints, on the Cantor set and at 0, 1."""
    fx = geo.to_fraction(x1)
    if fx < 0 or fx > 1:
        return 0.0
    loc = geo.locate(fx, profile.geometry_depth)
    if not isinstance(loc, InRemovedInterval):
        return None
    iv = loc.interval
    mid = iv.midpoint
    if fx == mid:
        return None
    a = profile.alpha
    if fx < mid:
        return a * float(fx - iv.a.to_fraction()) ** (a - 1.0)
    return -a * float(iv.b.to_fraction() - fx) ** (a - 1.0)


def classify(profile: CuspProfile, p: PlanePoint, tol: float = 0.0) -> Region:
    if tol < 0:
        raise ValueError("tol must be non-negative")
    enc = psi(profile, p.x1)
    if p.x2 > enc.hi + tol:
        return Region.UPPER
    if p.x2 < enc.lo - tol:
        return Region.LOWER
    return Region.ON_GRAPH


def sample_profile(profile: CuspProfile, xs) -> list[tuple[float, float, float, float | None]]:
    """Rows ``(x1, psi_lo, psi_hi, derivative or None)`` for the CSV sampler."""
    rows = []
    for x in xs:
        enc = psi(profile, x)
        rows.append((float(x), enc.lo, enc.hi, psi_derivative(profile, x)))
    return rows
