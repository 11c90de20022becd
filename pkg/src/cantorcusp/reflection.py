"""The reflection over the Cantor-cuspidal graph.

Over each removed interval the band ``-2 psi < x2 < 2 psi`` is split by the
graph into an upper rectangle ``(psi, 2 psi)`` and a lower one
``(-2 psi, psi)``; the reflection maps each vertical slice of one affinely onto
the other.  Everywhere else it is the mirror ``x2 -> -x2``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from . import geometry as geo
from .geometry import CantorInterval, InRemovedInterval
from .profile import CuspProfile, PlanePoint, psi, psi_derivative


class UncertainZone(ArithmeticError):
    """The certified profile is too wide to decide the zone; raise the depth."""


class DerivativeUndefined(ArithmeticError):
    pass


class ZoneKind(enum.Enum):
    UPPER_RECTANGLE = "upper_rectangle"
    LOWER_RECTANGLE = "lower_rectangle"
    ELSEWHERE = "elsewhere"


@dataclass(frozen=True)
class ReflectionZone:
    kind: ZoneKind
    interval: CantorInterval | None = None

    @property
    def label(self) -> str:
        if self.interval is None:
            return self.kind.value
        return f"{self.kind.value}({self.interval.n},{self.interval.k})"


ELSEWHERE = ReflectionZone(ZoneKind.ELSEWHERE)


@dataclass(frozen=True)
class AffineJet:
    image: PlanePoint
    differential: np.ndarray
    jacobian_abs: float


def _on_graph(enc, x2: float) -> bool:
    return enc.lo <= x2 <= enc.hi


def zone(profile: CuspProfile, p: PlanePoint) -> ReflectionZone:
    loc = geo.locate(p.x1, profile.geometry_depth)
    enc = psi(profile, p.x1)
    x2 = p.x2
    if not isinstance(loc, InRemovedInterval):
        # psi <= enc.hi here; an undecided x1 may still sit in a tiny rectangle
        if abs(x2) > 2.0 * enc.hi:
            return ELSEWHERE
        if isinstance(loc, geo.UndecidedAtDepth):
            raise UncertainZone(f"x1={p.x1!r} undecided at depth {loc.depth}")
        if x2 == 0.0:
            raise UncertainZone("point lies on the graph")
        return ELSEWHERE
    iv = loc.interval
    if enc.hi < x2 < 2.0 * enc.lo:
        return ReflectionZone(ZoneKind.UPPER_RECTANGLE, iv)
    if -2.0 * enc.lo < x2 < enc.lo:
        return ReflectionZone(ZoneKind.LOWER_RECTANGLE, iv)
    if x2 > 2.0 * enc.hi or x2 < -2.0 * enc.hi:
        return ELSEWHERE
    raise UncertainZone(f"({p.x1!r}, {x2!r}) is within certification width of a zone boundary")


def reflect(profile: CuspProfile, p: PlanePoint) -> PlanePoint:
    enc = psi(profile, p.x1)
    if _on_graph(enc, p.x2):
        return p
    z = zone(profile, p)
    ps = enc.mid
    if z.kind is ZoneKind.UPPER_RECTANGLE:
        return PlanePoint(p.x1, -3.0 * p.x2 + 4.0 * ps)
    if z.kind is ZoneKind.LOWER_RECTANGLE:
        return PlanePoint(p.x1, -p.x2 / 3.0 + 4.0 * ps / 3.0)
    return PlanePoint(p.x1, -p.x2)


def reflect_jet(profile: CuspProfile, p: PlanePoint) -> AffineJet:
    """Image, Jacobian matrix ``[[dR1/dx1, dR1/dx2], [dR2/dx1, dR2/dx2]]`` and ``|det|``."""
    enc = psi(profile, p.x1)
    if _on_graph(enc, p.x2):
        raise DerivativeUndefined("the reflection is not differentiable on the graph")
    z = zone(profile, p)
    image = reflect(profile, p)
    if z.kind is ZoneKind.ELSEWHERE:
        return AffineJet(image, np.array([[1.0, 0.0], [0.0, -1.0]]), 1.0)
    slope = psi_derivative(profile, p.x1)
    if slope is None:
        raise DerivativeUndefined(f"psi is not differentiable at x1={p.x1!r}")
    if z.kind is ZoneKind.UPPER_RECTANGLE:
        return AffineJet(image, np.array([[1.0, 0.0], [4.0 * slope, -3.0]]), 3.0)
    return AffineJet(image, np.array([[1.0, 0.0], [4.0 * slope / 3.0, -1.0 / 3.0]]), 1.0 / 3.0)


def operator_norm_bound(profile: CuspProfile, x1) -> float:
    """Explicit bound ``4 + 4 alpha d(x1, C)**(alpha - 1)`` on ``|DR|`` over the rectangles at ``x1``."""
    loc = geo.locate(x1, profile.geometry_depth)
    if not isinstance(loc, InRemovedInterval):
        raise ValueError(f"x1={x1!r} is not inside a removed interval")
    d = float(geo.dist_to_cantor(x1, profile.geometry_depth).lo)
    return 4.0 + 4.0 * profile.alpha * d ** (profile.alpha - 1.0)


# --------------------------------------------------------------------------
# Array path used by the grid code
# --------------------------------------------------------------------------

ZONE_ELSEWHERE, ZONE_UPPER, ZONE_LOWER = 0, 1, 2


def zone_array(psi_vals, x2):
    """Zone codes given ``psi(x1)`` values (broadcast against ``x2``)."""
    ps = np.asarray(psi_vals, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    pos = ps > 0
    upper = pos & (x2 > ps) & (x2 < 2.0 * ps)
    lower = pos & (x2 > -2.0 * ps) & (x2 < ps)
    out = np.full(np.broadcast(ps, x2).shape, ZONE_ELSEWHERE, dtype=np.int8)
    out[upper] = ZONE_UPPER
    out[lower] = ZONE_LOWER
    return out


def reflect_array(profile: CuspProfile, x1, x2, psi_vals=None):
    """Vectorised reflection (float psi, no certification).  Returns ``(r1, r2)``."""
    x1 = np.asarray(x1, dtype=float)
    x2 = np.asarray(x2, dtype=float)
    ps = profile.psi_array(x1) if psi_vals is None else np.asarray(psi_vals, dtype=float)
    x1b, x2b, psb = np.broadcast_arrays(x1, x2, ps)
    z = zone_array(psb, x2b)
    r2 = -x2b.copy()
    up = z == ZONE_UPPER
    lo = z == ZONE_LOWER
    r2[up] = -3.0 * x2b[up] + 4.0 * psb[up]
    r2[lo] = -x2b[lo] / 3.0 + 4.0 * psb[lo] / 3.0
    on = x2b == psb
    r2[on] = x2b[on]
    return x1b.copy(), r2


def spectral_norm(matrix) -> float:
    return float(np.linalg.norm(np.asarray(matrix, dtype=float), 2))


def det_abs(matrix) -> float:
    m = np.asarray(matrix, dtype=float)
    return math.fabs(m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0])
