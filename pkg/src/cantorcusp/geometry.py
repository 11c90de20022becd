"""Exact geometry of the middle-thirds Cantor set.

Endpoints of removed intervals are triadic rationals ``m / 3**level`` and are
kept exact.  Query points are converted to exact rationals (floats are dyadic,
so ``float.as_integer_ratio`` is lossless) and classified by walking their
ternary expansion with integer arithmetic.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import total_ordering
from typing import Iterator, Union

import numpy as np

Real = Union[int, float, Fraction]

N_MAX = 80
DEFAULT_DEPTH = 40
# float64 cannot resolve Cantor structure below 3**-33 on [0, 1]
ARRAY_DEPTH = 33


class GeometryError(ValueError):
    """Raised for out-of-range generations/depths or non-finite queries."""


@total_ordering
@dataclass(frozen=True)
class TriadicRational:
    """The exact number ``numerator / 3**level`` in canonical form."""

    numerator: int
    level: int = 0

    def __post_init__(self):
        if self.level < 0:
            raise GeometryError("level must be non-negative")
        num, lev = self.numerator, self.level
        while lev > 0 and num % 3 == 0:
            num //= 3
            lev -= 1
        object.__setattr__(self, "numerator", num)
        object.__setattr__(self, "level", lev)

    def _aligned(self, other: "TriadicRational") -> tuple[int, int, int]:
        lev = max(self.level, other.level)
        return (self.numerator * 3 ** (lev - self.level),
                other.numerator * 3 ** (lev - other.level), lev)

    def __add__(self, other: "TriadicRational") -> "TriadicRational":
        a, b, lev = self._aligned(other)
        return TriadicRational(a + b, lev)

    def __sub__(self, other: "TriadicRational") -> "TriadicRational":
        a, b, lev = self._aligned(other)
        return TriadicRational(a - b, lev)

    def __neg__(self) -> "TriadicRational":
        return TriadicRational(-self.numerator, self.level)

    def __eq__(self, other) -> bool:
        if isinstance(other, TriadicRational):
            return (self.numerator, self.level) == (other.numerator, other.level)
        if isinstance(other, (int, Fraction)):
            return self.to_fraction() == other
        return NotImplemented

    def __lt__(self, other) -> bool:
        if isinstance(other, TriadicRational):
            a, b, _ = self._aligned(other)
            return a < b
        return self.to_fraction() < Fraction(other)

    def __hash__(self) -> int:
        return hash(self.to_fraction())

    def to_fraction(self) -> Fraction:
        return Fraction(self.numerator, 3 ** self.level)

    def __float__(self) -> float:
        return self.numerator / 3 ** self.level

    def __repr__(self) -> str:
        return f"TriadicRational({self.numerator}/3^{self.level})"


@dataclass(frozen=True)
class CantorInterval:
    """Removed open interval ``I_n^k = (a, b)`` of generation ``n``."""

    n: int
    k: int
    a: TriadicRational
    b: TriadicRational

    @property
    def midpoint(self) -> Fraction:
        return (self.a.to_fraction() + self.b.to_fraction()) / 2

    @property
    def length(self) -> TriadicRational:
        return self.b - self.a

    def contains(self, x: Real) -> bool:
        x = Fraction(x)
        return self.a.to_fraction() < x < self.b.to_fraction()


def _check_generation(n: int) -> None:
    if not isinstance(n, (int, np.integer)) or not 1 <= n <= N_MAX:
        raise GeometryError(f"generation must be in 1..{N_MAX}, got {n!r}")


def _check_depth(depth: int) -> None:
    if not isinstance(depth, (int, np.integer)) or not 0 <= depth <= N_MAX:
        raise GeometryError(f"depth must be in 0..{N_MAX}, got {depth!r}")


def interval_from_prefix(n: int, k: int) -> CantorInterval:
    """The ``k``-th (1-based, left to right) removed interval of generation ``n``.

    The binary digits of ``k - 1`` select the ternary digits 0/2 of the
    surviving level-``(n-1)`` interval that ``I_n^k`` is the middle third of.
    """
    _check_generation(n)
    if not 1 <= k <= 2 ** (n - 1):
        raise GeometryError(f"k must be in 1..{2 ** (n - 1)} for generation {n}")
    left = 0
    bits = k - 1
    for i in range(n - 1):
        digit = 2 * ((bits >> (n - 2 - i)) & 1)
        left = 3 * left + digit
    a = 3 * left + 1
    return CantorInterval(n, k, TriadicRational(a, n), TriadicRational(a + 1, n))


def iter_removed_intervals(n: int) -> Iterator[CantorInterval]:
    """Lazily yield the generation-``n`` removed intervals in left-to-right order."""
    _check_generation(n)
    for k in range(1, 2 ** (n - 1) + 1):
        yield interval_from_prefix(n, k)


INT64_GENERATIONS = 39   # 3**39 < 2**63


def removed_numerators(n: int) -> np.ndarray:
    """Left-endpoint numerators (over ``3**n``) of the generation-``n`` intervals, ascending.

    Exact ``int64`` arithmetic: surviving level-``m`` intervals start at ``L / 3**m``
    and split into children starting at ``3 L`` and ``3 L + 2``; the removed
    middle third of each starts at ``3 L + 1``.
    """
    _check_generation(n)
    if n > INT64_GENERATIONS:
        raise GeometryError(f"int64 numerators only reach generation {INT64_GENERATIONS}")
    left = np.zeros(1, dtype=np.int64)
    for _ in range(n - 1):
        left = np.stack([3 * left, 3 * left + 2], axis=1).ravel()
    return 3 * left + 1


def removed_intervals(n: int) -> list[CantorInterval]:
    """All ``2**(n-1)`` removed intervals of generation ``n``, sorted by left endpoint."""
    return list(iter_removed_intervals(n))


# --------------------------------------------------------------------------
# Point location
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class InRemovedInterval:
    interval: CantorInterval


@dataclass(frozen=True)
class InCantorSet:
    pass


@dataclass(frozen=True)
class OutsideUnitInterval:
    pass


@dataclass(frozen=True)
class UndecidedAtDepth:
    """``x`` survives every removal up to ``depth``; it lies in ``[left, left + 3**-depth]``."""

    depth: int
    left: TriadicRational


LocateResult = Union[InRemovedInterval, InCantorSet, OutsideUnitInterval, UndecidedAtDepth]


def to_fraction(x: Real) -> Fraction:
    if isinstance(x, Fraction):
        return x
    if isinstance(x, (int, np.integer)):
        return Fraction(int(x))
    x = float(x)
    if not math.isfinite(x):
        raise GeometryError(f"non-finite coordinate {x!r}")
    return Fraction(*x.as_integer_ratio())


def locate(x: Real, depth: int = DEFAULT_DEPTH) -> LocateResult:
    """Classify ``x`` against the removed intervals of generations ``<= depth``.

    Exact: the remainder of ``x`` after each ternary digit is carried as an
    integer numerator over the (fixed) denominator of ``x``.  A repeated
    remainder means the expansion is periodic with no digit 1, which decides
    membership in the Cantor set before ``depth`` runs out.
    """
    _check_depth(depth)
    fx = to_fraction(x)
    if fx < 0 or fx > 1:
        return OutsideUnitInterval()
    if fx == 1:
        return InCantorSet()
    num, den = fx.numerator, fx.denominator
    left = 0          # numerator of the surviving interval's left end, over 3**level
    bits = 0          # binary index of the surviving interval
    seen = {num}
    for level in range(1, depth + 1):
        num *= 3
        digit, num = divmod(num, den)
        if digit == 1:
            if num == 0:
                return InCantorSet()  # left endpoint a of a removed interval
            iv = CantorInterval(level, bits + 1,
                                TriadicRational(3 * left + 1, level),
                                TriadicRational(3 * left + 2, level))
            return InRemovedInterval(iv)
        left = 3 * left + digit
        bits = 2 * bits + (digit // 2)
        if num == 0 or num in seen:
            return InCantorSet()
        seen.add(num)
    return UndecidedAtDepth(depth, TriadicRational(left, depth))


@dataclass(frozen=True)
class DistanceBound:
    """Certified enclosure ``lo <= d(x, C) <= hi`` with exact rational bounds."""

    lo: Fraction
    hi: Fraction

    @property
    def exact(self) -> bool:
        return self.lo == self.hi

    @property
    def width(self) -> Fraction:
        return self.hi - self.lo


def dist_to_cantor(x: Real, depth: int = DEFAULT_DEPTH) -> DistanceBound:
    """Distance from ``x`` to the Cantor set, exact whenever ``locate`` is decisive."""
    fx = to_fraction(x)
    loc = locate(fx, depth)
    if isinstance(loc, OutsideUnitInterval):
        d = -fx if fx < 0 else fx - 1
        return DistanceBound(d, d)
    if isinstance(loc, InCantorSet):
        return DistanceBound(Fraction(0), Fraction(0))
    if isinstance(loc, InRemovedInterval):
        iv = loc.interval
        d = min(fx - iv.a.to_fraction(), iv.b.to_fraction() - fx)
        return DistanceBound(d, d)
    lo_end = loc.left.to_fraction()
    hi_end = lo_end + Fraction(1, 3 ** loc.depth)
    return DistanceBound(Fraction(0), min(fx - lo_end, hi_end - fx))


def surviving_interval(x: Real, level: int) -> tuple[TriadicRational, TriadicRational] | CantorInterval | None:
    """Where ``x`` sits relative to the level-``level`` construction stage.

    Returns the closed surviving interval ``(left, right)`` containing ``x``,
    or the removed interval of generation ``<= level`` containing it, or
    ``None`` outside ``[0, 1]``.  Points on a surviving interval's boundary are
    attributed to that surviving interval.
    """
    _check_depth(level)
    fx = to_fraction(x)
    if fx < 0 or fx > 1:
        return None
    scale = 3 ** level
    # closed surviving intervals are [m/3^l, (m+1)/3^l] with m having no digit 1
    m = math.floor(fx * scale)
    if m == scale:
        m -= 1
    for cand in (m, m - 1):
        if cand < 0:
            continue
        if _no_digit_one(cand, level) and Fraction(cand, scale) <= fx <= Fraction(cand + 1, scale):
            return TriadicRational(cand, level), TriadicRational(cand + 1, level)
    loc = locate(fx, level)
    if isinstance(loc, InRemovedInterval):
        return loc.interval
    raise AssertionError("unreachable: point neither removed nor surviving")


def _no_digit_one(m: int, level: int) -> bool:
    for _ in range(level):
        m, r = divmod(m, 3)
        if r == 1:
            return False
    return True


def total_removed_length(n: int) -> Fraction:
    """Exact total length removed through generation ``n`` (summing intervals)."""
    total = Fraction(0)
    for g in range(1, n + 1):
        if g <= INT64_GENERATIONS:
            starts = removed_numerators(g)
            total += Fraction(int(np.sum((starts + 1) - starts)), 3 ** g)
        else:
            total += sum((iv.length.to_fraction() for iv in iter_removed_intervals(g)), Fraction(0))
    return total


# --------------------------------------------------------------------------
# Vectorised float path (grids, witnesses).  Not certified.
# --------------------------------------------------------------------------

def dist_to_cantor_array(x, depth: int = ARRAY_DEPTH):
    """Float64 distance to the Cantor set for an array of abscissae.

    Also returns the generation of the containing removed interval (0 if none
    was found within ``depth``) and the signed offset from its midpoint, in
    original units.  Points left undecided get the distance to the nearest end
    of their surviving interval.
    """
    x = np.asarray(x, dtype=float)
    dist = np.where(x < 0, -x, np.where(x > 1, x - 1, 0.0))
    gen = np.zeros(x.shape, dtype=np.int64)
    offset = np.full(x.shape, np.nan)
    inside = (x > 0) & (x < 1)
    y = np.where(inside, x, 0.0)
    active = inside.copy()
    scale = 1.0
    for level in range(1, depth + 1):
        scale /= 3.0
        y3 = 3.0 * y
        d = np.floor(y3)
        hit = active & (d == 1.0) & (y3 > 1.0)
        if hit.any():
            t = y3[hit] - 1.0
            dist[hit] = np.minimum(t, 1.0 - t) * scale
            offset[hit] = (t - 0.5) * scale
            gen[hit] = level
            active &= ~hit
        endpoint = active & (y3 == d)
        active &= ~endpoint
        y = np.where(active, y3 - np.minimum(d, 2.0), 0.0)
        if not active.any():
            break
    if active.any():
        dist[active] = np.minimum(y[active], 1.0 - y[active]) * scale
    return dist, gen, offset
