"""Jacobian-quotient integrals of the reflection over the rectangle families.

For the reflection ``R`` the integrability condition

    int |DR|**kappa / |J_R|**(kappa / p)  over  U_{n,k} R^{+-}_{n,k}

reduces, interval by interval, to one-dimensional power integrals over the
half-interval ``(0, 1 / (2 3**n))``.  Two series are reported:

* the constant-free series whose generation-``n`` contribution is
  ``2**(n-1)`` times :func:`per_interval_integral`; its consecutive ratio is
  exactly :func:`~cantorcusp.exponents.series_ratio`;
* a rigorous majorant of the actual integral, obtained from
  ``|DR| <= 4 + 4 |psi'|`` and ``(a + b)**k <= 2**(k-1) (a**k + b**k)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

from . import exponents as ex

SIDE_HEIGHT = {"plus": 1.0, "minus": 3.0}   # rectangle heights psi and 3 psi
SIDE_JACOBIAN = {"plus": 3.0, "minus": 1.0 / 3.0}
DEFAULT_GENERATIONS = 200


class PerIntervalDivergence(ArithmeticError):
    """The cusp exponent is ``<= -1``; the single-interval integral is infinite."""


@dataclass(frozen=True)
class Finite:
    value: float
    bound: float


@dataclass(frozen=True)
class Divergent:
    ratio: float


@dataclass
class IntegralReport:
    side: str
    ratio: float
    partial_sums: list[float]
    tail_bound: float
    verdict: Finite | Divergent
    majorant_value: float = math.inf
    majorant_tail: float = math.inf
    exponent_terms: list[float] = field(default_factory=list)

    @property
    def finite(self) -> bool:
        return isinstance(self.verdict, Finite)

    def to_dict(self) -> dict:
        v = self.verdict
        return {
            "side": self.side,
            "verdict": "finite" if isinstance(v, Finite) else "divergent",
            "value": v.value if isinstance(v, Finite) else None,
            "ratio": self.ratio,
            "tail_bound": self.tail_bound,
            "majorant_value": self.majorant_value if math.isfinite(self.majorant_value) else None,
            "majorant_tail": self.majorant_tail if math.isfinite(self.majorant_tail) else None,
            "partial_sums": self.partial_sums,
        }


def cusp_exponent(alpha: float, kappa: float) -> float:
    """``alpha + (alpha - 1) kappa``: the power of ``t = x1 - a`` after integrating out ``x2``."""
    return alpha + (alpha - 1.0) * kappa


def half_interval_integral(exponent: float, n: int) -> float:
    """``int_0^{1/(2 3**n)} t**exponent dt``."""
    if exponent <= -1.0:
        raise PerIntervalDivergence(f"exponent {exponent} <= -1")
    return math.exp((exponent + 1.0) * -math.log(2.0 * 3.0 ** n)) / (exponent + 1.0)


def per_interval_integral(alpha: float, kappa: float, n: int, side: str = "plus") -> float:
    """Constant-free integral over one rectangle ``R^{+-}_{n,k}``.

    Both halves of the removed interval contribute the same half-interval
    power integral; the lower rectangle is three times as tall.
    """
    if side not in SIDE_HEIGHT:
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    e = cusp_exponent(alpha, kappa)
    return SIDE_HEIGHT[side] * 2.0 * half_interval_integral(e, n)


def majorant_per_interval(alpha: float, p: float, q: float, n: int, side: str) -> float:
    """Upper bound of the true integrand ``|DR|^kappa / |J|^(kappa/p)`` over one rectangle."""
    k = ex.kappa(p, q)
    jac = SIDE_JACOBIAN[side] ** (-(k / p) if math.isfinite(p) else 0.0)
    # |DR| <= 4 (1 + |psi'|) and |psi'(a + t)| = alpha t**(alpha - 1)
    smooth = 4.0 ** k * half_interval_integral(alpha, n)
    singular = (4.0 * alpha) ** k * half_interval_integral(cusp_exponent(alpha, k), n)
    return SIDE_HEIGHT[side] * 2.0 * jac * 2.0 ** (k - 1.0) * (smooth + singular)


def _check(p: float, q: float) -> None:
    if not 1.0 <= q < p:
        raise ex.ExponentDomainError(f"need 1 <= q < p, got p={p}, q={q}")


def jacobian_integral(alpha: float, p: float, q: float, side: str = "plus",
                      max_generation: int = DEFAULT_GENERATIONS) -> IntegralReport:
    _check(p, q)
    if side not in SIDE_HEIGHT:
        raise ValueError(f"side must be 'plus' or 'minus', got {side!r}")
    k = ex.kappa(p, q)
    r = ex.series_ratio(alpha, p, q)
    e = cusp_exponent(alpha, k)
    # log of the generation-n contribution 2**(n-1) * per_interval(n)
    if e > -1.0:
        log_c1 = math.log(SIDE_HEIGHT[side] * 2.0 / (e + 1.0)) - (e + 1.0) * math.log(6.0)
    else:
        log_c1 = math.inf
    log_r = math.log(r)
    terms: list[float] = []
    partial: list[float] = []
    running = 0.0
    for n in range(1, max_generation + 1):
        log_t = log_c1 + (n - 1) * log_r
        t = math.exp(log_t) if log_t < 709.0 else math.inf
        terms.append(t)
        running += t
        partial.append(running)
    exponent_terms = [math.exp(min(n * log_r, 709.0)) for n in range(1, min(max_generation, 60) + 1)]
    if e <= -1.0 or r >= 1.0:
        return IntegralReport(side, r, partial, math.inf, Divergent(r),
                              exponent_terms=exponent_terms)
    # geometric tail after N: c_N r / (1 - r), in log space
    log_tail = log_c1 + (max_generation - 1) * log_r + log_r - math.log1p(-r)
    tail = math.exp(log_tail) if log_tail > -745.0 else 0.0
    maj_terms = [2 ** (n - 1) * majorant_per_interval(alpha, p, q, n, side)
                 for n in range(1, max_generation + 1)]
    maj = math.fsum(maj_terms)
    # majorant is a sum of two geometric series with ratios r and 2 / 3**(1 + alpha)
    r2 = 2.0 * 3.0 ** (-(1.0 + alpha))
    maj_tail = maj_terms[-1] * max(r, r2) / (1.0 - max(r, r2))
    value = math.fsum(terms)
    return IntegralReport(side, r, partial, tail, Finite(value, tail), maj, maj_tail,
                          exponent_terms)


def cplus(alpha: float, p: float, q: float, max_generation: int = DEFAULT_GENERATIONS) -> IntegralReport:
    return jacobian_integral(alpha, p, q, "plus", max_generation)


def cminus(alpha: float, p: float, q: float, max_generation: int = DEFAULT_GENERATIONS) -> IntegralReport:
    return jacobian_integral(alpha, p, q, "minus", max_generation)
