"""Exponent arithmetic for the extension thresholds.

Notation used throughout the package:

* ``L = log 2 / log 3`` (the Hausdorff dimension of the Cantor set),
* ``A = (1 + alpha) - L``,
* ``kappa = p q / (p - q)``.

Everything is evaluated in ``numpy.longdouble`` (80-bit extended on x86) and
accepts numpy arrays, so the threshold sweeps run vectorised.  ``p = inf`` is
handled through the limits of the closed forms.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

LD = np.longdouble
LOG2 = np.log(LD(2))
LOG3 = np.log(LD(3))
DIM = LOG2 / LOG3                      # log 2 / log 3
GUARD = 1e-12                          # relative guard band for threshold comparisons


class ExponentDomainError(ValueError):
    pass


def _ld(x):
    return np.asarray(x, dtype=LD)


def _out(x):
    with np.errstate(over="ignore"):
        x = np.asarray(x, dtype=float)
    return float(x) if x.ndim == 0 else x


def alpha_critical() -> float:
    """``log 2 / (2 log 3)``: below it no admissible pair ``(p, q)`` exists."""
    return float(DIM / 2)


def cantor_dimension() -> float:
    return float(DIM)


def shift(alpha):
    """``A = (1 + alpha) - log 2 / log 3``."""
    return 1 + _ld(alpha) - DIM


def kappa(p, q):
    """``p q / (p - q)``; equals ``q`` at ``p = inf``."""
    p, q = _ld(p), _ld(q)
    if np.any(q >= p):
        raise ExponentDomainError("kappa requires q < p")
    with np.errstate(invalid="ignore", divide="ignore"):
        out = np.where(np.isinf(p), q, p * q / (p - q))
    return _out(out)


def p_lower(alpha):
    """Lower end of the admissible ``p`` range."""
    a = _ld(alpha)
    if np.any(a <= DIM / 2):
        raise ExponentDomainError(
            f"p_lower is undefined for alpha <= alpha_critical={alpha_critical():.10f}")
    return _out(shift(a) / (2 * a - DIM))


def _q_upper_ld(alpha, p):
    a, p = _ld(alpha), _ld(p)
    A = shift(a)
    with np.errstate(invalid="ignore", divide="ignore", over="ignore"):
        finite = A * p / (A + (1 - a) * p)
    return np.where(np.isinf(p), A / (1 - a), finite)


def q_upper(alpha, p):
    """Supremum of admissible ``q`` for given ``(alpha, p)``.

    Returns values ``<= 1`` (no admissible ``q``) when ``p <= p_lower(alpha)``;
    use :func:`q_upper_flagged` to get that information explicitly.
    """
    return _out(_q_upper_ld(alpha, p))


def q_upper_flagged(alpha, p) -> tuple[float, bool]:
    """``(q_upper, admissible)`` where ``admissible`` is false in the sharpness regime."""
    q = q_upper(alpha, p)
    return q, bool(q > 1.0) and alpha > alpha_critical()


def _series_exponent_ld(alpha, p, q):
    a = _ld(alpha)
    return 1 + a + (a - 1) * _ld(kappa(p, q))


def series_ratio(alpha, p, q):
    """Geometric ratio ``2 * 3**-(1 + alpha + (alpha - 1) kappa)`` of the Jacobian-quotient series."""
    p, q = _ld(p), _ld(q)
    if np.any(q >= p):
        raise ExponentDomainError("series_ratio requires 1 <= q < p")
    e = _series_exponent_ld(alpha, p, q)
    with np.errstate(over="ignore"):
        return _out(2 * np.exp(-e * LOG3))


def alpha_p(alpha, p):
    """``alpha_p``: ``1 / q_upper`` above the ``p`` threshold, 1 at or below it.

    For ``alpha <= alpha_critical`` the threshold is infinite and ``alpha_p = 1``.
    """
    a, pl = _ld(alpha), _ld(p)
    if np.any(pl <= 1):
        raise ExponentDomainError("alpha_p requires p > 1")
    with np.errstate(invalid="ignore", divide="ignore"):
        thresh = np.where(a > DIM / 2, shift(a) / (2 * a - DIM), LD(np.inf))
        val = np.where(pl > thresh, 1 / _q_upper_ld(a, pl), LD(1))
    return _out(val)


def beta_default(alpha, p):
    """Largest allowed witness scaling exponent ``A / (alpha p) - 1`` (``-1`` at ``p = inf``)."""
    a, pl = _ld(alpha), _ld(p)
    with np.errstate(divide="ignore"):
        val = np.where(np.isinf(pl), LD(-1), shift(a) / (a * pl) - 1)
    return _out(val)


def sharp_pair_factor(alpha, p, beta, q):
    """``2 * 3**(alpha (beta q - 1) + (q - 1))``: per-generation growth of the divergence lower bound."""
    a, b, q = _ld(alpha), _ld(beta), _ld(q)
    return _out(2 * np.exp((a * (b * q - 1) + (q - 1)) * LOG3))


def admissible(alpha: float, p: float, q: float) -> bool:
    """Whether ``(alpha, p, q)`` lies in the extension range, with the guard band applied."""
    if not alpha > alpha_critical():
        return False
    pl = p_lower(alpha)
    if not p > pl * (1 + GUARD):
        return False
    return 1.0 <= q < q_upper(alpha, p) * (1 - GUARD)


@dataclass(frozen=True)
class ExponentTriple:
    alpha: float
    p: float
    q: float

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ExponentDomainError("alpha must lie in (0, 1)")
        if not self.p > 1:
            raise ExponentDomainError("p must exceed 1")
        if not (1 <= self.q and math.isfinite(self.q)):
            raise ExponentDomainError("q must lie in [1, inf)")

    def derived(self) -> "DerivedExponents":
        return derive(self)


@dataclass(frozen=True)
class DerivedExponents:
    kappa: float | None
    A: float
    p_lower: float | None
    q_upper: float
    alpha_p: float
    beta_max: float
    alpha_critical: float
    series_ratio: float | None


def derive(t: ExponentTriple) -> DerivedExponents:
    has_kappa = t.q < t.p
    return DerivedExponents(
        kappa=kappa(t.p, t.q) if has_kappa else None,
        A=float(shift(t.alpha)),
        p_lower=p_lower(t.alpha) if t.alpha > alpha_critical() else None,
        q_upper=q_upper(t.alpha, t.p),
        alpha_p=alpha_p(t.alpha, t.p),
        beta_max=beta_default(t.alpha, t.p),
        alpha_critical=alpha_critical(),
        series_ratio=series_ratio(t.alpha, t.p, t.q) if has_kappa else None,
    )


def threshold_rows(alpha: float, ps, q: float | None = None) -> list[dict]:
    """Table rows for the ``thresholds`` command (one per ``p``)."""
    rows = []
    pl = p_lower(alpha) if alpha > alpha_critical() else math.inf
    for p in ps:
        qu = q_upper(alpha, p)
        row = {
            "alpha": alpha, "p": p, "p_lower": pl, "q_upper": qu,
            "alpha_p": alpha_p(alpha, p), "beta_default": beta_default(alpha, p),
            "admissible": bool(p > pl and qu > 1),
        }
        if q is not None:
            row["q"] = q
            row["series_ratio_at_q"] = series_ratio(alpha, p, q) if q < p else math.nan
        rows.append(row)
    return rows
