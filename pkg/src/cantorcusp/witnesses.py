"""Counterexample functions showing the exponent thresholds are sharp.

``u_plus`` lives above the graph.  In generation ``n`` it is a plateau of
height ``c_n = 3**(n alpha beta) (n log n)**-alpha_p`` on a horizontal slab
of heights ``(T_{n+1}, T_n)`` with ``T_n = (1 / (2 3**n))**alpha`` (the peak
height of a generation-``n`` cusp), restricted to the stretch between the
midpoint of the nearest earlier cusp on the left and the midpoint of the
generation-``n`` cusp.  Just right of that midpoint it vanishes, so any
extension has to drop from ``c_n`` to 0 across the cusp.

``u_minus`` lives below the graph and fills the odd-generation cusps.

Generations start at ``n = 2`` (``n log n`` vanishes at ``n = 1``); for
``u_minus`` the first odd generation used is 3.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from . import exponents as ex
from . import geometry as geo
from .geometry import CantorInterval, InRemovedInterval
from .profile import CuspProfile, PlanePoint, psi

UNIT_FACTOR_TOL = 1e-10


class RegimeError(ValueError):
    """``divergence_witness`` called for parameters where extension is possible."""


@dataclass(frozen=True)
class WitnessParams:
    alpha: float
    p: float
    beta: float | None = None
    side: str = "upper"
    generations: int = 60

    def __post_init__(self):
        if not 0 < self.alpha < 1:
            raise ValueError("alpha must lie in (0, 1)")
        if not self.p > 1:
            raise ValueError("p must exceed 1")
        if self.side not in ("upper", "lower"):
            raise ValueError("side must be 'upper' or 'lower'")
        if self.generations < 2:
            raise ValueError("generations must be at least 2")
        if self.beta is None:
            object.__setattr__(self, "beta", default_beta(self.alpha, self.p))

    @property
    def alpha_p(self) -> float:
        return ex.alpha_p(self.alpha, self.p)

    @property
    def beta_max(self) -> float:
        return ex.beta_default(self.alpha, self.p)

    def generations_used(self, upto: int | None = None) -> range:
        top = self.generations if upto is None else upto
        if self.side == "upper":
            return range(2, top + 1)
        return range(3, top + 1, 2)


def default_beta(alpha: float, p: float) -> float:
    """``beta_default`` in the extension range; ``-1`` when ``alpha <= alpha_critical``."""
    if alpha <= ex.alpha_critical():
        return -1.0
    return ex.beta_default(alpha, p)


def peak_height(n, alpha: float):
    """``T_n = (1 / (2 3**n))**alpha``."""
    return np.exp(-alpha * (np.log(2.0) + np.asarray(n) * np.log(3.0)))


def amplitude(params: WitnessParams, n: int) -> float:
    """``3**(n alpha beta) (1 / (n log n))**alpha_p``."""
    if n < 2:
        return 0.0
    a = params.alpha
    return math.exp(n * a * params.beta * math.log(3.0) - params.alpha_p * math.log(n * math.log(n)))


# --------------------------------------------------------------------------
# Profiles in x2
# --------------------------------------------------------------------------

def _plus_levels(alpha: float, n):
    T = peak_height(n, alpha)
    return (3.0 ** -alpha) * T, (0.5 ** alpha) * T, ((2.0 / 3.0) ** alpha) * T, T


def v_plus_profile(x2, n, alpha: float):
    """The plateau-with-ramps profile of the generation-``n`` slab as a function of ``x2``."""
    x2 = np.asarray(x2, dtype=float)
    b0, b1, b2, T = _plus_levels(alpha, n)
    up = (x2 - b0) / (b1 - b0)
    down = (T - x2) / (T - b2)
    out = np.where((x2 >= b1) & (x2 <= b2), 1.0, 0.0)
    out = np.where((x2 > b0) & (x2 < b1), up, out)
    out = np.where((x2 > b2) & (x2 < T), down, out)
    return out


def v_plus_slopes(alpha: float, n: int) -> tuple[float, float]:
    """``|dv/dx2|`` on the lower and upper ramps."""
    b0, b1, b2, T = _plus_levels(alpha, n)
    return 1.0 / (b1 - b0), 1.0 / (T - b2)


def v_minus_profile(x2, n, alpha: float):
    x2 = np.asarray(x2, dtype=float)
    T = peak_height(n, alpha)
    lo, hi = (1.0 / 9.0) ** alpha * T, (1.0 / 6.0) ** alpha * T
    return np.clip((x2 - lo) / (hi - lo), 0.0, 1.0)


def slab_generation(x2, alpha: float):
    """Generation ``n`` with ``T_{n+1} < x2 <= T_n`` (0 where ``x2 > T_1`` or ``x2 <= 0``)."""
    x2 = np.asarray(x2, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        nu = (-np.log(x2) / alpha - np.log(2.0)) / np.log(3.0)
    n = np.floor(nu)
    n = np.where(np.isfinite(n) & (x2 > 0), n, -1).astype(np.int64)
    # the logarithm can land one slab off at the edges; settle with direct comparisons
    n = np.where(x2 <= peak_height(np.maximum(n + 1, 0), alpha), n + 1, n)
    n = np.where(x2 > peak_height(np.maximum(n, 0), alpha), n - 1, n)
    return np.where(n >= 1, n, 0)


# --------------------------------------------------------------------------
# Left windows U^l_{n,k}
# --------------------------------------------------------------------------

def left_neighbour(iv: CantorInterval) -> CantorInterval | None:
    """The nearest removed interval of an earlier generation to the left of ``iv``."""
    span = Fraction(1, 3 ** (iv.n - 1))
    c = iv.a.to_fraction() - span / 3          # left end of the parent surviving interval
    if c == 0:
        return None
    # c is the right end b of a removed interval whose generation is the level of c
    m = round(math.log(c.denominator, 3))
    return geo.locate(c - Fraction(1, 2 * 3 ** m), m).interval


def left_window(iv: CantorInterval) -> tuple[Fraction, Fraction] | None:
    """``(q_{n1}^{k1}, q_n^k)`` for ``k > 1``; ``None`` for the leftmost interval."""
    nb = left_neighbour(iv)
    if nb is None:
        return None
    return nb.midpoint, iv.midpoint


def _in_left_window_scalar(x1: Fraction, n: int) -> bool:
    where = geo.surviving_interval(x1, n - 1)
    if where is None:
        return False
    if isinstance(where, CantorInterval):
        return x1 > where.midpoint
    left, right = where
    mid = (left.to_fraction() + right.to_fraction()) / 2
    return left.to_fraction() > 0 and x1 < mid


def in_left_window_array(x1, n):
    """Vectorised membership of ``x1`` in some ``U^l_{n,k}`` (``k > 1``) x-range."""
    x1 = np.asarray(x1, dtype=float)
    n = np.broadcast_to(np.asarray(n), x1.shape)
    out = np.zeros(x1.shape, dtype=bool)
    inside = (x1 >= 0) & (x1 <= 1) & (n >= 2)
    y = np.where(inside, x1, 0.0)
    nonzero = np.zeros(x1.shape, dtype=bool)
    active = inside.copy()
    top = int(n[inside].max()) if inside.any() else 0
    for level in range(1, top):
        live = active & (level <= n - 1)
        if not live.any():
            break
        y3 = 3.0 * y
        d = np.floor(y3)
        removed = live & (d == 1.0)
        out[removed] = y3[removed] - 1.0 > 0.5
        active &= ~removed
        step = live & ~removed
        nonzero |= step & (d > 0)
        y = np.where(step, y3 - np.minimum(d, 2.0), y)
    out |= active & nonzero & (y < 0.5)
    return out


# --------------------------------------------------------------------------
# Evaluation
# --------------------------------------------------------------------------

def _above_graph(profile: CuspProfile, p: PlanePoint) -> bool:
    return p.x2 > psi(profile, p.x1).hi


def eval_v_plus(params: WitnessParams, x: PlanePoint) -> float:
    profile = CuspProfile(params.alpha)
    if not _above_graph(profile, x):
        return 0.0
    n = int(slab_generation(x.x2, params.alpha))
    if n < 2 or n > params.generations:
        return 0.0
    if not _in_left_window_scalar(geo.to_fraction(x.x1), n):
        return 0.0
    return float(v_plus_profile(x.x2, n, params.alpha))


def eval_u_plus(params: WitnessParams, x: PlanePoint) -> float:
    v = eval_v_plus(params, x)
    if v == 0.0:
        return 0.0
    return amplitude(params, int(slab_generation(x.x2, params.alpha))) * v


def eval_u_minus(params: WitnessParams, x: PlanePoint) -> float:
    """``u_minus``: nonzero only inside odd-generation cusps ``0 < x2 < psi(x1)``."""
    if x.x2 <= 0:
        return 0.0
    loc = geo.locate(x.x1, min(params.generations, geo.N_MAX))
    if not isinstance(loc, InRemovedInterval):
        return 0.0
    n = loc.interval.n
    if n % 2 == 0 or n < 3:
        return 0.0
    profile = CuspProfile(params.alpha)
    if not x.x2 < psi(profile, x.x1).lo:
        return 0.0
    return amplitude(params, n) * float(v_minus_profile(x.x2, n, params.alpha))


def u_plus_array(params: WitnessParams, x1, x2, psi_vals=None):
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    profile = CuspProfile(params.alpha)
    ps = profile.psi_array(x1) if psi_vals is None else np.broadcast_to(psi_vals, x1.shape)
    n = slab_generation(x2, params.alpha)
    ok = (x2 > ps) & (n >= 2) & (n <= params.generations)
    ok &= in_left_window_array(x1, np.where(ok, n, 0))
    out = np.zeros(x1.shape)
    if ok.any():
        nn = n[ok]
        amps = np.array([amplitude(params, int(k)) for k in range(params.generations + 1)])
        out[ok] = amps[nn] * v_plus_profile(x2[ok], nn, params.alpha)
    return out


def u_minus_array(params: WitnessParams, x1, x2, psi_vals=None):
    x1, x2 = np.broadcast_arrays(np.asarray(x1, float), np.asarray(x2, float))
    d, gen, _ = geo.dist_to_cantor_array(x1)
    ps = np.where((x1 > 0) & (x1 < 1), d ** params.alpha, 0.0) if psi_vals is None \
        else np.broadcast_to(psi_vals, x1.shape)
    ok = (x2 > 0) & (x2 < ps) & (gen >= 3) & (gen % 2 == 1) & (gen <= params.generations)
    out = np.zeros(x1.shape)
    if ok.any():
        g = gen[ok]
        amps = np.array([amplitude(params, int(k)) for k in range(params.generations + 1)])
        out[ok] = amps[g] * v_minus_profile(x2[ok], g, params.alpha)
    return out


def gradient_bound(params: WitnessParams, n: int) -> float:
    """Explicit ``C 3**(n alpha (beta + 1)) (n log n)**-alpha_p`` bounding ``|Du|`` in generation ``n``."""
    a = params.alpha
    if params.side == "upper":
        C = 2.0 ** a / min(0.5 ** a - (1.0 / 3.0) ** a, 1.0 - (2.0 / 3.0) ** a)
    else:
        C = 2.0 ** a / ((1.0 / 6.0) ** a - (1.0 / 9.0) ** a)
    return C * 3.0 ** (n * a * (params.beta + 1.0)) * (n * math.log(n)) ** (-params.alpha_p)


def cusp_cross_section(n: int, k: int, x2: float, alpha: float) -> float:
    """Length of the horizontal chord at height ``x2`` through the generation-``n`` cusp."""
    top = (0.5 * 3.0 ** -n) ** alpha
    if not 0.0 < x2 < top:
        return 0.0
    return 3.0 ** -n - 2.0 * x2 ** (1.0 / alpha)


# --------------------------------------------------------------------------
# Series
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class Convergent:
    tail_bound: float


@dataclass(frozen=True)
class DivergentSeries:
    witness: str
    factor: float


@dataclass
class SeriesReport:
    generations: list[int]
    terms: list[float]
    partial_sums: list[float]
    factor: float
    log_exponent: float
    verdict: Convergent | DivergentSeries
    asymptotic_constant: float | None = None
    asymptotic_range: tuple[float, float] | None = None

    @property
    def convergent(self) -> bool:
        return isinstance(self.verdict, Convergent)

    @property
    def total(self) -> float:
        return self.partial_sums[-1] if self.partial_sums else 0.0

    @property
    def relative_tail(self) -> float:
        if not self.convergent:
            return math.inf
        return self.verdict.tail_bound / self.total if self.total > 0 else 0.0

    def to_dict(self) -> dict:
        v = self.verdict
        out = {
            "factor": self.factor,
            "log_exponent": self.log_exponent,
            "generations": self.generations,
            "terms": self.terms,
            "partial_sums": self.partial_sums,
            "asymptotic_constant": self.asymptotic_constant,
            "asymptotic_range": list(self.asymptotic_range) if self.asymptotic_range else None,
        }
        if isinstance(v, Convergent):
            out.update(verdict="convergent", tail_bound=v.tail_bound)
        else:
            out.update(verdict="divergent", witness=v.witness)
        return out


def _log_terms(ns, log_g: float, s: float) -> np.ndarray:
    ns = np.asarray(list(ns), dtype=float)
    return ns * log_g - s * np.log(ns * np.log(ns))


def _series(ns, log_g: float, s: float, odd_only: bool) -> SeriesReport:
    """``sum g**n (n log n)**-s`` with a rigorous tail bound after the last ``n``."""
    ns = list(ns)
    lt = _log_terms(ns, log_g, s)
    terms = np.exp(np.minimum(lt, 709.0)).tolist()
    partial = np.cumsum(terms).tolist()
    g = math.exp(log_g)
    N = ns[-1]
    if g > 1.0 + UNIT_FACTOR_TOL:
        verdict = DivergentSeries(f"geometric factor {g:.12g} > 1", g)
    elif abs(g - 1.0) <= UNIT_FACTOR_TOL:
        if s <= 1.0:
            verdict = DivergentSeries(f"unit factor with (n log n)^-{s:.12g}, s <= 1", g)
        else:
            # sum_{n>N} (n log n)^-s <= int_N^inf (x log x)^-s dx <= N^(1-s) / ((s-1) (log N)^s)
            verdict = Convergent(N ** (1.0 - s) / ((s - 1.0) * math.log(N) ** s))
    else:
        step = 2 if odd_only else 1
        n_next = N + step
        t_next = math.exp(n_next * log_g - s * math.log(n_next * math.log(n_next)))
        verdict = Convergent(t_next / (1.0 - g ** step))
    return SeriesReport(ns, terms, partial, g, log_g, verdict)


@dataclass
class WitnessNormReport:
    value: SeriesReport       # sum for ||u||_p^p
    gradient: SeriesReport    # sum for ||Du||_p^p
    params: WitnessParams

    @property
    def convergent(self) -> bool:
        return self.value.convergent and self.gradient.convergent

    def to_dict(self) -> dict:
        return {"alpha": self.params.alpha, "p": self.params.p, "beta": self.params.beta,
                "side": self.params.side, "alpha_p": self.params.alpha_p,
                "verdict": "convergent" if self.convergent else "divergent",
                "value_series": self.value.to_dict(),
                "gradient_series": self.gradient.to_dict()}


def witness_sobolev_norm(params: WitnessParams) -> WitnessNormReport:
    """Series majorising ``||u||_p^p`` and ``||Du||_p^p`` generation by generation.

    Generation ``n`` contributes ``2**n 3**(n (beta alpha p - alpha - 1))`` (values) and
    ``2**n 3**(n (alpha p (beta + 1) - alpha - 1))`` (gradients), each times
    ``(n log n)**-(alpha_p p)``.
    """
    a, p, b = params.alpha, params.p, params.beta
    s = params.alpha_p * p
    ns = params.generations_used()
    odd = params.side == "lower"
    log3 = math.log(3.0)
    log_g_val = math.log(2.0) + (b * a * p - a - 1.0) * log3
    log_g_grad = math.log(2.0) + (a * p * (b + 1.0) - a - 1.0) * log3
    return WitnessNormReport(_series(ns, log_g_val, s, odd), _series(ns, log_g_grad, s, odd), params)


def in_sharpness_regime(alpha: float, p: float, q: float) -> str | None:
    """Name of the sharpness statement covering ``(alpha, p, q)``, or ``None``."""
    if alpha <= ex.alpha_critical():
        return "small_alpha" if q >= 1 else None
    pl = ex.p_lower(alpha)
    if p <= pl * (1 + ex.GUARD):
        return "small_p" if abs(q - 1.0) <= 1e-12 else None
    if q >= ex.q_upper(alpha, p) * (1 - ex.GUARD):
        return "large_q"
    return None


ASYMPTOTIC_WINDOW = (50, 200)


def divergence_witness(params: WitnessParams, q: float) -> SeriesReport:
    """Lower-bound series for ``int_{D(0,2)} |D E(u)|^q`` over any extension ``E(u)``.

    Terms are ``2**n 3**(alpha (n beta q - n) + n (q - 1)) (n log n)**-(alpha_p q)``.
    """
    regime = in_sharpness_regime(params.alpha, params.p, q)
    if regime is None:
        raise RegimeError(f"(alpha={params.alpha}, p={params.p}, q={q}) is in the extension range")
    a, b = params.alpha, params.beta
    s = params.alpha_p * q
    log_g = math.log(ex.sharp_pair_factor(a, params.p, b, q))
    rep = _series(params.generations_used(), log_g, s, params.side == "lower")
    if not isinstance(rep.verdict, DivergentSeries):
        raise RegimeError(f"lower-bound series converges for q={q} (factor {rep.factor}, s={s})")
    lo, hi = ASYMPTOTIC_WINDOW
    ns = np.arange(lo, hi + 1, dtype=float)
    # t_n (n log n)**s = g**n
    scaled = np.exp(_log_terms(ns, log_g, s) + s * np.log(ns * np.log(ns)))
    rep.asymptotic_range = (float(scaled.min()), float(scaled.max()))
    rep.asymptotic_constant = float(scaled[-1]) if abs(rep.factor - 1) <= UNIT_FACTOR_TOL else None
    return rep


# --------------------------------------------------------------------------
# Gradient energy of the reflection extension of u_plus
# --------------------------------------------------------------------------

_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(24)


def _gauss(f, a: float, b: float) -> float:
    if b <= a:
        return 0.0
    x = 0.5 * (b - a) * _GL_NODES + 0.5 * (a + b)
    return 0.5 * (b - a) * float(np.dot(_GL_WEIGHTS, f(x)))


def _removed_in_window(lo: float, hi: float, max_gen: int):
    """Removed intervals of generation ``<= max_gen`` meeting ``(lo, hi)`` as float ``(a, b)`` pairs."""
    out = []
    stack = [(0.0, 1.0, 0)]
    while stack:
        left, right, level = stack.pop()
        if right <= lo or left >= hi or level >= max_gen:
            continue
        third = (right - left) / 3.0
        a, b = left + third, left + 2.0 * third
        if b > lo and a < hi:
            out.append((a, b))
        stack.append((left, a, level + 1))
        stack.append((b, right, level + 1))
    return out


def _overlap(lo, hi, a, b):
    return np.clip(np.minimum(hi, b) - np.maximum(lo, a), 0.0, None)


def extension_gradient_energy(params: WitnessParams, q: float, generations: int | None = None,
                              per_generation: bool = False):
    """``int |D E(u_plus)|^q`` over the plane for the reflection extension ``E``.

    Uses ``u = c_n v(x2)`` on each window, so ``Du = (0, c_n v')``.  The lower
    half is pulled back onto the upper one by the change of variables
    ``x = R^{-1}(y)``: in an upper rectangle ``|D(u o R)(x)| = |c_n v'| sqrt(1 + 16 psi'^2) / 3``
    with ``dx = 3 dy``, elsewhere the mirror keeps ``|Du|`` and the area.
    The remaining ``x1`` integrals are done with Gauss-Legendre on pieces cut at
    every point where ``psi`` or ``2 psi`` crosses a ramp boundary.
    """
    if params.side != "upper":
        raise ValueError("extension_gradient_energy is implemented for the upper witness")
    a = params.alpha
    N = params.generations if generations is None else generations
    extra = int(math.floor(ex.cantor_dimension() / a)) + 1
    totals = {}
    for n in range(2, N + 1):
        c = amplitude(params, n)
        b0, b1, b2, T = _plus_levels(a, n)
        s_lo, s_hi = v_plus_slopes(a, n)
        ramps = [(b0, b1, s_lo), (b2, T, s_hi)]
        energy = 0.0
        for iv in iter_left_windows(n):
            w_lo, w_hi = (float(v) for v in iv)
            removed = _removed_in_window(w_lo, w_hi, n + extra)
            covered = 0.0
            for (ra, rb) in removed:
                lo, hi = max(ra, w_lo), min(rb, w_hi)
                covered += hi - lo
                energy += _rectangle_energy(a, q, c, ramps, ra, rb, lo, hi)
            # outside the relevant cusps psi is below every ramp's half-height: upper + mirror
            base = sum(2.0 * (top - bot) * (c * s) ** q for bot, top, s in ramps)
            energy += base * (w_hi - w_lo - covered)
        totals[n] = energy
    if per_generation:
        return totals
    return math.fsum(totals.values())


def iter_left_windows(n: int):
    for k in range(2, 2 ** (n - 1) + 1):
        yield left_window(geo.interval_from_prefix(n, k))


def _rectangle_energy(alpha, q, c, ramps, ra, rb, lo, hi) -> float:
    mid = 0.5 * (ra + rb)

    def psi_and_slope(x):
        t = np.maximum(np.minimum(x - ra, rb - x), 1e-300)
        return t ** alpha, alpha * t ** (alpha - 1.0)

    def integrand(x):
        ps, dps = psi_and_slope(x)
        total = np.zeros_like(x)
        stretch = 3.0 ** (1.0 - q) * (1.0 + 16.0 * dps ** 2) ** (q / 2.0)
        for bot, top, s in ramps:
            w = (c * s) ** q
            above = _overlap(bot, top, ps, np.inf)           # upper side
            rect = _overlap(bot, top, ps, 2.0 * ps)          # images in the lower rectangle
            mirror = _overlap(bot, top, np.maximum(ps, 2.0 * ps), np.inf)
            total += w * (above + np.where(rect > 0, stretch * rect, 0.0) + mirror)
        return total

    cuts = {lo, hi, mid}
    for bot, top, _ in ramps:
        for level in (bot, top, 0.5 * bot, 0.5 * top):
            t = level ** (1.0 / alpha)
            cuts.update((ra + t, rb - t))
    pts = sorted(x for x in cuts if lo <= x <= hi)
    return math.fsum(_gauss(integrand, u, v) for u, v in zip(pts, pts[1:]))
