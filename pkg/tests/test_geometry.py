from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

from cantorcusp import geometry as geo
from oracles import brute_distance, brute_removed


def as_pairs(ivs):
    return [(iv.a.to_fraction(), iv.b.to_fraction()) for iv in ivs]


def test_first_generations():
    assert as_pairs(geo.removed_intervals(1)) == [(Fraction(1, 3), Fraction(2, 3))]
    assert as_pairs(geo.removed_intervals(2)) == [(Fraction(1, 9), Fraction(2, 9)),
                                                  (Fraction(7, 9), Fraction(8, 9))]
    third = geo.removed_intervals(3)
    assert len(third) == 4
    assert (third[0].a, third[0].b) == (Fraction(1, 27), Fraction(2, 27))


@pytest.mark.parametrize("n", range(1, 9))
def test_matches_brute_force_construction(n):
    assert as_pairs(geo.removed_intervals(n)) == brute_removed(n)


@pytest.mark.parametrize("n", [1, 5, 12, 20])
def test_numerators_agree_with_intervals(n):
    starts = geo.removed_numerators(n)
    assert starts.size == 2 ** (n - 1)
    assert np.all(np.diff(starts) > 0)
    for k in (1, 2 ** (n - 1), (2 ** (n - 1) + 1) // 2):
        iv = geo.interval_from_prefix(n, k)
        assert iv.a == Fraction(int(starts[k - 1]), 3 ** n)


def test_removed_length_identity():
    for n in range(1, 25):
        assert geo.total_removed_length(n) == 1 - Fraction(2, 3) ** n


def test_generation_bounds():
    with pytest.raises(geo.GeometryError):
        geo.removed_intervals(0)
    with pytest.raises(geo.GeometryError):
        geo.interval_from_prefix(3, 5)
    with pytest.raises(geo.GeometryError):
        geo.removed_numerators(geo.INT64_GENERATIONS + 1)


def test_triadic_canonical_form_and_arithmetic():
    x = geo.TriadicRational(9, 3)
    assert (x.numerator, x.level) == (1, 1)
    y = geo.TriadicRational(2, 2)
    assert (x + y).to_fraction() == Fraction(5, 9)
    assert (x - y) == Fraction(1, 9)
    assert -x < y
    assert hash(geo.TriadicRational(3, 1)) == hash(geo.TriadicRational(1, 0))


def test_locate_examples():
    loc = geo.locate(0.5, 5)
    assert isinstance(loc, geo.InRemovedInterval)
    assert (loc.interval.n, loc.interval.k) == (1, 1)
    # 1/4 = 0.020202..._3 never hits digit 1
    assert isinstance(geo.locate(Fraction(1, 4), 40), geo.InCantorSet)
    assert isinstance(geo.locate(0.25, 40), geo.InCantorSet)
    assert isinstance(geo.locate(Fraction(1, 3)), geo.InCantorSet)
    assert isinstance(geo.locate(Fraction(2, 3)), geo.InCantorSet)
    assert isinstance(geo.locate(1.5), geo.OutsideUnitInterval)
    assert isinstance(geo.locate(-0.1), geo.OutsideUnitInterval)


def test_locate_undecided_at_small_depth():
    x = Fraction(1, 3 ** 10) + Fraction(1, 2 * 3 ** 11)   # inside a generation-11 interval
    loc = geo.locate(x, 5)
    assert isinstance(loc, geo.UndecidedAtDepth)
    left = loc.left.to_fraction()
    assert left <= x <= left + Fraction(1, 3 ** 5)
    assert isinstance(geo.locate(x, 12), geo.InRemovedInterval)


def test_distance_examples():
    assert geo.dist_to_cantor(Fraction(2, 5), 10).lo == Fraction(1, 15)
    assert geo.dist_to_cantor(Fraction(2, 5), 10).exact
    # float 0.4 is the binary rational nearest 2/5
    d = geo.dist_to_cantor(0.4, 10)
    assert d.exact and d.lo == Fraction(0.4) - Fraction(1, 3)
    assert brute_distance(Fraction(2, 5), 10) == Fraction(1, 15)


@given(st.fractions(min_value=0, max_value=1, max_denominator=3 ** 8 * 7))
def test_distance_within_brute_force(x):
    bound = geo.dist_to_cantor(x, 9)
    ref = brute_distance(x, 9)       # distance to a superset of C: a lower bound on d(x, C)
    assert bound.lo >= ref or bound.lo == ref
    assert bound.hi >= bound.lo


@given(st.integers(1, 12), st.data())
def test_locate_finds_points_inside_intervals(n, data):
    k = data.draw(st.integers(1, 2 ** (n - 1)))
    iv = geo.interval_from_prefix(n, k)
    t = data.draw(st.fractions(min_value=0, max_value=1).filter(lambda v: 0 < v < 1))
    x = iv.a.to_fraction() + t * (iv.b.to_fraction() - iv.a.to_fraction())
    loc = geo.locate(x, n)
    assert isinstance(loc, geo.InRemovedInterval)
    assert (loc.interval.n, loc.interval.k) == (n, k)
    assert geo.dist_to_cantor(x, n).lo == min(x - iv.a.to_fraction(), iv.b.to_fraction() - x)


def test_surviving_interval():
    assert geo.surviving_interval(0.1, 1) == (geo.TriadicRational(0), geo.TriadicRational(1, 1))
    assert isinstance(geo.surviving_interval(0.5, 1), geo.CantorInterval)
    assert geo.surviving_interval(2.0, 3) is None


def test_array_distance_matches_exact():
    rng = np.random.default_rng(3)
    xs = rng.uniform(-0.5, 1.5, 2000)
    d, gen, _ = geo.dist_to_cantor_array(xs)
    for x, dv, g in zip(xs[:300], d[:300], gen[:300]):
        exact = geo.dist_to_cantor(float(x), 33)
        assert float(exact.lo) - 1e-15 <= dv <= float(exact.hi) + 1e-15
        loc = geo.locate(float(x), 33)
        if isinstance(loc, geo.InRemovedInterval):
            assert g == loc.interval.n
