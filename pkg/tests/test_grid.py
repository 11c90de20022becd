import numpy as np
import pytest

from cantorcusp import grid as G
from cantorcusp import witnesses as wt
from cantorcusp.profile import CuspProfile

P5 = CuspProfile(0.5)
P7 = CuspProfile(0.7)


def one(x1, x2):
    return np.ones_like(x1)


def first(x1, x2):
    return x1


def second(x1, x2):
    return x2


def brute_psi(x, alpha, depth=16):
    """psi from an explicit list of removed intervals (no ternary digit logic)."""
    ivs = [(0.0, 1.0)]
    lefts, rights = [], []
    for _ in range(depth):
        nxt = []
        for a, b in ivs:
            t = (b - a) / 3
            lefts.append(a + t)
            rights.append(a + 2 * t)
            nxt += [(a, a + t), (a + 2 * t, b)]
        ivs = nxt
    lefts, rights = np.array(lefts), np.array(rights)
    order = np.argsort(lefts)
    lefts, rights = lefts[order], rights[order]
    i = np.searchsorted(lefts, x) - 1
    inside = (i >= 0) & (x < rights[np.clip(i, 0, None)])
    d = np.where(inside, np.minimum(x - lefts[np.clip(i, 0, None)], rights[np.clip(i, 0, None)] - x), 0.0)
    return np.where((x > 0) & (x < 1), d ** alpha, 0.0)


def test_sample_constants_and_coordinates():
    g = G.sample(P7, one, (0, 1, 0, 1), 2 ** -6, "upper")
    assert np.all(g.values[g.in_domain()] == 1.0)
    g = G.sample(P7, first, (0, 1, 0, 1), 2 ** -6, "upper")
    xs, _ = g.centers()
    cols = np.broadcast_to(xs[None, :], g.shape)
    assert np.array_equal(g.values[g.in_domain()], cols[g.in_domain()])


def test_mask_codes_follow_classification():
    h = 2 ** -7
    g = G.sample(P7, one, (0, 1, -0.5, 1), h, "lower")
    xs, ys = g.centers()
    ps = P7.psi_array(xs)
    diff = ys[:, None] - ps[None, :]
    assert np.all(diff[g.mask == G.IN_DOMAIN] < -h)
    assert np.all(np.abs(diff[g.mask == G.GRAPH_BAND]) <= h)
    assert np.all(diff[g.mask == G.OUTSIDE] > h)


@pytest.mark.parametrize("alpha", [0.5, 0.7])
def test_mask_area_against_monte_carlo(alpha):
    g = G.sample(CuspProfile(alpha), one, (0, 1, 0, 1), 2 ** -10, "upper")
    rng = np.random.default_rng(11)
    x1, x2 = rng.uniform(0, 1, 400_000), rng.uniform(0, 1, 400_000)
    mc = np.mean(x2 > brute_psi(x1, alpha))
    assert g.area() == pytest.approx(mc, rel=0.02)


def smooth_block():
    bbox = (0.0, 1.0, 1.5, 2.5)                   # entirely above the graph
    return bbox


def test_gradient_of_constant_and_linear():
    bbox = smooth_block()
    g = G.sample(P7, one, bbox, 2 ** -5, "upper")
    gx, gy = G.weak_gradient(g)
    assert np.all(gx.values == 0) and np.all(gy.values == 0)
    g = G.sample(P7, first, bbox, 2 ** -5, "upper")
    gx, gy = G.weak_gradient(g)
    assert np.allclose(gx.values[gx.central], 1.0, atol=1e-12)
    assert np.all(gy.values == 0)


def test_gradient_second_order():
    bbox = smooth_block()
    f = lambda x1, x2: np.sin(x1) * np.cos(x2)  # noqa: E731
    errs = []
    for h in (2 ** -5, 2 ** -6):
        g = G.sample(P7, f, bbox, h, "upper")
        gx, gy = G.weak_gradient(g)
        xs, ys = g.centers()
        X, Y = np.meshgrid(xs, ys)
        c = gx.central & gy.central
        errs.append(max(np.max(np.abs(gx.values - np.cos(X) * np.cos(Y))[c]),
                        np.max(np.abs(gy.values + np.sin(X) * np.sin(Y))[c])))
    assert errs[0] / errs[1] == pytest.approx(4.0, rel=0.05)


def test_gradient_needs_three_cells():
    g = G.GridFunction((0, 2, 0, 2), 1.0, np.zeros((2, 2)), np.ones((2, 2), np.int8), "upper")
    with pytest.raises(G.GridError):
        G.weak_gradient(g)


def test_one_sided_differences_at_domain_edge():
    g = G.sample(P7, first, (-0.5, 1.5, -0.5, 1.5), 2 ** -6, "upper")
    gx, _ = G.weak_gradient(g)
    edge = (gx.mask == G.IN_DOMAIN) & ~gx.central
    assert edge.any()
    assert np.allclose(gx.values[edge], 1.0, atol=1e-12)


def test_extend_reproduces_constants_and_x1():
    h = 2 ** -7
    g = G.sample(P7, one, (-0.5, 1.5, -0.5, 1.5), h, "upper")
    e = G.extend(P7, g)
    assert np.all(e.values[e.in_domain()] == 1.0)
    g = G.sample(P7, first, (-0.5, 1.5, -0.5, 1.5), h, "upper")
    e = G.extend(P7, g)
    xs, _ = e.centers()
    cols = np.broadcast_to(xs[None, :], e.shape)
    assert np.max(np.abs(e.values - cols)[e.in_domain()]) <= 1e-12
    # source side copied exactly
    src = g.in_domain()
    assert np.array_equal(e.values[src], g.values[src])


def test_extend_value_at_lower_point():
    h = 1e-3
    bbox = (0.4 - 0.5 * h - 200 * h, 0.4 - 0.5 * h + 200 * h, 0.1 - 0.5 * h - 500 * h, 0.1 - 0.5 * h + 500 * h)
    g = G.sample(P5, second, bbox, h, "upper")
    e = G.extend(P5, g)
    xs, ys = e.centers()
    i, j = np.argmin(np.abs(xs - 0.4)), np.argmin(np.abs(ys - 0.1))
    assert (xs[i], ys[j]) == pytest.approx((0.4, 0.1), abs=1e-12)
    expected = -0.1 / 3 + 4 * np.sqrt(1 / 15) / 3
    assert expected == pytest.approx(0.31093185299621483, rel=1e-14)
    assert e.values[j, i] == pytest.approx(expected, abs=1e-9)


def test_extend_marks_images_outside_bbox():
    h = 2 ** -6
    g = G.sample(P7, one, (0, 1, -1.0, 0.5), h, "upper")
    e = G.extend(P7, g)
    _, ys = e.centers()
    # below the graph and away from the rectangles the mirror sends x2 to -x2 > 0.5
    assert np.all(e.mask[ys < -0.5 - h] == G.OUTSIDE)
    # lower-rectangle images reach 4 psi / 3 + |x2| / 3 <= 0.45 for x2 > -0.2
    assert np.all(e.mask[(ys > -0.2) & (ys < 0.5)] == G.IN_DOMAIN)


def test_norms_of_constant():
    g = G.sample(P7, one, (0, 2, 0, 2), 2 ** -6, "upper")
    e = G.extend(P7, g)
    for p in (1.0, 2.0, 3.5):
        rep = G.sobolev_norm(e, p, (0, 2, 0, 2))
        assert rep.lp_norm == pytest.approx(4 ** (1 / p), rel=1e-12)
        assert rep.gradient_lp_norm == 0.0
        assert rep.sobolev_norm == rep.lp_norm + rep.gradient_lp_norm
    assert G.sobolev_norm(e, np.inf).lp_norm == 1.0


def test_norm_monotone_in_window():
    f = G.smooth_bump((0.5, 0.5), 1.0)
    e = G.extend(P7, G.sample(P7, f, (-0.5, 1.5, -0.5, 1.5), 2 ** -7, "upper"))
    big = G.sobolev_norm(e, 1.5)
    small = G.sobolev_norm(e, 1.5, (0, 1, -0.25, 0.75))
    assert small.sobolev_norm <= big.sobolev_norm


def test_norm_errors():
    g = G.sample(P7, one, (0, 1, 0, 1), 2 ** -5, "upper")
    with pytest.raises(G.GridError):
        G.sobolev_norm(g, 0.5)
    with pytest.raises(G.GridError):
        G.sobolev_norm(g, 2, (0, 2, 0, 1))
    with pytest.raises(G.GridError):
        G.sobolev_norm(g, 2, (0.3, 0.4, 0.0, 0.01))
    with pytest.raises(G.GridError):
        G.sample(P7, one, (0, 1, 0, 1), 0.3, "upper")
    with pytest.raises(G.GridError):
        G.sample(P7, one, (0, 1, 0, 1), 0.25, "sideways")


def test_bump_extension_ratio_refinement():
    f = G.smooth_bump((0.5, 0.5), 1.0)
    bbox = (-0.5, 1.5, -0.5, 1.5)
    r8 = G.extension_ratio(P7, f, 2, 1.2, bbox, 2 ** -8)
    r9 = G.extension_ratio(P7, f, 2, 1.2, bbox, 2 ** -9)
    assert np.isfinite(r8) and abs(r9 - r8) / r8 < 0.25


def test_witness_ratio_keeps_growing_above_threshold():
    par = wt.WitnessParams(0.7, 2.0, generations=8)
    f = lambda a, b: wt.u_plus_array(par, a, b)  # noqa: E731
    bbox = (-0.5, 1.5, -0.5, 1.5)
    sharp = [G.extension_ratio(P7, f, 2, 1.5, bbox, 2.0 ** -k) for k in (6, 7, 8, 9)]
    mild = [G.extension_ratio(P7, f, 2, 1.2, bbox, 2.0 ** -k) for k in (6, 7, 8, 9)]
    assert all(b > a for a, b in zip(sharp, sharp[1:]))
    assert sharp[-1] / sharp[0] > mild[-1] / mild[0]


@pytest.mark.parametrize("fmt", ["bin", "csv"])
def test_grid_file_roundtrip(tmp_path, fmt):
    g = G.sample(P7, G.smooth_bump(), (-0.5, 1.5, -0.5, 1.5), 2 ** -5, "upper")
    path = G.save_grid(g, tmp_path / "u.json", fmt)
    back = G.load_grid(path)
    assert back.bbox == g.bbox and back.h == g.h and back.side == "upper" and back.alpha == 0.7
    assert np.array_equal(back.values, g.values) and np.array_equal(back.mask, g.mask)
