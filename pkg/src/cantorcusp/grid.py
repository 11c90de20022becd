"""Grid discretisation of Sobolev functions on either side of the graph.

Functions are sampled at cell centres of a uniform grid.  Each cell carries a
mask code: inside the requested domain, outside it, or within one grid step of
the graph (the graph band).  Norms are cell-sum quadratures; gradients are
finite differences restricted to in-domain neighbours.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Callable

import numpy as np
from scipy import ndimage

from .profile import CuspProfile
from .reflection import reflect_array

OUTSIDE, IN_DOMAIN, GRAPH_BAND = 0, 1, 2
SIDES = ("upper", "lower")


class GridError(ValueError):
    pass


@dataclass
class GridFunction:
    bbox: tuple[float, float, float, float]     # (x_min, x_max, y_min, y_max)
    h: float
    values: np.ndarray                          # shape (ny, nx); row j is y = y_min + (j + 1/2) h
    mask: np.ndarray
    side: str | None = None
    alpha: float | None = None

    @property
    def shape(self) -> tuple[int, int]:
        return self.values.shape

    def centers(self):
        """1-D arrays of cell-centre abscissae and ordinates."""
        x_min, _, y_min, _ = self.bbox
        ny, nx = self.shape
        return (x_min + (np.arange(nx) + 0.5) * self.h,
                y_min + (np.arange(ny) + 0.5) * self.h)

    def in_domain(self) -> np.ndarray:
        return self.mask == IN_DOMAIN

    def area(self) -> float:
        return float(self.in_domain().sum()) * self.h ** 2


def grid_shape(bbox, h: float) -> tuple[int, int]:
    x_min, x_max, y_min, y_max = bbox
    if not (h > 0 and x_max > x_min and y_max > y_min):
        raise GridError(f"need h > 0 and a nonempty bbox, got bbox={bbox}, h={h}")
    nx = (x_max - x_min) / h
    ny = (y_max - y_min) / h
    if abs(nx - round(nx)) > 1e-9 * nx or abs(ny - round(ny)) > 1e-9 * ny:
        raise GridError("bbox sides must be integer multiples of h")
    return int(round(ny)), int(round(nx))


def region_mask(profile: CuspProfile, bbox, h: float, side: str, psi_cols=None) -> np.ndarray:
    if side not in SIDES:
        raise GridError(f"side must be one of {SIDES}")
    ny, nx = grid_shape(bbox, h)
    x_min, _, y_min, _ = bbox
    xs = x_min + (np.arange(nx) + 0.5) * h
    ys = y_min + (np.arange(ny) + 0.5) * h
    ps = profile.psi_array(xs) if psi_cols is None else psi_cols
    diff = ys[:, None] - ps[None, :]
    mask = np.full((ny, nx), OUTSIDE, dtype=np.int8)
    mask[np.abs(diff) <= h] = GRAPH_BAND
    if side == "upper":
        mask[diff > h] = IN_DOMAIN
    else:
        mask[diff < -h] = IN_DOMAIN
    return mask


def sample(profile: CuspProfile, f: Callable, bbox, h: float, side: str) -> GridFunction:
    """Sample ``f(x1, x2)`` (vectorised over arrays) on the ``side`` domain inside ``bbox``."""
    bbox = tuple(float(v) for v in bbox)
    mask = region_mask(profile, bbox, h, side)
    x_min, _, y_min, _ = bbox
    ny, nx = mask.shape
    X1, X2 = np.meshgrid(x_min + (np.arange(nx) + 0.5) * h, y_min + (np.arange(ny) + 0.5) * h)
    vals = np.zeros(mask.shape)
    inside = mask == IN_DOMAIN
    vals[inside] = np.broadcast_to(f(X1[inside], X2[inside]), (int(inside.sum()),))
    return GridFunction(bbox, float(h), vals, mask, side, profile.alpha)


def _axis_difference(v: np.ndarray, ok: np.ndarray, h: float, axis: int):
    fwd_ok = np.zeros_like(ok)
    bwd_ok = np.zeros_like(ok)
    fwd = np.zeros_like(v)
    bwd = np.zeros_like(v)
    hi = [slice(None)] * 2
    lo = [slice(None)] * 2
    hi[axis] = slice(1, None)
    lo[axis] = slice(None, -1)
    hi, lo = tuple(hi), tuple(lo)
    # forward difference lives at the lower cell, backward at the upper one
    pair = ok[lo] & ok[hi]
    d = (v[hi] - v[lo]) / h
    fwd_ok[lo] = pair
    fwd[lo] = d
    bwd_ok[hi] = pair
    bwd[hi] = d
    both = fwd_ok & bwd_ok
    out = np.where(both, 0.5 * (fwd + bwd), np.where(fwd_ok, fwd, bwd))
    valid = ok & (fwd_ok | bwd_ok)
    central = ok & both
    return np.where(valid, out, 0.0), valid, central


def weak_gradient(g: GridFunction) -> tuple[GridFunction, GridFunction]:
    """Finite-difference gradient over in-domain cells.

    Central differences where both neighbours along an axis are in the domain,
    one-sided where only one is; cells with no in-domain neighbour along an
    axis are marked outside in that component.
    """
    ny, nx = g.shape
    if nx < 3 or ny < 3:
        raise GridError("weak_gradient needs at least 3 cells per axis")
    ok = g.in_domain()
    gx, vx, cx = _axis_difference(g.values, ok, g.h, axis=1)
    gy, vy, cy = _axis_difference(g.values, ok, g.h, axis=0)
    mx = np.where(vx, IN_DOMAIN, OUTSIDE).astype(np.int8)
    my = np.where(vy, IN_DOMAIN, OUTSIDE).astype(np.int8)
    out_x = replace(g, values=gx, mask=mx)
    out_y = replace(g, values=gy, mask=my)
    out_x.central = cx  # type: ignore[attr-defined]
    out_y.central = cy  # type: ignore[attr-defined]
    return out_x, out_y


def _interpolate(g: GridFunction, px: np.ndarray, py: np.ndarray, nearest_idx) -> tuple[np.ndarray, np.ndarray]:
    """Bilinear interpolation of ``g`` restricted to its in-domain cells.

    Weights of out-of-domain corners are dropped and the rest renormalised; if
    no corner is usable the nearest in-domain cell supplies the value.
    Returns ``(values, inside_bbox)``.
    """
    x_min, x_max, y_min, y_max = g.bbox
    ny, nx = g.shape
    fx = (px - x_min) / g.h - 0.5
    fy = (py - y_min) / g.h - 0.5
    snap_x = np.abs(fx - np.round(fx)) < 1e-9
    fx = np.where(snap_x, np.round(fx), fx)
    inside = (px >= x_min) & (px <= x_max) & (py >= y_min) & (py <= y_max)
    fx = np.clip(fx, 0.0, nx - 1.0)
    fy = np.clip(fy, 0.0, ny - 1.0)
    i0 = np.minimum(np.floor(fx).astype(np.int64), nx - 2) if nx > 1 else np.zeros(fx.shape, np.int64)
    j0 = np.minimum(np.floor(fy).astype(np.int64), ny - 2) if ny > 1 else np.zeros(fy.shape, np.int64)
    wx = fx - i0
    wy = fy - j0
    ok = g.in_domain()
    num = np.zeros(px.shape)
    den = np.zeros(px.shape)
    for dj, wyy in ((0, 1.0 - wy), (1, wy)):
        for di, wxx in ((0, 1.0 - wx), (1, wx)):
            jj, ii = j0 + dj, i0 + di
            w = wxx * wyy * ok[jj, ii]
            num += w * g.values[jj, ii]
            den += w
    out = np.empty(px.shape)
    good = den > 1e-12
    out[good] = num[good] / den[good]
    if (~good).any():
        jn, inn = nearest_idx
        ci = np.clip(np.round(fx[~good]).astype(np.int64), 0, nx - 1)
        cj = np.clip(np.round(fy[~good]).astype(np.int64), 0, ny - 1)
        out[~good] = g.values[jn[cj, ci], inn[cj, ci]]
    return out, inside


def extend(profile: CuspProfile, g: GridFunction) -> GridFunction:
    """Reflection extension ``E u = u o R`` of a one-sided grid function onto the whole box."""
    if g.side not in SIDES:
        raise GridError("extend needs a grid sampled on one side")
    if not g.in_domain().any():
        raise GridError("source grid has an empty domain")
    ny, nx = g.shape
    xs, ys = g.centers()
    X1, X2 = np.meshgrid(xs, ys)
    ps = np.broadcast_to(profile.psi_array(xs)[None, :], X1.shape)
    src = g.in_domain()
    # the reflection fixes x1, so the fallback prefers the nearest cell in the same column
    _, nearest = ndimage.distance_transform_edt(~src, sampling=(1.0, 1e6), return_indices=True)
    values = np.where(src, g.values, 0.0)
    mask = np.full((ny, nx), IN_DOMAIN, dtype=np.int8)

    band = g.mask == GRAPH_BAND
    other = (g.mask == OUTSIDE)
    if band.any():
        v, _ = _interpolate(g, X1[band], X2[band], nearest)
        values[band] = v
    if other.any():
        r1, r2 = reflect_array(profile, X1[other], X2[other], ps[other])
        v, inside = _interpolate(g, r1, r2, nearest)
        values[other] = np.where(inside, v, 0.0)
        sub = mask[other]
        sub[~inside] = OUTSIDE
        mask[other] = sub
    return GridFunction(g.bbox, g.h, values, mask, None, g.alpha)


@dataclass
class NormReport:
    lp_norm: float
    gradient_lp_norm: float
    sobolev_norm: float
    p: float
    window: tuple[float, float, float, float]
    cells: int = 0

    def to_dict(self) -> dict:
        return {"lp_norm": self.lp_norm, "gradient_lp_norm": self.gradient_lp_norm,
                "sobolev_norm": self.sobolev_norm, "p": self.p, "window": list(self.window),
                "cells": self.cells}


def _window_mask(g: GridFunction, window) -> np.ndarray:
    xs, ys = g.centers()
    x0, x1, y0, y1 = window
    return ((ys[:, None] >= y0) & (ys[:, None] <= y1)) & ((xs[None, :] >= x0) & (xs[None, :] <= x1))


def _lp(vals: np.ndarray, p: float, cell: float) -> float:
    if vals.size == 0:
        return 0.0
    if math.isinf(p):
        return float(np.max(np.abs(vals)))
    return float((np.sum(np.abs(vals) ** p) * cell) ** (1.0 / p))


def sobolev_norm(g: GridFunction, p: float, window=None) -> NormReport:
    """``||u||_p + ||Du||_p`` over in-domain cells whose centres lie in ``window``."""
    if p < 1:
        raise GridError("p must be >= 1")
    window = tuple(g.bbox if window is None else (float(v) for v in window))
    x0, x1, y0, y1 = window
    bx0, bx1, by0, by1 = g.bbox
    if x0 < bx0 or x1 > bx1 or y0 < by0 or y1 > by1:
        raise GridError("window must lie inside the grid bbox")
    win = _window_mask(g, window)
    cells = g.in_domain() & win
    if not cells.any():
        raise GridError("no in-domain cells in the window")
    gx, gy = weak_gradient(g)
    gmask = (gx.mask == IN_DOMAIN) | (gy.mask == IN_DOMAIN)
    gmask &= win
    grad = np.hypot(gx.values, gy.values)
    cell = g.h ** 2
    lp = _lp(g.values[cells], p, cell)
    glp = _lp(grad[gmask], p, cell)
    return NormReport(lp, glp, lp + glp, p, window, int(cells.sum()))


def extension_norms(profile: CuspProfile, f: Callable, p: float, q: float, bbox, h: float,
                    side: str = "upper", window=None) -> tuple[NormReport, NormReport]:
    """``(||E u||_{W^{1,q}(U)}, ||u||_{W^{1,p}(side cap bbox)})`` for a sampled ``f``."""
    g = sample(profile, f, bbox, h, side)
    e = extend(profile, g)
    return sobolev_norm(e, q, window), sobolev_norm(g, p)


def extension_ratio(profile: CuspProfile, f: Callable, p: float, q: float, bbox, h: float,
                    side: str = "upper", window=None) -> float:
    num, den = extension_norms(profile, f, p, q, bbox, h, side, window)
    return num.sobolev_norm / den.sobolev_norm


def smooth_bump(center=(0.5, 0.5), radius: float = 1.0):
    """``exp(1 - 1 / (1 - r**2))`` inside the disc, 0 outside (vectorised; peak value 1)."""
    cx, cy = center

    def f(x1, x2):
        r2 = ((np.asarray(x1) - cx) ** 2 + (np.asarray(x2) - cy) ** 2) / radius ** 2
        out = np.zeros(np.broadcast(x1, x2).shape)
        inside = r2 < 1.0
        out[inside] = np.exp(1.0 - 1.0 / (1.0 - r2[inside]))
        return out

    return f


# --------------------------------------------------------------------------
# Grid files: JSON header + raw little-endian row-major arrays (or CSV)
# --------------------------------------------------------------------------

def save_grid(g: GridFunction, path, fmt: str = "bin") -> Path:
    path = Path(path)
    stem = path.with_suffix("")
    ny, nx = g.shape
    header = {"alpha": g.alpha, "bbox": list(g.bbox), "h": g.h, "side": g.side,
              "shape": [ny, nx], "format": fmt}
    if fmt == "bin":
        vfile, mfile = stem.name + ".values.bin", stem.name + ".mask.bin"
        g.values.astype("<f8").tofile(path.parent / vfile)
        g.mask.astype("i1").tofile(path.parent / mfile)
    elif fmt == "csv":
        vfile, mfile = stem.name + ".values.csv", stem.name + ".mask.csv"
        np.savetxt(path.parent / vfile, g.values, delimiter=",", fmt="%.17g")
        np.savetxt(path.parent / mfile, g.mask, delimiter=",", fmt="%d")
    else:
        raise GridError(f"unknown grid format {fmt!r}")
    header.update(values=vfile, mask=mfile)
    path.write_text(json.dumps(header, indent=2, sort_keys=True) + "\n")
    return path


def load_grid(path) -> GridFunction:
    path = Path(path)
    header = json.loads(path.read_text())
    ny, nx = header["shape"]
    base = path.parent
    if header.get("format", "bin") == "bin":
        values = np.fromfile(base / header["values"], dtype="<f8").reshape(ny, nx)
        mask = np.fromfile(base / header["mask"], dtype="i1").reshape(ny, nx)
    else:
        values = np.loadtxt(base / header["values"], delimiter=",", ndmin=2)
        mask = np.loadtxt(base / header["mask"], delimiter=",", ndmin=2).astype(np.int8)
    return GridFunction(tuple(header["bbox"]), float(header["h"]), values, mask,
                        header.get("side"), header.get("alpha"))
