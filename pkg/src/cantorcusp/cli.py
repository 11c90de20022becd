"""Command-line front end: ``cantorcusp <subcommand> ...``.

Tables go out as CSV (``%.17g`` floats), reports as sorted-key JSON.  Any
invalid configuration exits with status 2 and a JSON error object on stderr;
``verify-all`` exits 1 when a check fails.
"""
from __future__ import annotations

import argparse
import csv
import json
import math
import sys
from pathlib import Path

from . import exponents as ex
from . import geometry as geo
from . import grid
from . import integrals as it
from . import io
from . import reflection as rf
from . import verify
from . import witnesses as wt
from .profile import CuspProfile, PlanePoint, psi, psi_derivative


class ConfigError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be a positive integer")
    return v


def _alpha(text: str) -> float:
    v = float(text)
    if not 0.0 < v < 1.0:
        raise argparse.ArgumentTypeError("must lie in (0, 1)")
    return v


def _range4(text: str) -> tuple[float, float, float, float]:
    parts = [float(v) for v in text.split(":")]
    if len(parts) != 4:
        raise argparse.ArgumentTypeError("expected x0:x1:y0:y1")
    return tuple(parts)  # type: ignore[return-value]


def _p_grid(text: str) -> list[float]:
    lo, hi, step = (float(v) for v in text.split(":"))
    if step <= 0 or hi < lo:
        raise argparse.ArgumentTypeError("expected lo:hi:step with step > 0 and hi >= lo")
    count = int(math.floor((hi - lo) / step + 1e-9)) + 1
    return [round(lo + i * step, 12) for i in range(count)]


def _emit(text: str, output: str | None) -> None:
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _read_columns(path: str, ncols: int) -> list[list[float]]:
    rows = []
    with open(path, newline="") as fh:
        for rec in csv.reader(fh):
            if not rec or rec[0].strip().startswith("#"):
                continue
            try:
                vals = [float(v) for v in rec[:ncols]]
            except ValueError:
                if not rows:          # header line
                    continue
                raise ConfigError(f"{path}: cannot parse row {rec!r}")
            if len(vals) != ncols:
                raise ConfigError(f"{path}: expected {ncols} columns, got {rec!r}")
            rows.append(vals)
    return rows


# --------------------------------------------------------------------------
# Subcommands
# --------------------------------------------------------------------------

def cmd_geometry(args) -> int:
    if args.depth > geo.INT64_GENERATIONS:
        raise ConfigError(f"--depth must be at most {geo.INT64_GENERATIONS}")
    rows = []
    for n in range(1, args.depth + 1):
        for k, a in enumerate(geo.removed_numerators(n).tolist(), start=1):
            rows.append({"n": n, "k": k, "a_num": a, "b_num": a + 1, "level": n})
    cols = ["n", "k", "a_num", "b_num", "level"]
    _emit(io.rows_to_csv(rows, cols) if args.format == "csv" else io.dumps(rows), args.output)
    return 0


def cmd_psi(args) -> int:
    prof = CuspProfile(args.alpha, args.depth)
    xs = [r[0] for r in _read_columns(args.x1, 1)] if args.x1 else list(args.x)
    if not xs:
        raise ConfigError("no x1 values given (use --x1 FILE or --x VALUES)")
    rows = []
    for x in xs:
        enc = psi(prof, x)
        d = psi_derivative(prof, x)
        rows.append({"x1": x, "psi_lo": enc.lo, "psi_hi": enc.hi,
                     "derivative_or_NA": "NA" if d is None else format(d, ".17g")})
    _emit(io.rows_to_csv(rows, ["x1", "psi_lo", "psi_hi", "derivative_or_NA"]), args.output)
    return 0


_JAC = {rf.ZoneKind.UPPER_RECTANGLE: 3.0, rf.ZoneKind.LOWER_RECTANGLE: 1.0 / 3.0, rf.ZoneKind.ELSEWHERE: 1.0}


def cmd_reflect(args) -> int:
    prof = CuspProfile(args.alpha, args.depth)
    rows = []
    for x1, x2 in _read_columns(args.points, 2):
        p = PlanePoint(x1, x2)
        row = {"x1": x1, "x2": x2, "rx1": None, "rx2": None, "zone": "uncertain", "jacobian": "NA"}
        enc = psi(prof, x1)
        if enc.lo <= x2 <= enc.hi:
            row.update(rx1=x1, rx2=x2, zone="graph")
        else:
            try:
                z = rf.zone(prof, p)
                img = rf.reflect(prof, p)
                row.update(rx1=img.x1, rx2=img.x2, zone=z.label, jacobian=format(_JAC[z.kind], ".17g"))
            except rf.UncertainZone:
                pass
        rows.append(row)
    _emit(io.rows_to_csv(rows, ["x1", "x2", "rx1", "rx2", "zone", "jacobian"]), args.output)
    return 0


def cmd_thresholds(args) -> int:
    ps = args.p_grid if args.p_grid is not None else [args.p]
    if any(p <= 1 for p in ps):
        raise ConfigError("p must exceed 1")
    rows = sorted(ex.threshold_rows(args.alpha, ps, args.q), key=lambda r: r["p"])
    cols = ["alpha", "p", "p_lower", "q_upper", "series_ratio_at_q", "alpha_p", "beta_default", "admissible"]
    if args.q is not None:
        cols.insert(5, "q")
    _emit(io.rows_to_csv(rows, cols) if args.format == "csv" else io.dumps(rows), args.output)
    return 0


def cmd_jacobian_integral(args) -> int:
    try:
        rep = it.jacobian_integral(args.alpha, args.p, args.q, args.side, args.generations)
    except ex.ExponentDomainError as e:
        raise ConfigError(str(e))
    _emit(io.dumps(rep), args.output)
    return 0


def cmd_extend(args) -> int:
    g = grid.load_grid(args.input)
    alpha = args.alpha if args.alpha is not None else g.alpha
    if alpha is None:
        raise ConfigError("grid header has no alpha; pass --alpha")
    if g.alpha is not None and args.alpha is not None and abs(g.alpha - args.alpha) > 0:
        raise ConfigError(f"--alpha {args.alpha} does not match the grid header alpha {g.alpha}")
    prof = CuspProfile(alpha)
    e = grid.extend(prof, g)
    ext = grid.sobolev_norm(e, args.q, args.window)
    src = grid.sobolev_norm(g, args.p)
    out = Path(args.output) if args.output else Path(args.input).with_name(Path(args.input).stem + ".extended.json")
    grid.save_grid(e, out, args.grid_format)
    report = {"alpha": alpha, "p": args.p, "q": args.q, "extension": ext, "source": src,
              "ratio": ext.sobolev_norm / src.sobolev_norm, "extended_grid": out.name}
    sys.stdout.write(io.dumps(report))
    return 0


def cmd_sharpness(args) -> int:
    params = wt.WitnessParams(args.alpha, args.p, args.beta, args.side, args.generations)
    out = {"alpha": args.alpha, "p": args.p, "q": args.q, "side": args.side,
           "beta": params.beta, "alpha_p": params.alpha_p,
           "norm": wt.witness_sobolev_norm(params)}
    if args.q is not None:
        regime = wt.in_sharpness_regime(args.alpha, args.p, args.q)
        out["regime"] = regime
        if regime is None:
            raise ConfigError(f"(alpha={args.alpha}, p={args.p}, q={args.q}) is not in a sharpness regime")
        out["divergence"] = wt.divergence_witness(params, args.q)
    _emit(io.dumps(out), args.output)
    return 0


def cmd_witness_grid(args) -> int:
    params = wt.WitnessParams(args.alpha, args.p, args.beta, args.side, args.generations)
    prof = CuspProfile(args.alpha)
    fn = wt.u_plus_array if args.side == "upper" else wt.u_minus_array
    g = grid.sample(prof, lambda a, b: fn(params, a, b), args.bbox, args.h, args.side)
    path = grid.save_grid(g, args.output, args.grid_format)
    sys.stdout.write(io.dumps({"grid": str(path), "shape": list(g.shape), "in_domain_cells": int(g.in_domain().sum()),
                               "max_value": float(g.values.max())}))
    return 0


def cmd_verify_all(args) -> int:
    rep = verify.verify_all(args.alpha, args.seed, repeat_check=not args.no_repeat)
    _emit(io.dumps(rep), args.output)
    if args.lines:
        for c in rep["criteria"]:
            sys.stderr.write(f"criterion {c['id']} [{'PASS' if c['passed'] else 'FAIL'}] {c['name']}\n")
    return 0 if rep["passed"] else 1


# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="cantorcusp", description="Sobolev extension over the Cantor-cuspidal graph.")
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp, out=True):
        if out:
            sp.add_argument("--output", "-o", help="write to this file instead of stdout")
        sp.add_argument("--seed", type=int, default=0, help="seed for randomized sampling (default 0)")
        return sp

    s = common(sub.add_parser("geometry", help="removed intervals up to a generation"))
    s.add_argument("--depth", type=_positive_int, required=True)
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_geometry)

    s = common(sub.add_parser("psi", help="certified profile values"))
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--x1", help="CSV file of x1 values, one per line")
    s.add_argument("--x", type=float, nargs="*", default=[], help="x1 values on the command line")
    s.add_argument("--depth", type=_positive_int, default=geo.DEFAULT_DEPTH)
    s.set_defaults(func=cmd_psi)

    s = common(sub.add_parser("reflect", help="reflect points given in a CSV file"))
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--depth", type=_positive_int, default=geo.DEFAULT_DEPTH)
    s.add_argument("--points", required=True, help="CSV with columns x1,x2")
    s.set_defaults(func=cmd_reflect)

    s = common(sub.add_parser("thresholds", help="exponent thresholds for one or many p"))
    s.add_argument("--alpha", type=_alpha, required=True)
    g = s.add_mutually_exclusive_group(required=True)
    g.add_argument("--p", type=float)
    g.add_argument("--p-grid", type=_p_grid, help="lo:hi:step")
    s.add_argument("--q", type=float, help="also report the series ratio at this q")
    s.add_argument("--format", choices=("csv", "json"), default="csv")
    s.set_defaults(func=cmd_thresholds)

    s = common(sub.add_parser("jacobian-integral", help="Jacobian-quotient series over the rectangles"))
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--side", choices=("plus", "minus"), default="plus")
    s.add_argument("--generations", type=_positive_int, default=it.DEFAULT_GENERATIONS)
    s.set_defaults(func=cmd_jacobian_integral)

    s = common(sub.add_parser("extend", help="extend a grid function and report norms"))
    s.add_argument("--alpha", type=_alpha)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--q", type=float, required=True)
    s.add_argument("--input", required=True, help="grid JSON header")
    s.add_argument("--window", type=_range4, help="x0:x1:y0:y1 (default: whole box)")
    s.add_argument("--grid-format", choices=("bin", "csv"), default="bin")
    s.set_defaults(func=cmd_extend)

    s = common(sub.add_parser("sharpness", help="witness norm series and divergence certificate"))
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--q", type=float)
    s.add_argument("--beta", type=float)
    s.add_argument("--side", choices=("upper", "lower"), default="upper")
    s.add_argument("--generations", type=_positive_int, default=60)
    s.set_defaults(func=cmd_sharpness)

    s = common(sub.add_parser("witness-grid", help="sample a witness function onto a grid file"), out=False)
    s.add_argument("--alpha", type=_alpha, required=True)
    s.add_argument("--p", type=float, required=True)
    s.add_argument("--beta", type=float)
    s.add_argument("--side", choices=("upper", "lower"), default="upper")
    s.add_argument("--generations", type=_positive_int, default=8)
    s.add_argument("--h", type=float, default=2.0 ** -8)
    s.add_argument("--bbox", type=_range4, default=(-0.5, 1.5, -0.5, 1.5))
    s.add_argument("--output", "-o", required=True, help="grid JSON header path")
    s.add_argument("--grid-format", choices=("bin", "csv"), default="bin")
    s.set_defaults(func=cmd_witness_grid)

    s = common(sub.add_parser("verify-all", help="run the acceptance checks"))
    s.add_argument("--alpha", type=_alpha, default=0.7)
    s.add_argument("--no-repeat", action="store_true", help="skip the second run used by the determinism check")
    s.add_argument("--lines", action="store_true", help="also print one PASS/FAIL line per check on stderr")
    s.set_defaults(func=cmd_verify_all)
    return ap


def _fail(kind: str, message: str, code: int = 2) -> int:
    sys.stderr.write(json.dumps({"error": kind, "message": message}, sort_keys=True) + "\n")
    return code


def main(argv: list[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except ConfigError as e:
        return _fail("invalid_config", str(e))
    except (ValueError, ArithmeticError, OSError, KeyError) as e:
        return _fail(type(e).__name__, str(e))


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
