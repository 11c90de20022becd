import csv
import io
import json
import subprocess
import sys

import numpy as np
import pytest

from cantorcusp import cli
from cantorcusp.grid import load_grid


def run(capsys, *argv):
    code = cli.main(list(argv))
    out, err = capsys.readouterr()
    return code, out, err


def test_geometry_depth_two_lists_three_intervals(capsys):
    code, out, _ = run(capsys, "geometry", "--depth", "2")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert [(r["a_num"], r["b_num"], r["level"]) for r in rows] == [("1", "2", "1"), ("1", "2", "2"), ("7", "8", "2")]


def test_geometry_json_matches_csv(capsys):
    _, out_csv, _ = run(capsys, "geometry", "--depth", "3")
    _, out_json, _ = run(capsys, "geometry", "--depth", "3", "--format", "json")
    assert len(json.loads(out_json)) == len(out_csv.strip().splitlines()) - 1 == 7


def test_thresholds_reference_value(capsys):
    code, out, _ = run(capsys, "thresholds", "--alpha", "0.7", "--p", "2", "--format", "json")
    assert code == 0
    row = json.loads(out)[0]
    assert row["q_upper"] == pytest.approx(1.2810368511644454, rel=1e-14)
    assert row["admissible"] is True


def test_thresholds_grid_sorted_and_series_ratio(capsys):
    _, out, _ = run(capsys, "thresholds", "--alpha", "0.7", "--p-grid", "1.5:3:0.5", "--q", "1.2")
    rows = list(csv.DictReader(io.StringIO(out)))
    ps = [float(r["p"]) for r in rows]
    assert ps == sorted(ps) and ps[0] == 1.5 and ps[-1] == 3.0
    r2 = next(r for r in rows if float(r["p"]) == 2.0)
    assert float(r2["series_ratio_at_q"]) == pytest.approx(0.8304873, abs=1e-6)


def test_psi_marks_cantor_points_without_derivative(capsys):
    code, out, _ = run(capsys, "psi", "--alpha", "0.5", "--x", "0.4", "0.0")
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    lo, hi = float(rows[0]["psi_lo"]), float(rows[0]["psi_hi"])
    assert lo <= (0.4 - 1 / 3) ** 0.5 <= hi
    assert rows[1]["derivative_or_NA"] == "NA"
    assert float(rows[1]["psi_hi"]) == 0.0


def test_psi_reads_x1_file(capsys, tmp_path):
    f = tmp_path / "x.csv"
    f.write_text("0.1\n0.5\n")
    _, out, _ = run(capsys, "psi", "--alpha", "0.7", "--x1", str(f))
    assert len(out.strip().splitlines()) == 3


def test_reflect_roundtrip_from_file(capsys, tmp_path):
    f = tmp_path / "pts.csv"
    f.write_text("x1,x2\n0.5,0.3\n0.5,-0.3\n")
    code, out, _ = run(capsys, "reflect", "--alpha", "0.7", "--points", str(f))
    assert code == 0
    rows = list(csv.DictReader(io.StringIO(out)))
    assert rows[0]["zone"].startswith("upper_rectangle") and float(rows[0]["jacobian"]) == 3.0
    assert rows[1]["zone"].startswith("lower_rectangle") and float(rows[1]["jacobian"]) == pytest.approx(1 / 3)
    assert all(float(r["rx1"]) == 0.5 for r in rows)
    # upper and lower images swap sides of the graph
    assert float(rows[0]["rx2"]) < float(rows[1]["rx2"])


def test_jacobian_integral_converges_for_admissible_pair(capsys):
    code, out, _ = run(capsys, "jacobian-integral", "--alpha", "0.7", "--p", "2", "--q", "1.2")
    assert code == 0
    rep = json.loads(out)
    sums = np.array(rep["partial_sums"])
    assert np.all(np.diff(sums) >= 0)
    assert rep["verdict"] == "finite"
    assert rep["ratio"] == pytest.approx(0.8304873, abs=1e-6)
    assert rep["value"] == pytest.approx(sums[-1], rel=1e-12)


def test_sharpness_reports_divergence(capsys):
    code, out, _ = run(capsys, "sharpness", "--alpha", "0.7", "--p", "2", "--q", "1.3")
    assert code == 0
    rep = json.loads(out)
    assert rep["divergence"]["factor"] > 1


@pytest.mark.parametrize("argv", [
    ["thresholds", "--alpha", "1.5", "--p", "2"],
    ["thresholds", "--alpha", "0.7", "--p", "0.5"],
    ["geometry", "--depth", "0"],
    ["sharpness", "--alpha", "0.7", "--p", "2", "--q", "1.0"],
    ["extend", "--p", "2", "--q", "1.2", "--input", "/nonexistent/grid.json"],
    ["no-such-command"],
])
def test_invalid_input_gives_json_error_and_exit_2(capsys, argv):
    code, out, err = run(capsys, *argv)
    assert code == 2
    payload = json.loads(err.strip().splitlines()[-1])
    assert payload["error"] and payload["message"]
    assert out == ""


@pytest.mark.parametrize("fmt", ["bin", "csv"])
def test_witness_grid_then_extend(capsys, tmp_path, fmt):
    header = tmp_path / "w.json"
    code, _, _ = run(capsys, "witness-grid", "--alpha", "0.7", "--p", "2", "--h", str(2.0 ** -6),
                     "--generations", "4", "--output", str(header), "--grid-format", fmt)
    assert code == 0
    g = load_grid(header)
    assert g.alpha == 0.7 and g.h == 2.0 ** -6
    ext_header = tmp_path / "ext.json"
    code, out, _ = run(capsys, "extend", "--p", "2", "--q", "1.2", "--input", str(header),
                       "--output", str(ext_header), "--grid-format", fmt)
    assert code == 0
    rep = json.loads(out)
    assert rep["alpha"] == 0.7 and rep["extended_grid"] == "ext.json"
    assert rep["extension"]["sobolev_norm"] > 0 and rep["ratio"] > 0
    e = load_grid(ext_header)
    assert e.values.shape == g.values.shape
    # the extension leaves the source values in place
    src = g.in_domain()
    np.testing.assert_array_equal(e.values[src], g.values[src])


def test_extend_alpha_mismatch_is_config_error(capsys, tmp_path):
    header = tmp_path / "w.json"
    run(capsys, "witness-grid", "--alpha", "0.7", "--p", "2", "--h", str(2.0 ** -5),
        "--generations", "3", "--output", str(header))
    code, _, err = run(capsys, "extend", "--alpha", "0.5", "--p", "2", "--q", "1.2", "--input", str(header))
    assert code == 2 and "alpha" in json.loads(err)["message"]


def test_outputs_are_byte_identical_across_processes():
    argv = [sys.executable, "-m", "cantorcusp", "thresholds", "--alpha", "0.7", "--p-grid", "1.1:4:0.3", "--q", "1.2"]
    a = subprocess.run(argv, capture_output=True, check=True).stdout
    b = subprocess.run(argv, capture_output=True, check=True).stdout
    assert a == b and len(a) > 100
