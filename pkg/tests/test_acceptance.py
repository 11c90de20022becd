"""Acceptance criteria 1-9, each at its stated tolerance.

Results are cached per module so the split sub-tests share one computation; a
PASS/FAIL line per criterion is printed in the terminal summary (see conftest).
"""
import functools
import subprocess
import sys

import pytest

from cantorcusp import verify

RESULTS: dict[str, bool] = {}


def record(cid, ok):
    RESULTS[cid] = RESULTS.get(cid, True) and bool(ok)
    print(f"criterion {cid}: {'PASS' if RESULTS[cid] else 'FAIL'}")


@functools.lru_cache(maxsize=None)
def result(name):
    return getattr(verify, name)()


def test_criterion_1_geometry_exactness():
    r = result("check_geometry")
    record("1", r.passed)
    assert r.passed, r.details


def test_criterion_2_reflection_involution():
    r = result("check_involution")
    record("2", r.passed)
    assert r.details["max_roundtrip_error"] < 1e-9
    assert r.passed, r.details


def test_criterion_3_differential_and_jacobian():
    r = result("check_differential")
    record("3", r.passed)
    assert r.details["max_entrywise_relative_error"] < 1e-5
    assert r.passed, r.details


def test_criterion_4_threshold_equivalence():
    r = result("check_thresholds")
    record("4", r.passed)
    assert r.details["discrepancies"] == 0
    assert r.passed, r.details


def test_criterion_5_singular_integral_oracle():
    r = result("check_integrals")
    record("5", r.passed)
    assert r.details["max_relative_error"] <= 1e-8
    assert r.passed, r.details


def test_criterion_6_sharp_pair_identities():
    r = result("check_sharp_pairs")
    record("6", r.passed)
    assert r.passed, r.details


def test_criterion_7_norm_tail_below_1e6_by_generation_60():
    r = result("check_witness_series")
    ok = r.details["summary"]["convergence"]
    record("7", ok)
    failing = [(row["alpha"], row["p"], row["beta"], row["relative_tail"], row["relative_tail_lower_bound"])
               for row in r.details["convergence"] if not row["passed"]]
    assert ok, f"relative tail >= 1e-6 at generation 60 (alpha, p, beta, bound, lower bound): {failing}"


def test_criterion_7_asymptotic_constant_at_sharp_pair():
    r = result("check_witness_series")
    ok = r.details["summary"]["asymptotics"]
    record("7", ok)
    assert ok, r.details["asymptotics"]


def test_criterion_7_geometric_growth_in_small_regimes():
    r = result("check_witness_series")
    ok = r.details["summary"]["geometric_growth"]
    record("7", ok)
    assert ok, r.details["geometric_growth"]


def test_criterion_8_bump_ratio_stable_under_refinement():
    r = result("check_grid_extension")
    record("8", r.details["stable"] and r.details["within_budget"])
    assert r.details["relative_change"] < 0.25
    assert r.details["within_budget"]


def test_criterion_8_witness_gradient_norm_grows_1p5x_from_generation_6_to_8():
    r = result("check_grid_extension")
    record("8", r.details["divergence_trend"])
    assert r.details["growth_6_to_8"] >= 1.5, (
        f"measured growth {r.details['growth_6_to_8']:.4f} "
        f"(energy growth {r.details['energy_growth_6_to_8']:.4f})")


def test_criterion_9_verify_all_is_byte_identical(tmp_path):
    outs = []
    for i in range(2):
        path = tmp_path / f"report{i}.json"
        proc = subprocess.run([sys.executable, "-m", "cantorcusp", "verify-all", "--no-repeat", "-o", str(path)],
                              capture_output=True, text=True)
        assert proc.returncode in (0, 1), proc.stderr
        outs.append(path.read_bytes())
    same = outs[0] == outs[1]
    record("9", same)
    assert same
