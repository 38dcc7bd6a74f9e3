"""Acceptance gate: every numbered criterion of the verification suite runs
at its stated tolerance, one test per criterion, one printed verdict line
each (run with -s to stream them).

Criteria 5 (its 2D half) and 6 are implemented faithfully and are expected
to fail at the stated tolerances on this scheme at desk scale; the failure
analyses (measured floors, scaling laws, the configuration sweeps that rule
out a passing setup) live in the repository notes. Everything else passes.
"""

import json

import pytest

from gradabsorb.suites import run_suite


@pytest.fixture(scope="session")
def outcomes(tmp_path_factory):
    out = tmp_path_factory.mktemp("acceptance")
    results = run_suite("all", out_dir=out)
    by_id = {o.cid: o for o in results}
    for o in sorted(results, key=lambda o: int(o.cid)):
        print(o.line())
    return by_id


def _check(outcomes, cid):
    o = outcomes[cid]
    print(o.line())
    assert o.passed, f"criterion {cid} failed: {json.dumps(o.details, default=str)[:800]}"


def test_criterion_1_self_similar_fidelity(outcomes):
    o = outcomes["1"]
    assert o.details["worst_error_over_budget"] <= 1.0
    _check(outcomes, "1")


def test_criterion_2_decay_sandwich(outcomes):
    o = outcomes["2"]
    assert abs(o.details["exponent"] + 2.0) <= 0.2
    _check(outcomes, "2")


def test_criterion_3_localization_and_control(outcomes):
    o = outcomes["3"]
    assert o.details["drift_cells"] <= 2.0
    assert o.details["control_drift_cells"] > 2.0
    assert abs(o.details["control_radius_exponent"] - 0.25) <= 0.05
    _check(outcomes, "3")


def test_criterion_4_monotone_positivity_sets(outcomes):
    _check(outcomes, "4")


def test_criterion_5_convergence_to_cone(outcomes):
    o = outcomes["5"]
    assert o.details["final_error_1d"] <= 0.10 and o.details["decreasing_1d"], \
        f"1D convergence: {o.details}"
    assert o.details["final_error_2d"] <= 0.10 and o.details["decreasing_2d"], (
        "2D convergence at the pinned 128^2 resolution: final error "
        f"{o.details['final_error_2d']:.4f} vs 0.10. The profile body needs "
        "about 110 cells per cone radius for the cubed mask-radius "
        "sensitivity to fit inside 10%; 128^2 tops out near 54. The same "
        "construction measures 0.041 (decreasing) at 256^2. See notes/decisions.md.")
    _check(outcomes, "5")


def test_criterion_6_waiting_time(outcomes):
    o = outcomes["6"]
    for cells in ("512", "1024"):
        rep = o.details[cells]
        assert rep["endpoint_drift_cells"] <= rep["drift_tolerance_cells"] and \
            rep["edge_value_max"] <= rep["eps_pos"], (
            f"waiting time at {cells} cells: the monotone scheme maintains an "
            f"equilibrium front skin of height {rep['edge_value_max']:.2e} "
            f"(~ a0^((p-1)/q) dx^3, converging cubically in dx) on the first "
            f"outside cells, which no desk-scale resolution brings under "
            f"eps_pos = {rep['eps_pos']:.2e}; the genuinely moving front of "
            "criterion 7 sits 4+ orders higher. See notes/decisions.md.")
    assert o.details["consistent"]
    _check(outcomes, "6")


def test_criterion_7_moving_support(outcomes):
    o = outcomes["7"]
    assert o.details["edge"]["passed"]
    assert o.details["sweep"]["monotone"]
    _check(outcomes, "7")


def test_criterion_8_barriers(outcomes):
    o = outcomes["8"]
    assert 0.01 < o.details["amplitude_bound"] < 0.015
    assert o.details["subsolution_ok"]
    assert o.details["halving_ok"]
    _check(outcomes, "8")


def test_criterion_9_distance_oracle(outcomes):
    o = outcomes["9"]
    assert o.details["masks_checked"] == 200
    assert o.details["mismatches"] == 0
    _check(outcomes, "9")


def test_criterion_10_eikonal_residual(outcomes):
    _check(outcomes, "10")


def test_criterion_11_determinism_comparison(outcomes):
    o = outcomes["11"]
    assert o.details["repeat_identical"]
    assert o.details["pairs"]["passed"]
    _check(outcomes, "11")
