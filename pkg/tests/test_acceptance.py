"""Acceptance gate: one test per numbered criterion, one PASS line each.

Covers headline arithmetic, randomized solver-vs-oracle equivalence, the
hand-checked single-region program, scenario-ordering invariants, model
identities on every optimal run, golden-file parity on the bundled dataset,
sweep behaviour, and byte-level determinism of result bundles.
"""
import filecmp
import time
from pathlib import Path

import numpy as np
import pytest

from ccsplan.analytics import cashflow, contribution_shares, payback_year, reduction_percentage, trade_matrix
from ccsplan.builder import COST_ONLY, assemble, scenario_config
from ccsplan.cli import main
from ccsplan.dataio import toy_nation_path
from ccsplan.engine import compute_emissions, run_scenario, sweep
from ccsplan.lp import Status, check_solution
from ccsplan.oracle import enumerate_oracle
from ccsplan.simplex import solve

from conftest import make_trade_instance, make_unit_instance
from test_simplex_oracle import random_lp


def ok(num, message):
    print(f"criterion {num}: PASS — {message}")


def test_criterion_1_headline_reduction_arithmetic():
    t0 = time.perf_counter()
    value = reduction_percentage(834.24e6, 1.25e9)
    elapsed = time.perf_counter() - t0
    assert round(value, 2) == 66.74
    assert elapsed < 1e-3
    ok(1, f"reduction_percentage(834.24e6, 1.25e9) = {value:.4f}% (66.74 at 2 decimals)")


def test_criterion_2_oracle_equivalence():
    rng = np.random.default_rng(2024)
    t0 = time.perf_counter()
    n_checked = 0
    for _ in range(200):
        lp = random_lp(rng)
        ora = enumerate_oracle(lp)
        sim = solve(lp)
        assert sim.status == ora.status, f"status mismatch: {sim.status} vs {ora.status}"
        if ora.status == Status.OPTIMAL:
            assert sim.objective_value == pytest.approx(ora.objective_value, rel=1e-8, abs=1e-8)
        n_checked += 1
    elapsed = time.perf_counter() - t0
    assert elapsed < 60.0
    ok(2, f"{n_checked}/200 randomized LPs agree with the enumeration oracle in {elapsed:.1f}s")


def test_criterion_3_unit_end_to_end():
    t0 = time.perf_counter()
    inst = make_unit_instance()
    res = run_scenario(inst, scenario_config(1, objective_mode=COST_ONLY))
    elapsed = time.perf_counter() - t0
    assert res.plan.re_installed[0, 0, 0] == pytest.approx(4.0, abs=1e-9)
    assert res.plan.ccs_local[0, 0] == pytest.approx(10.0, abs=1e-9)
    assert res.objective_value == pytest.approx(-6.0, abs=1e-9)
    assert res.reduction_pct == pytest.approx(50.0, abs=1e-9)
    shares = contribution_shares(res)
    assert shares.solar_pct == pytest.approx(80.0, abs=1e-9)
    assert shares.ccs_pct == pytest.approx(20.0, abs=1e-9)
    assert payback_year(cashflow(res)) == inst.horizon.start_year  # year 1
    assert elapsed < 1.0
    ok(3, "single-region program: RE 4 GW, CCS 10 t, objective -6, 50% reduction, "
          "payback in year 1, shares 80/20")


def test_criterion_4_scenario_ordering(toy_results_cost):
    r = toy_results_cost
    assert r[3].objective_value <= r[1].objective_value + 1e-6
    assert r[2].objective_value >= r[1].objective_value - 1e-6
    assert r[4].objective_value >= r[3].objective_value - 1e-6
    for sid in (2, 4):
        gw = r[sid].plan.re_installed.sum(axis=0)  # (tech, year)
        total = gw.sum(axis=0)
        active = total > 1e-12
        assert active.any()
        share = gw[0, active] / total[active]
        np.testing.assert_allclose(share, 0.31, atol=1e-9)
    ok(4, "objective(S3) <= objective(S1), resilience costs extra (S2 >= S1, S4 >= S3), "
          "per-year solar share = 0.31 exactly")


def test_criterion_5_emission_identity_and_cap(toy_results_cost, toy_results_lex):
    unit = run_scenario(make_unit_instance(), scenario_config(1, objective_mode=COST_ONLY))
    trade = run_scenario(make_trade_instance(), scenario_config(3, nonneg_emissions=True))
    results = list(toy_results_cost.values()) + list(toy_results_lex.values()) + [unit, trade]
    for res in results:
        assert res.solve_stats["status"] == "optimal"
        np.testing.assert_array_equal(res.emissions, compute_emissions(res.instance, res.plan))
        cap = res.instance.globals.cap
        national = res.emissions.sum(axis=0)
        finite = np.isfinite(cap)
        scale = np.maximum(np.abs(cap[finite]), 1.0)
        assert np.all(national[finite] <= cap[finite] + 1e-6 * scale)
    ok(5, f"emission recursion is bit-exact and the cap holds on all {len(results)} optimal runs")


def test_criterion_6_cashflow_objective_consistency(toy_results_cost, toy_results_lex):
    unit = run_scenario(make_unit_instance(), scenario_config(1, objective_mode=COST_ONLY))
    trade = run_scenario(make_trade_instance(), scenario_config(3, nonneg_emissions=True))
    results = list(toy_results_cost.values()) + list(toy_results_lex.values()) + [unit, trade]
    for res in results:
        net = cashflow(res).national_net().sum()
        assert net == pytest.approx(-res.objective_value, rel=1e-6)
    ok(6, f"national net cashflow equals the negated objective on all {len(results)} runs")


def test_criterion_7_qualitative_parity(toy_results_lex, golden):
    s1, s3 = toy_results_lex[1], toy_results_lex[3]
    assert s1.reduction_pct >= s3.reduction_pct - 1e-9
    for sid, res in toy_results_lex.items():
        recorded = golden["lex"][f"s{sid}"]["any_trading"]
        assert trade_matrix(res).any_trading == recorded
        assert res.reduction_pct == pytest.approx(golden["lex"][f"s{sid}"]["reduction_pct"], abs=1e-6)
    ok(7, f"incremental CCS reduction {s1.reduction_pct:.2f}% >= front-loaded "
          f"{s3.reduction_pct:.2f}%; CCS trading matches golden (none occurs)")


def test_criterion_8_sweep_threshold(toy_instance, golden):
    t0 = time.perf_counter()
    grid = np.linspace(10000, 250000, 16).tolist()
    sw = sweep(toy_instance, scenario_config(1, objective_mode=COST_ONLY), "carbon_price", grid)
    elapsed = time.perf_counter() - t0
    assert all(p.error is None for p in sw.points)
    assert sw.monotone
    recorded = golden["sweep_carbon_price_s1_cost"]
    assert sw.threshold == pytest.approx(recorded["threshold"])
    reductions = [p.reduction_pct for p in sw.points]
    np.testing.assert_allclose(reductions, recorded["reduction_pct"], atol=1e-6)
    assert elapsed < 300.0
    ok(8, f"16-point carbon-price sweep is non-decreasing with a jump at "
          f"{sw.threshold:g} yen/t in {elapsed:.1f}s")


def test_criterion_9_run_all_determinism(tmp_path):
    data = str(toy_nation_path())
    for sub in ("one", "two"):
        code = main(["run-all", "--data", data, "--out", str(tmp_path / sub)])
        assert code == 0
    files = sorted(p.relative_to(tmp_path / "one") for p in (tmp_path / "one").rglob("*") if p.is_file())
    assert files, "no bundle files written"
    for rel in files:
        a, b = tmp_path / "one" / rel, tmp_path / "two" / rel
        assert b.exists()
        assert a.read_bytes() == b.read_bytes(), f"{rel} differs between runs"
    ok(9, f"two run-all executions wrote {len(files)} byte-identical bundle files")
