import csv
import io

import pytest
from hypothesis import given, strategies as st

from tspts.approx import bhh_length
from tspts.genbench import GenConfig, generate_instance
from tspts.harness import (CLASSES, RECORD_COLUMNS, ExperimentResult, FeasibilityRecord, GapRecord,
                           Manifest, abs_gap_percent, classify_feasibility, gap_percent,
                           paper_manifest, records_csv_text, run_experiment, summarize,
                           write_experiment)
from tspts.solver import brute_force_solve

SMALL = {"name": "t", "seed": 5, "instances_per_config": 5,
         "factorial": {"n": [6, 9], "m": [1, 3], "ts_scheme": ["identical", "repulsion:4"]},
         "time_budget": 30, "brute_force_check": True}


def test_gap_examples():
    assert gap_percent(110, 100) == pytest.approx(10.0)
    assert gap_percent(7.5, 7.5) == 0
    assert round(gap_percent(1136.9, 396.0), 1) == 187.1
    assert abs_gap_percent(90, 100) == pytest.approx(10.0)
    for bad in (0, -1):
        with pytest.raises(ValueError):
            gap_percent(1, bad)


@given(st.floats(1e-3, 1e6), st.floats(-99, 500))
def test_gap_round_trip(actual, g):
    approx = actual * (1 + g / 100)
    assert gap_percent(approx, actual) == pytest.approx(g, abs=1e-6)


def test_classification():
    assert classify_feasibility(True, False) == "FN"
    assert classify_feasibility(False, True) == "FP"
    assert classify_feasibility(True, True) == "TP"
    assert classify_feasibility(False, False) == "TN"
    outcomes = {classify_feasibility(p, a) for p in (True, False) for a in (True, False)}
    assert outcomes == set(CLASSES)


def test_manifest_schema():
    man = Manifest.from_dict(SMALL)
    assert len(man.configs) == 2 * 2 * 2
    assert Manifest.from_dict(man.to_dict()).to_dict() == man.to_dict()
    assert Manifest.from_dict(SMALL, seed=9).configs[0].seed == 9
    for bad in ({}, {"factorial": {"n": [5]}}, {"configs": [{"n": 5, "m": 1, "seed": 3}]},
                {"configs": [{"n": 5, "m": 1}], "bogus": 1}, {"configs": [{"n": 5, "m": 1}], "workers": 0},
                {"configs": [{"n": 5, "m": 1}], "solver_mode": "fast"}, []):
        with pytest.raises((ValueError, TypeError)):
            Manifest.from_dict(bad)
    assert paper_manifest()["factorial"]["m"] == list(range(1, 11))
    assert len(Manifest.from_dict(paper_manifest()).configs) == 750


def test_single_instance_m1_is_bhh_gap():
    res = run_experiment({"configs": [{"n": 7, "m": 1}], "seed": 2})
    g = res.gaps[0]
    sc = generate_instance(GenConfig(7, 1, seed=2), 0)
    exact = brute_force_solve(sc.instance, sc.partition, sc.assignment).cost
    assert g.status == "optimal" and g.exact_cost == pytest.approx(exact)
    assert g.gap_distributional == pytest.approx(gap_percent(bhh_length(7, 2500.0), exact))


def test_sweep_matches_brute_force_and_is_deterministic():
    a = run_experiment(SMALL)
    assert len(a) == 40
    assert [g.instance_id for g in a.gaps] == sorted(g.instance_id for g in a.gaps)
    assert all(g.bruteforce_agrees for g in a.gaps)
    b = run_experiment(SMALL)
    assert records_csv_text(a) == records_csv_text(b)
    header = next(csv.reader(io.StringIO(records_csv_text(a))))
    assert header == RECORD_COLUMNS


def test_parallel_workers_same_bytes():
    man = dict(SMALL, instances_per_config=2, brute_force_check=False)
    serial = records_csv_text(run_experiment(man))
    parallel = records_csv_text(run_experiment(dict(man, workers=2)))
    assert serial == parallel


def test_timeouts_and_oversized_are_recorded():
    res = run_experiment({"configs": [{"n": 30, "m": 3}], "time_budget": 1e-9})
    assert res.gaps[0].status == "timeout" and res.feasibility[0].actual is None
    res = run_experiment({"configs": [{"n": 30, "m": 1}], "exact_threshold": 10})
    assert res.gaps[0].status == "too_large" and res.gaps[0].gap_distributional is None
    s = summarize(res)[0]
    assert s["coverage"] == 0 and s["mean_abs_gap_distributional"] is None


def test_regeneration_respects_slot_cap():
    res = run_experiment({"configs": [{"n": 40, "m": 3}], "instances_per_config": 3,
                          "max_slot_size": 14, "solver_mode": "heuristic"})
    assert all(g.max_slot_count <= 14 for g in res.gaps)
    assert any(g.regenerations > 0 for g in res.gaps)


def fake(gaps, feas):
    recs, frs = [], []
    for i, (g, (p, a)) in enumerate(zip(gaps, feas)):
        recs.append(GapRecord(f"c{i}", 10, 2, "identical", "uniform", "optimal" if a else "infeasible",
                              1.0, 1.0, 1.0 if a else None, g, g, True, 3))
        frs.append(FeasibilityRecord(f"c{i}", p, p, a, classify_feasibility(p, a), classify_feasibility(p, a)))
    return ExperimentResult(recs, frs)


def test_summary_statistics():
    s = summarize(fake([-5.0, 5.0], [(True, True), (True, True)]))
    assert len(s) == 1
    assert s[0]["mean_abs_gap_distributional"] == 5 and s[0]["median_gap_distributional"] == 0
    one = summarize(fake([3.0], [(True, True)]))[0]
    assert one["mean_abs_gap_sampled"] == 3 and one["median_gap_sampled"] == 3
    mix = summarize(fake([1.0, None, None, 2.0], [(True, True), (True, False), (False, False), (False, True)]))[0]
    assert mix["fn_rate_distributional"] == 50.0 and mix["fp_rate_distributional"] == 50.0
    assert sum(mix[f"{c.lower()}_distributional"] for c in CLASSES) == 4
    with pytest.raises(ValueError):
        summarize(ExperimentResult([], []))


def test_write_experiment(tmp_path):
    res = run_experiment(dict(SMALL, instances_per_config=1, brute_force_check=False))
    files = write_experiment(res, tmp_path)
    assert files["records"].read_text().startswith("instance_id,n,m,")
    assert files["summary"].exists()
    svgs = [p.read_text() for p in files["plots"]]
    assert all(t.lstrip().startswith("<?xml") for t in svgs)
    again = write_experiment(res, tmp_path / "again")
    assert [p.read_bytes() for p in again["plots"]] == [p.read_bytes() for p in files["plots"]]
