import json
import subprocess
import sys

import pytest

from tspts.cli import main
from tspts.model import Instance, Scenario, SlotAssignment, TimeWindowSet, save_scenario, validate_partition

DUMAS = """CUST NO. XCOORD. YCOORD. DEMAND READY DUE SERVICE
1 0 0 0 0 100 0
2 10 0 0 10 40 0
3 10 10 0 30 70 0
999 0 0 0 0 0 0
"""


def run(capsys, *argv):
    code = main([str(a) for a in argv])
    out = capsys.readouterr()
    return code, out.out, out.err


@pytest.fixture
def slotted(tmp_path):
    inst = Instance([(0, 0), (1, 0), (2, 0)], 10, 10)
    p = tmp_path / "inst.json"
    save_scenario(Scenario(inst, validate_partition([0, 3, 10], 10), SlotAssignment([1, 2], 2)), p)
    return p


def test_generate_then_solve(tmp_path, capsys):
    code, out, _ = run(capsys, "generate", "--n", 6, "--m", 2, "--count", 2, "--seed", 4, "--out-dir", tmp_path)
    assert code == 0
    files = json.loads(out)["files"]
    assert len(files) == 2
    code, out, _ = run(capsys, "solve", files[0], "--out-dir", tmp_path / "sol")
    assert code in (0, 1)
    sol = json.loads(out)
    assert set(sol) == {"status", "cost", "order", "arrive_times", "stats"}
    assert json.loads((tmp_path / "sol" / "solution.json").read_text()) == sol
    code, out, _ = run(capsys, "solve", files[0], "--brute-force")
    assert json.loads(out)["status"] == sol["status"]


def test_solve_example_and_debug_flags(slotted, capsys):
    base = None
    for flags in ([], ["--disable-dominance"], ["--disable-binf"], ["--force-heuristic"]):
        code, out, _ = run(capsys, "solve", slotted, *flags)
        assert code == 0
        cost = json.loads(out)["cost"]
        base = cost if base is None else base
        assert cost == pytest.approx(4.0) and cost == pytest.approx(base)


def test_solve_infeasible_exit_code(tmp_path, capsys):
    p = tmp_path / "bad.json"
    save_scenario(Scenario(Instance([(0, 0), (5, 0)], 10, 10), validate_partition([0, 3, 10], 10),
                           SlotAssignment([1], 2)), p)
    code, out, _ = run(capsys, "solve", p)
    assert code == 1 and json.loads(out)["status"] == "infeasible"


def test_approximate_and_feasibility(slotted, capsys):
    code, out, _ = run(capsys, "approximate", slotted, "--mu-g", 1)
    d = json.loads(out)
    assert code == 0 and d["mts_bounds"][0] <= d["mts"] <= d["mts_bounds"][1]
    assert d["worst_case_mits"] <= d["mits"]
    code, out, _ = run(capsys, "feasibility", slotted, "--moments", "5,5,8,0,8")
    d = json.loads(out)
    assert code == 0 and set(d) == {"distributional", "sampled", "worst_case"}
    code, out, _ = run(capsys, "feasibility", slotted, "--require", "distributional")
    assert code == (0 if json.loads(out)["distributional"]["feasible"] else 1)


def test_induce(tmp_path, capsys):
    p = tmp_path / "toy.txt"
    p.write_text(DUMAS)
    code, out, _ = run(capsys, "induce", p, "--side", 50)
    d = json.loads(out)
    assert code == 0 and d["n"] == 3 and d["area"] == 2500
    assert d["slot_bounds"] == [0, 10, 30, 40, 70, 100]
    assert (d["m1"], d["m2"], d["m_star"]) == (0, 2, 3)
    j = tmp_path / "tw.json"
    save_scenario(Scenario(Instance([(0, 0), (1, 1)], 5, 10), time_windows=TimeWindowSet([(0, 10)], 10)), j)
    code, out, _ = run(capsys, "induce", j)
    assert code == 0 and json.loads(out)["m_star"] == 1


def test_experiment_outputs(tmp_path, capsys):
    man = tmp_path / "m.json"
    man.write_text(json.dumps({"configs": [{"n": 6, "m": 2}], "instances_per_config": 2}))
    code, out, _ = run(capsys, "--seed", 3, "experiment", man, "--out-dir", tmp_path / "o")
    assert code == 0
    assert (tmp_path / "o" / "records.csv").exists() and (tmp_path / "o" / "gaps_by_m.svg").exists()


def test_experiment_timeout_exit_code(tmp_path, capsys):
    man = tmp_path / "m.json"
    man.write_text(json.dumps({"configs": [{"n": 30, "m": 3}]}))
    code, _, _ = run(capsys, "experiment", man, "--time-budget", 1e-9, "--no-plots", "--out-dir", tmp_path)
    assert code == 3


@pytest.mark.parametrize("argv", [["solve"], ["bogus"], ["generate", "--n", "x"]])
def test_usage_errors(argv, capsys):
    with pytest.raises(SystemExit) as exc:
        main(argv)
    assert exc.value.code == 2


def test_input_errors_exit_2(tmp_path, capsys):
    code, _, err = run(capsys, "solve", tmp_path / "missing.json")
    assert code == 2 and "error" in err
    man = tmp_path / "m.json"
    man.write_text(json.dumps({"configs": []}))
    assert run(capsys, "experiment", man)[0] == 2
    code, _, _ = run(capsys, "generate", "--n", 5)
    assert code == 2


def test_console_script_entry():
    r = subprocess.run([sys.executable, "-m", "tspts.cli", "--help"], capture_output=True, text=True)
    assert r.returncode == 0
    for sub in ("generate", "solve", "approximate", "feasibility", "experiment", "induce"):
        assert sub in r.stdout
