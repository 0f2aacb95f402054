"""Experiment sweeps: gap and feasibility-error metrics, CSV tables, SVG charts.

A manifest is a JSON object::

    {
      "name": "desk",
      "seed": 0,
      "instances_per_config": 5,
      "factorial": {"n": [21, 41], "m": [1, 2, 3],
                    "ts_scheme": ["identical", "repulsion:20"],
                    "temporal_mode": ["uniform"]},
      "time_budget": 60,
      "exact_threshold": 18,
      "solver_mode": "exact",
      "max_slot_size": null,
      "max_regenerations": 1000,
      "brute_force_check": false,
      "workers": 1
    }

``configs`` (a list of GenConfig fields without the seed) may replace or
extend ``factorial``. Replicate ``r`` of every config draws from instance
index ``r`` of the manifest seed, so configs with the same ``n`` share their
points. With ``max_slot_size`` set, draws whose fullest slot exceeds it are
redrawn on a fresh stream.
"""
from __future__ import annotations

import csv
import io
import itertools
import json
import math
import statistics
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import Optional

from .approx import feasible_distributional, feasible_sampled, mts_length, sampling_length
from .genbench import GenConfig, generate_instance
from .hamiltonian import SlotTooLarge
from .solver import OPTIMAL, TIMEOUT, brute_force_solve, solve_instance

TOO_LARGE = "too_large"
CLASSES = ("TP", "FP", "TN", "FN")


def gap_percent(approx: float, actual: float) -> float:
    """Signed relative error of ``approx`` in percent of ``actual``."""
    if not actual > 0:
        raise ValueError(f"actual length must be positive, got {actual}")
    return (approx - actual) * 100.0 / actual


def abs_gap_percent(approx: float, actual: float) -> float:
    return abs(gap_percent(approx, actual))


def classify_feasibility(predicted: bool, actual: bool) -> str:
    """Outcome of a feasibility prediction; "feasible" is the null hypothesis.

    Calling an infeasible instance feasible is a false negative.
    """
    if predicted:
        return "TP" if actual else "FN"
    return "FP" if actual else "TN"


@dataclass(frozen=True)
class GapRecord:
    instance_id: str
    n: int
    m: int
    ts_scheme: str
    temporal_mode: str
    status: str
    approx_distributional: float
    approx_sampled: float
    exact_cost: Optional[float]
    gap_distributional: Optional[float]
    gap_sampled: Optional[float]
    exact: bool
    max_slot_count: int
    regenerations: int = 0
    bruteforce_agrees: Optional[bool] = None


@dataclass(frozen=True)
class FeasibilityRecord:
    instance_id: str
    predicted_distributional: bool
    predicted_sampled: bool
    actual: Optional[bool]
    class_distributional: Optional[str]
    class_sampled: Optional[str]


@dataclass
class Manifest:
    name: str = "experiment"
    seed: int = 0
    instances_per_config: int = 1
    configs: list = field(default_factory=list)      # GenConfig objects
    time_budget: Optional[float] = 60.0
    exact_threshold: int = 18
    solver_mode: str = "exact"
    max_slot_size: Optional[int] = None
    max_regenerations: int = 1000
    brute_force_check: bool = False
    workers: int = 1

    _KEYS = ("name", "seed", "instances_per_config", "configs", "factorial", "time_budget",
             "exact_threshold", "solver_mode", "max_slot_size", "max_regenerations",
             "brute_force_check", "workers")

    @classmethod
    def from_dict(cls, d: dict, seed: Optional[int] = None) -> "Manifest":
        if not isinstance(d, dict):
            raise ValueError("manifest must be a JSON object")
        unknown = set(d) - set(cls._KEYS)
        if unknown:
            raise ValueError(f"unknown manifest keys: {sorted(unknown)}")
        seed = int(d.get("seed", 0) if seed is None else seed)
        configs = []
        for c in d.get("configs", []):
            if not isinstance(c, dict) or "seed" in c:
                raise ValueError("each config is an object of GenConfig fields without 'seed'")
            configs.append(GenConfig(**c, seed=seed))
        fact = d.get("factorial")
        if fact is not None:
            missing = {"n", "m"} - set(fact)
            if missing:
                raise ValueError(f"factorial needs keys {sorted(missing)}")
            schemes = fact.get("ts_scheme", ["identical"])
            modes = fact.get("temporal_mode", ["uniform"])
            for n, m, ts, mode in itertools.product(fact["n"], fact["m"], schemes, modes):
                configs.append(GenConfig(n, m, fact.get("side_a", 50.0), fact.get("horizon_h"),
                                         ts, mode, seed))
        if not configs:
            raise ValueError("manifest defines no configs")
        out = cls(
            name=str(d.get("name", "experiment")), seed=seed,
            instances_per_config=int(d.get("instances_per_config", 1)), configs=configs,
            time_budget=d.get("time_budget", 60.0), exact_threshold=int(d.get("exact_threshold", 18)),
            solver_mode=d.get("solver_mode", "exact"), max_slot_size=d.get("max_slot_size"),
            max_regenerations=int(d.get("max_regenerations", 1000)),
            brute_force_check=bool(d.get("brute_force_check", False)), workers=int(d.get("workers", 1)),
        )
        if out.instances_per_config < 1 or out.workers < 1:
            raise ValueError("instances_per_config and workers must be >= 1")
        if out.solver_mode not in ("exact", "auto", "heuristic"):
            raise ValueError(f"bad solver_mode {out.solver_mode!r}")
        return out

    def to_dict(self) -> dict:
        configs = []
        for c in self.configs:
            d = asdict(c)
            d.pop("seed")
            configs.append(d)
        return {"name": self.name, "seed": self.seed, "instances_per_config": self.instances_per_config,
                "configs": configs, "time_budget": self.time_budget, "exact_threshold": self.exact_threshold,
                "solver_mode": self.solver_mode, "max_slot_size": self.max_slot_size,
                "max_regenerations": self.max_regenerations, "brute_force_check": self.brute_force_check,
                "workers": self.workers}


def load_manifest(path, seed: Optional[int] = None) -> Manifest:
    with open(path) as fh:
        return Manifest.from_dict(json.load(fh), seed)


def paper_manifest(seed: int = 0, replicates: int = 5) -> dict:
    """The full factorial sweep; large, meant to be opted into."""
    return {
        "name": "full-factorial", "seed": seed, "instances_per_config": replicates,
        "factorial": {"n": [21, 41, 61, 81, 101], "m": list(range(1, 11)),
                      "ts_scheme": ["identical", "repulsion:20", "repulsion:50",
                                    "repulsion:100", "repulsion:150"],
                      "temporal_mode": ["uniform", "one_mode", "two_mode"]},
        "time_budget": 60, "exact_threshold": 18, "solver_mode": "auto",
    }


def _draw(config: GenConfig, index: int, max_slot: Optional[int], max_regen: int):
    for attempt in range(max_regen + 1):
        sc = generate_instance(config, index, attempt)
        if max_slot is None or max(sc.assignment.counts) <= max_slot:
            return sc, attempt
    raise RuntimeError(f"no draw of {config} with slots <= {max_slot} in {max_regen} tries")


def _run_one(job):
    iid, config, index, man = job
    sc, regen = _draw(config, index, man.max_slot_size, man.max_regenerations)
    inst, part, asg = sc.instance, sc.partition, sc.assignment
    area = inst.area
    approx_d = mts_length(inst.n, part, area)
    approx_s = sampling_length(asg.counts, area)
    pred_d = feasible_distributional(inst.n, part, area).feasible
    pred_s = feasible_sampled(asg.counts, part, area)
    try:
        res = solve_instance(inst, part, asg, man.solver_mode, man.exact_threshold,
                             time_budget=man.time_budget)
        status, cost, exact = res.status, res.cost, bool(res.stats.get("exact", True))
    except SlotTooLarge:
        status, cost, exact = TOO_LARGE, math.inf, False
    solved = status not in (TIMEOUT, TOO_LARGE)
    actual = (status == OPTIMAL) if solved else None
    finite = status == OPTIMAL and cost > 0
    agrees = None
    if man.brute_force_check and solved and inst.n_clients <= 10:
        bf = brute_force_solve(inst, part, asg)
        agrees = bf.status == status and (
            status != OPTIMAL or abs(bf.cost - cost) <= 1e-9 * max(1.0, bf.cost))
    gap = GapRecord(
        iid, config.n, config.m, config.ts_scheme, config.temporal_mode, status,
        approx_d, approx_s, cost if status == OPTIMAL else None,
        gap_percent(approx_d, cost) if finite else None,
        gap_percent(approx_s, cost) if finite else None,
        exact, max(asg.counts), regen, agrees)
    feas = FeasibilityRecord(
        iid, pred_d, pred_s, actual,
        None if actual is None else classify_feasibility(pred_d, actual),
        None if actual is None else classify_feasibility(pred_s, actual))
    return gap, feas


@dataclass
class ExperimentResult:
    gaps: list
    feasibility: list

    def __len__(self):
        return len(self.gaps)


def run_experiment(manifest, seed: Optional[int] = None, progress=None) -> ExperimentResult:
    """Generate, approximate and solve every instance of the manifest.

    Records come back sorted by instance id whatever the worker count.
    Timed-out or oversized instances keep a record with that status.
    """
    if not isinstance(manifest, Manifest):
        manifest = Manifest.from_dict(manifest, seed)
    elif seed is not None:
        manifest = Manifest.from_dict(manifest.to_dict(), seed)
    jobs = [(f"c{ci:04d}-r{r:04d}", cfg, r, manifest)
            for ci, cfg in enumerate(manifest.configs)
            for r in range(manifest.instances_per_config)]
    if manifest.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(manifest.workers) as pool:
            out = list(pool.map(_run_one, jobs, chunksize=1))
    else:
        out = []
        for job in jobs:
            out.append(_run_one(job))
            if progress is not None:
                progress(out[-1][0])
    out.sort(key=lambda pair: pair[0].instance_id)
    return ExperimentResult([g for g, _ in out], [f for _, f in out])


# --- output ------------------------------------------------------------------

RECORD_COLUMNS = ([f.name for f in fields(GapRecord)]
                  + [f.name for f in fields(FeasibilityRecord) if f.name != "instance_id"])


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, bool):
        return "true" if v else "false"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _write_rows(path_or_buf, header, rows):
    own = not hasattr(path_or_buf, "write")
    fh = open(path_or_buf, "w", newline="") if own else path_or_buf
    try:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([_cell(row[c]) for c in header])
    finally:
        if own:
            fh.close()


def write_records_csv(result: ExperimentResult, path) -> None:
    rows = []
    for g, f in zip(result.gaps, result.feasibility):
        row = asdict(g)
        row.update({k: v for k, v in asdict(f).items() if k != "instance_id"})
        rows.append(row)
    _write_rows(path, RECORD_COLUMNS, rows)


def records_csv_text(result: ExperimentResult) -> str:
    buf = io.StringIO()
    write_records_csv(result, buf)
    return buf.getvalue()


def _rate(num, den):
    return 100.0 * num / den if den else None


def _mean(xs):
    return statistics.fmean(xs) if xs else None


def _median(xs):
    return statistics.median(xs) if xs else None


GROUP_KEYS = ("n", "m", "ts_scheme", "temporal_mode")


def summarize(result: ExperimentResult, by=GROUP_KEYS, exact_only: bool = False) -> list:
    """One row per group with gap statistics, coverage and error rates.

    FN rate is the share of truly infeasible instances predicted feasible;
    FP rate is the share of truly feasible ones predicted infeasible. Gap
    statistics use instances with a finite reference cost only, and only
    exactly solved ones when ``exact_only`` is set.
    """
    if not len(result):
        raise ValueError("no records to summarize")
    groups = {}
    for g, f in zip(result.gaps, result.feasibility):
        key = tuple(getattr(g, k) for k in by)
        groups.setdefault(key, []).append((g, f))
    rows = []
    for key in sorted(groups):
        items = groups[key]
        with_gap = [g for g, _ in items if g.gap_distributional is not None and (g.exact or not exact_only)]
        gd = [g.gap_distributional for g in with_gap]
        gs = [g.gap_sampled for g in with_gap]
        solved = [f for _, f in items if f.actual is not None]
        n_feas = sum(f.actual for f in solved)
        n_infeas = len(solved) - n_feas
        row = dict(zip(by, key))
        row.update({
            "records": len(items),
            "solved": len(solved),
            "coverage": len(solved) / len(items),
            "feasible": n_feas,
            "gap_count": len(with_gap),
            "mean_abs_gap_distributional": _mean([abs(x) for x in gd]),
            "mean_abs_gap_sampled": _mean([abs(x) for x in gs]),
            "median_gap_distributional": _median(gd),
            "median_gap_sampled": _median(gs),
        })
        for pred in ("distributional", "sampled"):
            cls = [getattr(f, f"class_{pred}") for f in solved]
            counts = {c: cls.count(c) for c in CLASSES}
            row[f"fn_rate_{pred}"] = _rate(counts["FN"], n_infeas)
            row[f"fp_rate_{pred}"] = _rate(counts["FP"], n_feas)
            for c in CLASSES:
                row[f"{c.lower()}_{pred}"] = counts[c]
        rows.append(row)
    return rows


def write_summary_csv(rows: list, path) -> None:
    if not rows:
        raise ValueError("empty summary")
    _write_rows(path, list(rows[0].keys()), rows)


def write_plots(result: ExperimentResult, out_dir) -> list:
    """Bar charts of mean absolute gap per m and of error rates per predictor."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    plt.rcParams["svg.hashsalt"] = "tspts"
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    paths = []

    by_m = summarize(result, by=("m",))
    ms = [r["m"] for r in by_m]
    fig, ax = plt.subplots(figsize=(6, 3.5))
    width = 0.4
    for off, pred in ((-width / 2, "distributional"), (width / 2, "sampled")):
        vals = [r[f"mean_abs_gap_{pred}"] or 0.0 for r in by_m]
        ax.bar([m + off for m in ms], vals, width, label=pred)
    ax.set_xlabel("m")
    ax.set_ylabel("mean |gap| (%)")
    ax.set_xticks(ms)
    ax.legend()
    fig.tight_layout()
    p = out_dir / "gaps_by_m.svg"
    fig.savefig(p, format="svg", metadata={"Date": None})
    plt.close(fig)
    paths.append(p)

    overall = summarize(result, by=())[0]
    fig, ax = plt.subplots(figsize=(5, 3.5))
    labels, vals = [], []
    for pred in ("distributional", "sampled"):
        for kind in ("fp", "fn"):
            labels.append(f"{kind.upper()} {pred}")
            vals.append(overall[f"{kind}_rate_{pred}"] or 0.0)
    ax.bar(labels, vals, color=["tab:blue", "tab:red"] * 2)
    ax.set_ylabel("rate (%)")
    ax.tick_params(axis="x", labelrotation=20)
    fig.tight_layout()
    p = out_dir / "feasibility_errors.svg"
    fig.savefig(p, format="svg", metadata={"Date": None})
    plt.close(fig)
    paths.append(p)
    return paths


def write_experiment(result: ExperimentResult, out_dir, plots: bool = True) -> dict:
    """records.csv, summary.csv and the SVG charts under ``out_dir``."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    files = {"records": out_dir / "records.csv", "summary": out_dir / "summary.csv"}
    write_records_csv(result, files["records"])
    write_summary_csv(summarize(result), files["summary"])
    if plots:
        files["plots"] = write_plots(result, out_dir)
    return files
