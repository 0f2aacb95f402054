"""Command-line entry point: ``tspts <subcommand> ...``.

Exit codes: 0 success, 1 infeasible where feasibility was required,
2 usage or input error, 3 run dominated by timeouts.
"""
from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import approx, genbench, harness, maxent
from .hamiltonian import SlotTooLarge
from .model import load_scenario, save_scenario
from .solver import INFEASIBLE, TIMEOUT, brute_force_solve, solve_instance

EXIT_OK, EXIT_INFEASIBLE, EXIT_USAGE, EXIT_TIMEOUT = 0, 1, 2, 3

GLOBAL_DEFAULTS = {"seed": 0, "exact_threshold": 18, "time_budget": 60.0, "out_dir": None}


class UsageError(Exception):
    pass


def _global_flags(parser, suppress):
    d = (lambda k: argparse.SUPPRESS) if suppress else GLOBAL_DEFAULTS.get
    parser.add_argument("--seed", type=int, default=d("seed"), help="base RNG seed")
    parser.add_argument("--exact-threshold", type=int, default=d("exact_threshold"),
                        help="largest slot solved by exact Hamiltonian paths")
    parser.add_argument("--time-budget", type=float, default=d("time_budget"),
                        help="seconds per exact solve (<= 0 disables)")
    parser.add_argument("--out-dir", default=d("out_dir"), help="directory for output files")


def _emit(obj, args, filename):
    text = json.dumps(obj, indent=2, sort_keys=True)
    if args.out_dir:
        out = Path(args.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        (out / filename).write_text(text + "\n")
    print(text)


def _budget(args):
    return None if args.time_budget is None or args.time_budget <= 0 else args.time_budget


def _load_slotted(path):
    sc = load_scenario(path)
    if sc.partition is None or sc.assignment is None:
        raise UsageError(f"{path} has no slot partition and assignment")
    return sc


# --- subcommands ---------------------------------------------------------------

def cmd_generate(args):
    if args.config:
        cfg = genbench.GenConfig.from_json(Path(args.config).read_text())
    else:
        if args.n is None or args.m is None:
            raise UsageError("generate needs --n and --m, or --config")
        cfg = genbench.GenConfig(args.n, args.m, args.side, args.horizon, args.ts, args.mode, args.seed)
    out = Path(args.out_dir or ".")
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for i in range(args.count):
        sc = genbench.generate_instance(cfg, i)
        p = out / f"instance_{i:04d}.json"
        save_scenario(sc, p)
        paths.append(str(p))
    print(json.dumps({"config": json.loads(cfg.to_json()), "files": paths}, indent=2))
    return EXIT_OK


def cmd_solve(args):
    sc = _load_slotted(args.instance)
    mode = "heuristic" if args.force_heuristic else args.mode
    if args.brute_force:
        res = brute_force_solve(sc.instance, sc.partition, sc.assignment)
    else:
        try:
            res = solve_instance(sc.instance, sc.partition, sc.assignment, mode, args.exact_threshold,
                                 dominance=not args.disable_dominance, use_binf=not args.disable_binf,
                                 time_budget=_budget(args))
        except SlotTooLarge as exc:
            raise UsageError(f"{exc}; use --mode auto to allow heuristic slots") from exc
    _emit(res.to_dict(), args, "solution.json")
    if res.status == TIMEOUT:
        return EXIT_TIMEOUT
    return EXIT_INFEASIBLE if res.status == INFEASIBLE else EXIT_OK


def _moments(text):
    vals = [float(v) for v in text.split(",")]
    if len(vals) != 5:
        raise UsageError("--moments takes mx,my,sxx,sxy,syy")
    mx, my, sxx, sxy, syy = vals
    return maxent.SpatialMoments((mx, my), ((sxx, sxy), (sxy, syy)))


def cmd_approximate(args):
    sc = _load_slotted(args.instance)
    inst, part, asg = sc.instance, sc.partition, sc.assignment
    n, m, area = inst.n, part.m, inst.area
    lo, hi = approx.mts_bounds(n, m, area)
    out = {
        "n": n, "m": m, "area": area, "horizon": part.horizon,
        "beta": approx.beta_lookup(n),
        "bhh": approx.bhh_length(n, area),
        "mits": approx.mits_length(n, m, area),
        "mts": approx.mts_length(n, part, area),
        "sampling": approx.sampling_length(asg.counts, area),
        "mts_bounds": [lo, hi],
    }
    if args.moments or args.mu_g is not None:
        spatial = _moments(args.moments) if args.moments else None
        out["worst_case_mits"] = maxent.wc_mits_length(n, m, area, spatial, args.mu_g)
    _emit(out, args, "approximations.json")
    return EXIT_OK


def cmd_feasibility(args):
    sc = _load_slotted(args.instance)
    inst, part, asg = sc.instance, sc.partition, sc.assignment
    dist = approx.feasible_distributional(inst.n, part, inst.area)
    sampled = approx.feasible_sampled(asg.counts, part, inst.area)
    out = {"distributional": {"feasible": dist.feasible, "n_max": dist.n_max,
                              "l_min_required": dist.l_min_required},
           "sampled": {"feasible": sampled}}
    if args.moments or args.mu_g is not None:
        spatial = _moments(args.moments) if args.moments else None
        wc = maxent.wc_satisfiability(inst.n, part.m, inst.area, part.horizon, spatial, args.mu_g)
        out["worst_case"] = wc._asdict()
    _emit(out, args, "feasibility.json")
    required = {"distributional": dist.feasible, "sampled": sampled, None: True}[args.require]
    return EXIT_OK if required else EXIT_INFEASIBLE


def cmd_experiment(args):
    raw = json.loads(Path(args.manifest).read_text())
    if "time_budget" not in raw or args.time_budget_given:
        raw["time_budget"] = _budget(args)
    if "exact_threshold" not in raw or args.exact_threshold_given:
        raw["exact_threshold"] = args.exact_threshold
    if args.workers is not None:
        raw["workers"] = args.workers
    try:
        man = harness.Manifest.from_dict(raw, args.seed if args.seed_given else None)
    except (TypeError, ValueError) as exc:
        raise UsageError(f"bad manifest: {exc}") from exc
    result = harness.run_experiment(man)
    files = harness.write_experiment(result, args.out_dir or ".", plots=not args.no_plots)
    timeouts = sum(g.status == TIMEOUT for g in result.gaps)
    print(json.dumps({"records": len(result), "timeouts": timeouts,
                      "files": {k: [str(p) for p in v] if isinstance(v, list) else str(v)
                                for k, v in files.items()}}, indent=2))
    return EXIT_TIMEOUT if 2 * timeouts > len(result) else EXIT_OK


def cmd_induce(args):
    path = Path(args.file)
    if path.suffix == ".json":
        sc = load_scenario(path)
        if sc.time_windows is None:
            raise UsageError(f"{path} has no time windows")
        inst, tw = sc.instance, sc.time_windows
    else:
        bench = genbench.parse_tsptw_instance(path.read_text(), name=path.stem, side_a=args.side)
        inst, tw = bench.instance, bench.time_windows
    area = inst.area if args.side is None else args.side ** 2
    ind = approx.induced_time_slots(tw)
    out = {
        "name": path.stem, "n": inst.n, "horizon": tw.horizon, "area": area,
        "m_star": ind.m_star, "m1": ind.m1, "m2": ind.m2,
        "slot_bounds": list(ind.partition.bounds), "covered": list(ind.covered),
        "min_slot_frac": args.min_slot_frac,
        "upper_bound": approx.tsptw_upper_bound(tw, inst.n, area, min_slot_frac=args.min_slot_frac),
    }
    _emit(out, args, f"{path.stem}_induced.json")
    return EXIT_OK


# --- parser ----------------------------------------------------------------------

def build_parser():
    p = argparse.ArgumentParser(prog="tspts", description="Time-slot TSP approximations and exact solver.")
    _global_flags(p, suppress=False)
    sub = p.add_subparsers(dest="command", required=True)
    common = argparse.ArgumentParser(add_help=False)
    _global_flags(common, suppress=True)

    g = sub.add_parser("generate", parents=[common], help="write random instances as JSON")
    g.add_argument("--config", help="GenConfig JSON file")
    g.add_argument("--n", type=int, help="points including the depot")
    g.add_argument("--m", type=int, help="number of slots")
    g.add_argument("--side", type=float, default=50.0)
    g.add_argument("--horizon", type=float, default=None, help="default 15 * side * sqrt(2)")
    g.add_argument("--ts", default="identical", help="identical or repulsion:<p>")
    g.add_argument("--mode", default="uniform", choices=genbench.TEMPORAL_MODES)
    g.add_argument("--count", type=int, default=1)
    g.set_defaults(func=cmd_generate)

    s = sub.add_parser("solve", parents=[common], help="exact tour of a slotted instance")
    s.add_argument("instance")
    s.add_argument("--mode", default="exact", choices=("exact", "auto", "heuristic"))
    s.add_argument("--brute-force", action="store_true", help="enumerate orders (small instances)")
    s.add_argument("--disable-dominance", action="store_true")
    s.add_argument("--disable-binf", action="store_true")
    s.add_argument("--force-heuristic", action="store_true")
    s.set_defaults(func=cmd_solve)

    for name, func, help_ in (("approximate", cmd_approximate, "closed-form tour lengths"),
                              ("feasibility", cmd_feasibility, "feasibility predicates")):
        a = sub.add_parser(name, parents=[common], help=help_)
        a.add_argument("instance")
        a.add_argument("--moments", help="spatial moments mx,my,sxx,sxy,syy for the worst case")
        a.add_argument("--mu-g", type=int, default=None, help="mean slot index for the worst case")
        if name == "feasibility":
            a.add_argument("--require", choices=("distributional", "sampled"), default=None,
                           help="exit 1 unless this predicate holds")
        a.set_defaults(func=func)

    e = sub.add_parser("experiment", parents=[common], help="run a manifest sweep")
    e.add_argument("manifest")
    e.add_argument("--workers", type=int, default=None)
    e.add_argument("--no-plots", action="store_true")
    e.set_defaults(func=cmd_experiment)

    i = sub.add_parser("induce", parents=[common], help="induced slots of a TSP-TW instance")
    i.add_argument("file", help="Dumas-format text file or scenario JSON with time windows")
    i.add_argument("--side", type=float, default=None, help="square side; default from coordinates")
    i.add_argument("--min-slot-frac", type=float, default=0.0)
    i.set_defaults(func=cmd_induce)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    args = parser.parse_args(argv)
    # record which globals were set explicitly so manifests keep their own values
    for key in ("seed", "exact_threshold", "time_budget"):
        flag = "--" + key.replace("_", "-")
        setattr(args, f"{key}_given", any(a == flag or a.startswith(flag + "=") for a in argv))
    try:
        return args.func(args)
    except (UsageError, ValueError, OSError, KeyError) as exc:
        print(f"tspts {args.command}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
