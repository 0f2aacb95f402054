"""Generate one instance, compare the closed-form lengths with the exact tour."""
from tspts import approx, genbench
from tspts.solver import solve_instance

cfg = genbench.GenConfig(n=41, m=4, ts_scheme="repulsion:20", seed=3)
sc = genbench.generate_instance(cfg, index=0)
inst, part, asg = sc.instance, sc.partition, sc.assignment
print(f"{sc.name}: slot bounds {[round(c, 1) for c in part.bounds]}, clients per slot {asg.counts}")

mts = approx.mts_length(inst.n, part, inst.area)
sampled = approx.sampling_length(asg.counts, inst.area)
print(f"bhh {approx.bhh_length(inst.n, inst.area):.1f}  mts {mts:.1f}  "
      f"mits {approx.mits_length(inst.n, part.m, inst.area):.1f}  sampled {sampled:.1f}")
print("distributional feasible:", approx.feasible_distributional(inst.n, part, inst.area).feasible,
      " sampled feasible:", approx.feasible_sampled(asg.counts, part, inst.area))

res = solve_instance(inst, part, asg, mode="exact", time_budget=60)
print(f"exact: {res.status}", end="")
if res.feasible:
    print(f", cost {res.cost:.1f}, gap of mts {100 * (mts - res.cost) / res.cost:+.1f}%, "
          f"of sampled {100 * (sampled - res.cost) / res.cost:+.1f}%")
    print("tour:", res.order)
else:
    print()
print("labels created:", res.stats["labels_created"], " dominated:", res.stats["labels_dominated"])
