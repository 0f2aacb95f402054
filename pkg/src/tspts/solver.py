"""Exact tour search on the slot DAG, plus a brute-force reference solver.

Labels carry travel cost, arrival time and an optimistic completion bound.
Waiting is allowed and is not part of the cost.
"""
from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Optional

from .dag import SlotDag
from .model import Instance, SlotAssignment, SlotPartition

INFEASIBLE = "infeasible"
OPTIMAL = "optimal"
TIMEOUT = "timeout"


class SolveTimeout(RuntimeError):
    pass


class Label:
    __slots__ = ("vertex", "cost", "time", "binf", "pred", "alive")

    def __init__(self, vertex, cost, time, binf, pred=None):
        self.vertex = vertex
        self.cost = cost
        self.time = time
        self.binf = binf
        self.pred = pred
        self.alive = True

    def chain(self):
        out = []
        label = self
        while label is not None:
            out.append(label)
            label = label.pred
        return out[::-1]

    def __repr__(self):
        return f"Label(v={self.vertex}, cost={self.cost:.4f}, time={self.time:.4f}, binf={self.binf:.4f})"


@dataclass
class SolveResult:
    status: str
    cost: float = math.inf
    order: list = field(default_factory=list)        # point indices, depot at both ends
    arrive_times: list = field(default_factory=list)
    stats: dict = field(default_factory=dict)

    @property
    def feasible(self) -> bool:
        return self.status == OPTIMAL

    def to_dict(self) -> dict:
        return {
            "status": self.status,
            "cost": self.cost if math.isfinite(self.cost) else None,
            "order": list(self.order),
            "arrive_times": list(self.arrive_times),
            "stats": dict(self.stats),
        }


def _extend(dag: SlotDag, label: Label, w: int, cost: float):
    """Arrival at ``w`` after ``label``, or None if it misses w's window."""
    vw = dag.vertices[w]
    t = max(label.time + cost, vw.start)
    if t > vw.finish:
        return None
    return t


def greedy_path(dag: SlotDag):
    """Follow the cheapest time-feasible arc from the source.

    Returns the sink label, or None when the walk gets stuck.
    """
    label = Label(dag.source, 0.0, 0.0, 0.0)
    while label.vertex != dag.sink:
        best = None
        for w, c in sorted(dag.out_arcs[label.vertex], key=lambda a: (a[1], a[0])):
            t = _extend(dag, label, w, c)
            if t is not None:
                best = Label(w, label.cost + c, t, label.cost + c, label)
                break
        if best is None:
            return None
        label = best
    return label


def greedy_cost(dag: SlotDag) -> float:
    label = greedy_path(dag)
    return math.inf if label is None else label.cost


def _tour_from(dag: SlotDag, sink_label: Label):
    order, times = [0], [0.0]
    chain = sink_label.chain()
    for a, b in zip(chain[1:-1], chain[2:-1]):
        va, vb = dag.vertices[a.vertex], dag.vertices[b.vertex]
        if va.role != "entry" or vb.role != "exit":
            continue
        dist = dag.blocks[va.slot].dist
        pos = {p: i for i, p in enumerate(dag.blocks[va.slot].clients)}
        path = dag.intra_path(va.slot, va.point, vb.point)
        t = a.time
        for prev, cur in zip([None] + path[:-1], path):
            if prev is not None:
                t += float(dist[pos[prev], pos[cur]])
            order.append(cur)
            times.append(t)
    order.append(0)
    times.append(sink_label.time)
    return order, times


def solve(dag: SlotDag, dominance: bool = True, use_binf: bool = True,
          deadline: Optional[float] = None) -> SolveResult:
    """Label-setting shortest path from source to sink with time windows.

    Levels are processed in order; at each vertex labels are expanded by
    increasing cost. A new label is dropped when another label at the same
    vertex is no worse in both cost and arrival time, and when its cost
    plus the cheapest level-to-level arcs left exceeds the incumbent.
    ``deadline`` is a ``time.monotonic()`` value.
    """
    t0 = time.monotonic()
    stats = {"labels_created": 1, "labels_dominated": 0, "labels_pruned_by_bound": 0,
             "hamiltonian_oracle_calls": dag.oracle_calls, "exact": dag.exact}
    tail = dag.lower_bound_tail()
    best = greedy_path(dag)
    bks = math.inf if best is None else best.cost
    stats["greedy_cost"] = bks

    by_level = [[] for _ in range(dag.nv_max + 1)]
    for v in dag.vertices:
        by_level[v.level].append(v.id)
    labels = [[] for _ in dag.vertices]
    labels[dag.source].append(Label(dag.source, 0.0, 0.0, -math.inf))

    for level in range(dag.nv_max):
        for v in by_level[level]:
            queue = sorted((l for l in labels[v] if l.alive), key=lambda l: (l.cost, l.time))
            for n in queue:
                if deadline is not None and time.monotonic() > deadline:
                    raise SolveTimeout("time budget exhausted")
                if use_binf and n.binf > bks:
                    stats["labels_pruned_by_bound"] += 1
                    continue
                for w, c in dag.out_arcs[v]:
                    t = _extend(dag, n, w, c)
                    if t is None:
                        continue
                    cost = n.cost + c
                    binf = cost + tail[dag.vertices[w].level]
                    if use_binf and binf > bks:
                        stats["labels_pruned_by_bound"] += 1
                        continue
                    if dominance:
                        if any(o.cost <= cost and o.time <= t for o in labels[w]):
                            stats["labels_dominated"] += 1
                            continue
                        kept = []
                        for o in labels[w]:
                            if cost <= o.cost and t <= o.time:
                                o.alive = False
                                stats["labels_dominated"] += 1
                            else:
                                kept.append(o)
                        labels[w] = kept
                    m = Label(w, cost, t, binf, n)
                    labels[w].append(m)
                    stats["labels_created"] += 1
                    if w == dag.sink and cost < bks:
                        bks, best = cost, m

    stats["wall_time"] = time.monotonic() - t0
    if best is None:
        return SolveResult(INFEASIBLE, stats=stats)
    order, times = _tour_from(dag, best)
    return SolveResult(OPTIMAL, best.cost, order, times, stats)


def solve_instance(instance: Instance, partition: SlotPartition, assignment: SlotAssignment,
                   mode: str = "exact", exact_threshold: int = 18, dominance: bool = True,
                   use_binf: bool = True, time_budget: Optional[float] = None) -> SolveResult:
    """Build the DAG and solve it; a blown time budget gives status ``timeout``."""
    from .dag import build_dag

    t0 = time.monotonic()
    deadline = None if time_budget is None else t0 + time_budget
    try:
        dag = build_dag(instance, partition, assignment, mode, exact_threshold)
        if deadline is not None and time.monotonic() > deadline:
            raise SolveTimeout("time budget exhausted while building the DAG")
        res = solve(dag, dominance, use_binf, deadline)
    except SolveTimeout:
        return SolveResult(TIMEOUT, stats={"wall_time": time.monotonic() - t0})
    res.stats["wall_time"] = time.monotonic() - t0
    return res


def brute_force_solve(instance: Instance, partition: SlotPartition, assignment: SlotAssignment,
                      max_clients: int = 10) -> SolveResult:
    """Enumerate visiting orders, simulating arrival times with waiting.

    A prefix that misses a window is abandoned together with all its
    completions, since arrival times only grow.
    """
    n = instance.n_clients
    if n > max_clients:
        raise ValueError(f"brute force limited to {max_clients} clients, got {n}")
    D = instance.distances()
    h = partition.horizon
    windows = [None] + [partition.slot(k) for k in assignment.slot_of_client]
    best = [math.inf, None, None]
    order, times = [0], [0.0]
    todo = set(range(1, n + 1))

    def visit(cur, t, cost):
        if not todo:
            back = float(t + D[cur, 0])
            total = float(cost + D[cur, 0])
            if back <= h and total < best[0]:
                best[:] = [total, order + [0], times + [back]]
            return
        for j in sorted(todo):
            b, f = windows[j]
            tj = max(float(t + D[cur, j]), b)
            if tj > f:
                continue
            todo.remove(j)
            order.append(j)
            times.append(tj)
            visit(j, tj, cost + D[cur, j])
            order.pop()
            times.pop()
            todo.add(j)

    visit(0, 0.0, 0.0)
    if best[1] is None:
        return SolveResult(INFEASIBLE, stats={"exact": True})
    return SolveResult(OPTIMAL, float(best[0]), best[1], best[2], {"exact": True})
