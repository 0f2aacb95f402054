"""Layered DAG of a time-slot instance.

Each non-empty slot contributes one entry and one exit copy of each of its
clients. An entry->exit arc inside a slot costs the shortest Hamiltonian
path through the whole slot between those two clients; exits connect to
the entries of the next non-empty slot at the direct distance. Any
source-to-sink path is therefore a complete tour.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .hamiltonian import (EXACT_THRESHOLD, SlotTooLarge, exact_path,
                          hamiltonian_all_pairs, heuristic_hamiltonian)
from .model import Instance, SlotAssignment, SlotPartition

MODES = ("exact", "auto", "heuristic")


@dataclass(frozen=True)
class Vertex:
    id: int
    point: int       # index into Instance.points
    slot: int        # 1-based slot, 0 for the source, m + 1 for the sink
    role: str        # source | entry | exit | sink
    level: int
    start: float
    finish: float


@dataclass(frozen=True)
class SlotBlock:
    """Clients of one slot and how their Hamiltonian paths were computed."""
    slot: int
    clients: tuple
    dist: np.ndarray
    exact: bool


@dataclass(frozen=True)
class SlotDag:
    vertices: tuple
    out_arcs: tuple          # out_arcs[v] = ((w, cost), ...)
    nv_max: int
    dist_min: tuple          # dist_min[p] = cheapest arc from level p to p + 1
    blocks: dict             # slot -> SlotBlock
    exact: bool
    oracle_calls: int

    @property
    def source(self) -> int:
        return 0

    @property
    def sink(self) -> int:
        return len(self.vertices) - 1

    @property
    def arcs(self) -> list:
        return [(v, w, c) for v, out in enumerate(self.out_arcs) for w, c in out]

    def lower_bound_tail(self) -> list:
        """tail[p] = sum of dist_min over levels p..nv_max-1."""
        tail = [0.0] * (self.nv_max + 1)
        for p in range(self.nv_max - 1, -1, -1):
            tail[p] = tail[p + 1] + self.dist_min[p]
        return tail

    def intra_path(self, slot: int, entry_point: int, exit_point: int) -> list:
        """Original point indices along the slot path used by an entry->exit arc."""
        block = self.blocks[slot]
        pos = {p: i for i, p in enumerate(block.clients)}
        i, j = pos[entry_point], pos[exit_point]
        if len(block.clients) == 1:
            return [entry_point]
        if block.exact:
            _, order = exact_path(block.dist, i, j)
        else:
            _, order = heuristic_hamiltonian(block.dist, min(i, j), max(i, j))
            if i > j:
                order = order[::-1]
        return [block.clients[k] for k in order]


def build_dag(instance: Instance, partition: SlotPartition, assignment: SlotAssignment,
              mode: str = "exact", exact_threshold: int = EXACT_THRESHOLD) -> SlotDag:
    """Build the slot DAG. Empty slots are skipped.

    ``mode`` is ``exact`` (oversized slots raise ``SlotTooLarge``), ``auto``
    (heuristic paths above ``exact_threshold``) or ``heuristic`` (heuristic
    paths everywhere).
    """
    if mode not in MODES:
        raise ValueError(f"mode must be one of {MODES}")
    if assignment.m != partition.m:
        raise ValueError("assignment and partition disagree on the slot count")
    if len(assignment.slot_of_client) != instance.n_clients:
        raise ValueError("assignment does not cover every client")
    D = instance.distances()
    h = partition.horizon
    slots = [k for k in range(1, partition.m + 1) if assignment.counts[k - 1] > 0]

    vertices = [Vertex(0, 0, 0, "source", 0, 0.0, h)]
    arcs = {0: []}
    blocks = {}
    layers = []          # per non-empty slot: (entry ids, exit ids)
    exact = True
    calls = 0

    def add(point, slot, role, level, start, finish):
        v = Vertex(len(vertices), point, slot, role, level, start, finish)
        vertices.append(v)
        arcs[v.id] = []
        return v.id

    for r, k in enumerate(slots):
        clients = tuple(assignment.clients_in(k))
        sub = D[np.ix_(clients, clients)]
        s = len(clients)
        if mode == "exact" and s > exact_threshold:
            raise SlotTooLarge(f"slot {k} has {s} clients, above exact threshold {exact_threshold}")
        if mode == "heuristic" and s > 1:
            H, block_exact = hamiltonian_all_pairs(sub, exact_threshold=0, heuristic=True)
        else:
            H, block_exact = hamiltonian_all_pairs(sub, exact_threshold, heuristic=True)
        calls += 1
        exact &= block_exact
        blocks[k] = SlotBlock(k, clients, sub, block_exact)
        start, finish = partition.slot(k)
        entries = [add(p, k, "entry", 2 * r + 1, start, finish) for p in clients]
        exits = [add(p, k, "exit", 2 * r + 2, start, finish) for p in clients]
        for a, ea in enumerate(entries):
            for b, xb in enumerate(exits):
                if s == 1:
                    arcs[ea].append((xb, 0.0))
                elif a != b:
                    arcs[ea].append((xb, float(H[a, b])))
        layers.append((entries, exits))

    sink = add(0, partition.m + 1, "sink", 2 * len(slots) + 1, 0.0, h)
    if not layers:
        arcs[0].append((sink, 0.0))
    else:
        for v in layers[0][0]:
            arcs[0].append((v, float(D[0, vertices[v].point])))
        for (_, exits), (entries, _) in zip(layers[:-1], layers[1:]):
            for x in exits:
                for e in entries:
                    arcs[x].append((e, float(D[vertices[x].point, vertices[e].point])))
        for x in layers[-1][1]:
            arcs[x].append((sink, float(D[vertices[x].point, 0])))

    nv_max = vertices[sink].level
    dist_min = [np.inf] * nv_max
    for v, out in arcs.items():
        p = vertices[v].level
        for _, c in out:
            dist_min[p] = min(dist_min[p], c)
    out_arcs = tuple(tuple(arcs[v]) for v in range(len(vertices)))
    return SlotDag(tuple(vertices), out_arcs, nv_max, tuple(dist_min), blocks, exact, calls)
