"""Random TSP-TS instances and TSP-TW benchmark files.

Randomness comes from numpy ``Generator`` objects. ``stream(seed, index,
purpose)`` derives an independent generator per (instance, purpose) from a
``SeedSequence`` spawn key, so spatial, partition and temporal draws of the
same instance never share a stream. A redraw of a rejected instance appends
the attempt number to the key.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass
from typing import Optional

import numpy as np

from .model import (Instance, Scenario, SlotAssignment, SlotPartition,
                    TimeWindowSet, identical_partition, slot_index_of,
                    validate_partition)

PURPOSES = {"spatial": 0, "partition": 1, "temporal": 2, "relax": 3}
TEMPORAL_MODES = ("uniform", "one_mode", "two_mode")
PAPER_REPULSION = (20, 50, 100, 150)


def stream(seed: int, index: int, purpose: str, attempt: int = 0) -> np.random.Generator:
    key = (int(index), PURPOSES[purpose]) + ((int(attempt),) if attempt else ())
    ss = np.random.SeedSequence(seed, spawn_key=key)
    return np.random.Generator(np.random.PCG64(ss))


def default_horizon(a: float) -> float:
    """Fifteen times the diagonal of the square."""
    return 15.0 * a * math.sqrt(2.0)


def generate_points(n: int, a: float, rng: np.random.Generator) -> list:
    """``n`` i.i.d. uniform points on ``[0, a]^2``; the first one is the depot."""
    if n < 1:
        raise ValueError("need at least one point")
    pts = rng.uniform(0.0, 1.0, size=(n, 2)) * a
    return [tuple(p) for p in pts.tolist()]


def repulsion_partition(m: int, h: float, p: int, rng: np.random.Generator) -> SlotPartition:
    """Keep every p-th of ``p*m - 1`` sorted uniform draws as slot bounds."""
    if m < 1 or p < 1:
        raise ValueError(f"need m >= 1 and p >= 1, got m={m}, p={p}")
    draws = np.sort(rng.uniform(0.0, h, size=p * m - 1))
    inner = [float(draws[p * l - 1]) for l in range(1, m)]
    return validate_partition([0.0] + inner + [float(h)], h)


def _truncated_normal(rng, mean, sd, lo, hi, count):
    out = np.empty(count)
    filled = 0
    while filled < count:
        x = rng.normal(mean, sd, size=count - filled)
        x = x[(x >= lo) & (x <= hi)]
        out[filled:filled + len(x)] = x
        filled += len(x)
    return out


def sample_client_times(count: int, h: float, mode: str, rng: np.random.Generator) -> list:
    """Client times on ``[0, h]``; normal draws outside the horizon are redrawn."""
    if mode == "uniform":
        return rng.uniform(0.0, h, size=count).tolist()
    if mode == "one_mode":
        return _truncated_normal(rng, h / 2, h / 4, 0.0, h, count).tolist()
    if mode == "two_mode":
        out = []
        for _ in range(count):
            mean = h / 4 if rng.random() < 0.5 else 3 * h / 4
            out.append(float(_truncated_normal(rng, mean, h / 4, 0.0, h, 1)[0]))
        return out
    raise ValueError(f"unknown temporal mode {mode!r}")


def assign_to_slots(times, partition: SlotPartition) -> SlotAssignment:
    return SlotAssignment([slot_index_of(partition, t) for t in times], partition.m)


def parse_ts_scheme(ts: str):
    """``identical`` or ``repulsion:<p>``; returns the repulsion p or None."""
    if ts == "identical":
        return None
    kind, _, p = ts.partition(":")
    if kind != "repulsion" or not p.isdigit() or int(p) < 1:
        raise ValueError(f"bad slot scheme {ts!r}; use 'identical' or 'repulsion:<p>'")
    return int(p)


@dataclass
class GenConfig:
    n: int
    m: int
    side_a: float = 50.0
    horizon_h: Optional[float] = None
    ts_scheme: str = "identical"
    temporal_mode: str = "uniform"
    seed: int = 0

    def __post_init__(self):
        if self.n < 2 or self.m < 1:
            raise ValueError(f"need n >= 2 and m >= 1, got n={self.n}, m={self.m}")
        parse_ts_scheme(self.ts_scheme)
        if self.temporal_mode not in TEMPORAL_MODES:
            raise ValueError(f"temporal_mode must be one of {TEMPORAL_MODES}")
        if self.horizon_h is None:
            self.horizon_h = default_horizon(self.side_a)
        if self.horizon_h <= 0:
            raise ValueError("horizon must be positive")

    def to_json(self) -> str:
        return json.dumps(asdict(self), sort_keys=True)

    @classmethod
    def from_json(cls, text: str) -> "GenConfig":
        return cls(**json.loads(text))


def generate_instance(config: GenConfig, index: int = 0, attempt: int = 0) -> Scenario:
    """Instance ``index`` of a config: uniform points, slots, client times."""
    h = config.horizon_h
    points = generate_points(config.n, config.side_a, stream(config.seed, index, "spatial", attempt))
    p = parse_ts_scheme(config.ts_scheme)
    if p is None:
        partition = identical_partition(config.m, h)
    else:
        partition = repulsion_partition(config.m, h, p, stream(config.seed, index, "partition", attempt))
    times = sample_client_times(config.n - 1, h, config.temporal_mode,
                                stream(config.seed, index, "temporal", attempt))
    assignment = assign_to_slots(times, partition)
    inst = Instance(points, config.side_a, h)
    name = f"n{config.n}-m{config.m}-{config.ts_scheme}-{config.temporal_mode}-s{config.seed}-i{index}"
    if attempt:
        name += f"-a{attempt}"
    return Scenario(inst, partition, assignment, name=name)


def paper_configs(side_a: float = 50.0, seed: int = 0):
    """Full factorial layout: n in {21..101}, m in 1..10, five slot schemes, three modes."""
    schemes = ["identical"] + [f"repulsion:{p}" for p in PAPER_REPULSION]
    for n in (21, 41, 61, 81, 101):
        for m in range(1, 11):
            for ts in schemes:
                for mode in TEMPORAL_MODES:
                    yield GenConfig(n, m, side_a, None, ts, mode, seed)


# --- literature TSP-TW files -------------------------------------------------

@dataclass(frozen=True)
class BenchmarkInstance:
    instance: Instance
    time_windows: TimeWindowSet
    name: str = ""
    dataset: str = ""
    best_known: Optional[float] = None

    def scenario(self) -> Scenario:
        return Scenario(self.instance, time_windows=self.time_windows, name=self.name)


def _numbers(line):
    try:
        return [float(tok) for tok in line.split()]
    except ValueError:
        return None


def parse_tsptw_instance(text: str, name: str = "", dataset: str = "",
                         side_a: Optional[float] = None,
                         best_known: Optional[float] = None) -> BenchmarkInstance:
    """Read a Dumas/Gendreau style file.

    Node lines hold ``id x y demand ready due service``; header and blank
    lines are skipped and an id of 999 ends the node list. The first node is
    the depot and its due date is the horizon. Without ``side_a`` the square
    side is the largest coordinate.
    """
    rows = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        nums = _numbers(line)
        if nums is None:
            if rows:
                raise ValueError(f"line {lineno}: non-numeric data after node lines")
            continue
        if len(nums) < 7:
            if rows:
                raise ValueError(f"line {lineno}: expected 7 columns, got {len(nums)}")
            continue
        if int(nums[0]) == 999:
            break
        rows.append(nums[:7])
    if not rows:
        raise ValueError("no node lines found")
    coords = [(r[1], r[2]) for r in rows]
    horizon = rows[0][5]
    if side_a is None:
        side_a = max(max(x, y) for x, y in coords)
    windows = [(r[4], r[5]) for r in rows[1:]]
    inst = Instance(coords, side_a, horizon)
    return BenchmarkInstance(inst, TimeWindowSet(windows, horizon), name, dataset, best_known)


def relax_time_windows(bench: BenchmarkInstance, w: float, rng: np.random.Generator) -> TimeWindowSet:
    """Width-``w`` windows centred on N(h/2, h/8) draws kept inside the horizon."""
    h = bench.instance.horizon_h
    if not 0 < w <= h:
        raise ValueError(f"window width must lie in (0, {h}], got {w}")
    count = bench.instance.n_clients
    lo, hi = w / 2, h - w / 2
    if hi - lo <= 0:
        centers = np.full(count, h / 2)
    else:
        centers = _truncated_normal(rng, h / 2, h / 8, lo, hi, count)
    windows = [(max(0.0, c - w / 2), min(h, c + w / 2)) for c in centers]
    return TimeWindowSet(windows, h)
