"""Instances, slot partitions, time windows and the instance JSON format."""
from __future__ import annotations

import bisect
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Sequence

import numpy as np


def euclidean_distance(p, q) -> float:
    """Planar Euclidean distance; speed is one length unit per time unit."""
    return math.hypot(q[0] - p[0], q[1] - p[1])


def distance_matrix(points) -> np.ndarray:
    pts = np.asarray(points, dtype=float).reshape(-1, 2)
    diff = pts[:, None, :] - pts[None, :, :]
    return np.hypot(diff[..., 0], diff[..., 1])


@dataclass(frozen=True)
class Instance:
    """Depot plus clients on the square [0, side_a]^2.

    ``points[0]`` is the depot. Service times exist for completeness but are
    always zero.
    """

    points: tuple
    side_a: float
    horizon_h: float
    service_times: tuple = ()

    def __post_init__(self):
        pts = tuple((float(x), float(y)) for x, y in self.points)
        if not pts:
            raise ValueError("an instance needs at least the depot")
        if self.horizon_h <= 0:
            raise ValueError(f"horizon must be positive, got {self.horizon_h}")
        if self.side_a < 0:
            raise ValueError(f"side must be non-negative, got {self.side_a}")
        for x, y in pts:
            if not (0.0 <= x <= self.side_a and 0.0 <= y <= self.side_a):
                raise ValueError(f"point ({x}, {y}) outside [0, {self.side_a}]^2")
        service = tuple(float(s) for s in self.service_times) or (0.0,) * len(pts)
        if len(service) != len(pts):
            raise ValueError("service_times must match points in length")
        if any(s != 0.0 for s in service):
            raise ValueError("non-zero service times are not supported")
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "service_times", service)
        object.__setattr__(self, "side_a", float(self.side_a))
        object.__setattr__(self, "horizon_h", float(self.horizon_h))

    @property
    def n(self) -> int:
        """Number of points including the depot."""
        return len(self.points)

    @property
    def n_clients(self) -> int:
        return len(self.points) - 1

    @property
    def area(self) -> float:
        return self.side_a * self.side_a

    def distances(self) -> np.ndarray:
        return distance_matrix(self.points)


@dataclass(frozen=True)
class SlotPartition:
    """Contiguous slots ``[c_{k-1}, c_k]`` covering ``[0, h]``.

    Slot indices are 1-based. Membership is half-open ``[c_{k-1}, c_k)``
    except for the last slot, which also contains ``h``.
    """

    bounds: tuple
    merged: int = 0

    @property
    def m(self) -> int:
        return len(self.bounds) - 1

    @property
    def horizon(self) -> float:
        return self.bounds[-1]

    @property
    def lengths(self) -> tuple:
        return tuple(b - a for a, b in zip(self.bounds[:-1], self.bounds[1:]))

    @property
    def l_min(self) -> float:
        return min(self.lengths)

    def slot(self, k: int) -> tuple:
        """Return ``(start, finish)`` of slot ``k`` (1-based)."""
        if not 1 <= k <= self.m:
            raise IndexError(f"slot {k} outside 1..{self.m}")
        return self.bounds[k - 1], self.bounds[k]


def validate_partition(bounds: Sequence[float], h: float) -> SlotPartition:
    """Check and normalize slot boundaries; repeated values are collapsed."""
    b = [float(x) for x in bounds]
    if len(b) < 2:
        raise ValueError("a partition needs at least the bounds 0 and h")
    if any(y < x for x, y in zip(b[:-1], b[1:])):
        raise ValueError(f"slot bounds are not sorted: {b}")
    if b[0] != 0.0:
        raise ValueError(f"first bound must be 0, got {b[0]}")
    if b[-1] != float(h):
        raise ValueError(f"last bound must equal the horizon {h}, got {b[-1]}")
    unique = [b[0]]
    for x in b[1:]:
        if x != unique[-1]:
            unique.append(x)
    if len(unique) < 2:
        raise ValueError("horizon must be positive")
    return SlotPartition(bounds=tuple(unique), merged=len(b) - len(unique))


def identical_partition(m: int, h: float) -> SlotPartition:
    if m < 1:
        raise ValueError("need at least one slot")
    bounds = [k * h / m for k in range(m)] + [float(h)]
    return validate_partition(bounds, h)


def slot_index_of(partition: SlotPartition, t: float) -> int:
    """1-based index of the slot containing time ``t``."""
    b = partition.bounds
    if not (b[0] <= t <= b[-1]):
        raise ValueError(f"time {t} outside [0, {b[-1]}]")
    if t == b[-1]:
        return partition.m
    return bisect.bisect_right(b, t)


@dataclass(frozen=True)
class TimeWindowSet:
    """Per-client windows ``(b_i, f_i)``; the depot window is ``(0, h)``."""

    windows: tuple
    horizon: float

    def __post_init__(self):
        ws = tuple((float(b), float(f)) for b, f in self.windows)
        for i, (b, f) in enumerate(ws, start=1):
            if not (0.0 <= b < f <= self.horizon):
                raise ValueError(f"client {i}: bad window [{b}, {f}] for h={self.horizon}")
        object.__setattr__(self, "windows", ws)
        object.__setattr__(self, "horizon", float(self.horizon))

    def __len__(self):
        return len(self.windows)


@dataclass(frozen=True)
class SlotAssignment:
    """Slot index (1-based) of every client; ``slot_of_client[i]`` is client i+1."""

    slot_of_client: tuple
    m: int
    counts: tuple = field(init=False)

    def __post_init__(self):
        slots = tuple(int(k) for k in self.slot_of_client)
        if any(not 1 <= k <= self.m for k in slots):
            raise ValueError(f"slot index outside 1..{self.m}")
        counts = [0] * self.m
        for k in slots:
            counts[k - 1] += 1
        object.__setattr__(self, "slot_of_client", slots)
        object.__setattr__(self, "counts", tuple(counts))

    def clients_in(self, k: int) -> list:
        """Original point indices (1-based clients) assigned to slot ``k``."""
        return [i + 1 for i, s in enumerate(self.slot_of_client) if s == k]


@dataclass(frozen=True)
class Scenario:
    """An instance together with its temporal data, as stored on disk."""

    instance: Instance
    partition: Optional[SlotPartition] = None
    assignment: Optional[SlotAssignment] = None
    time_windows: Optional[TimeWindowSet] = None
    name: str = ""

    def to_dict(self) -> dict:
        d = {
            "side_a": self.instance.side_a,
            "horizon_h": self.instance.horizon_h,
            "points": [list(p) for p in self.instance.points],
        }
        if self.name:
            d["name"] = self.name
        if self.partition is not None:
            d["slot_bounds"] = list(self.partition.bounds)
        if self.assignment is not None:
            d["slot_assignment"] = list(self.assignment.slot_of_client)
        if self.time_windows is not None:
            d["time_windows"] = [list(w) for w in self.time_windows.windows]
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "Scenario":
        inst = Instance(points=d["points"], side_a=d["side_a"], horizon_h=d["horizon_h"])
        has_slots = "slot_bounds" in d or "slot_assignment" in d
        if has_slots and "time_windows" in d:
            raise ValueError("give either slot_bounds/slot_assignment or time_windows, not both")
        partition = assignment = tw = None
        if "slot_bounds" in d:
            partition = validate_partition(d["slot_bounds"], inst.horizon_h)
        if "slot_assignment" in d:
            if partition is None:
                raise ValueError("slot_assignment requires slot_bounds")
            assignment = SlotAssignment(d["slot_assignment"], partition.m)
            if len(assignment.slot_of_client) != inst.n_clients:
                raise ValueError("slot_assignment length must equal the number of clients")
        if "time_windows" in d:
            tw = TimeWindowSet(d["time_windows"], inst.horizon_h)
            if len(tw) != inst.n_clients:
                raise ValueError("time_windows length must equal the number of clients")
        return cls(inst, partition, assignment, tw, d.get("name", ""))


def load_scenario(path) -> Scenario:
    return Scenario.from_dict(json.loads(Path(path).read_text()))


def save_scenario(scenario: Scenario, path) -> None:
    Path(path).write_text(json.dumps(scenario.to_dict(), indent=2) + "\n")
