"""Closed-form tour-length approximations, bounds and feasibility tests.

All lengths assume uniform points on a square of area ``area`` and the
finite-n BHH constants of ``BETA_TABLE``. ``n`` always counts every point,
depot included.
"""
from __future__ import annotations

import bisect
import math
from dataclasses import dataclass
from typing import NamedTuple, Sequence

from .model import SlotPartition, TimeWindowSet, validate_partition

# Lei et al. for n <= 90, Applegate et al. above.
BETA_TABLE = {
    20: 0.8584265,
    30: 0.8269698,
    40: 0.8129900,
    50: 0.7994125,
    60: 0.7908632,
    70: 0.7817751,
    80: 0.7775367,
    90: 0.7773827,
    100: 0.7764689,
    200: 0.7563542,
    300: 0.7477629,
    400: 0.7428444,
    500: 0.7394544,
    600: 0.7369409,
    700: 0.7349902,
    800: 0.7335751,
    900: 0.7321114,
    1000: 0.7312235,
    2000: 0.7256264,
}
BETA_BOUNDS = (0.62499, 0.91996)

_ANCHORS = sorted(BETA_TABLE)


def beta_lookup(n: int) -> float:
    """BHH constant for ``n`` points.

    Tabulated values are returned as-is. In between, the constant is linear
    in ``1/sqrt(n)``; outside [20, 2000] the nearest end value is used.
    """
    if n < 2:
        raise ValueError(f"beta needs n >= 2, got {n}")
    if n in BETA_TABLE:
        return BETA_TABLE[n]
    if n < _ANCHORS[0]:
        return BETA_TABLE[_ANCHORS[0]]
    if n > _ANCHORS[-1]:
        return BETA_TABLE[_ANCHORS[-1]]
    j = bisect.bisect_left(_ANCHORS, n)
    lo, hi = _ANCHORS[j - 1], _ANCHORS[j]
    x, x0, x1 = n ** -0.5, lo ** -0.5, hi ** -0.5
    w = (x - x0) / (x1 - x0)
    return BETA_TABLE[lo] + w * (BETA_TABLE[hi] - BETA_TABLE[lo])


def _check_area(area):
    if not area > 0:
        raise ValueError(f"area must be positive, got {area}")


def bhh_length(n: int, area: float) -> float:
    _check_area(area)
    return beta_lookup(n) * math.sqrt(n * area)


def mits_length(n: int, m: int, area: float) -> float:
    """Tour length with ``m`` identical slots."""
    if m < 1:
        raise ValueError(f"need at least one slot, got m={m}")
    _check_area(area)
    return bhh_length(n, area) * math.sqrt(m)


def mts_length(n: int, partition: SlotPartition, area: float) -> float:
    """Tour length for arbitrary slot lengths, using expected slot counts."""
    _check_area(area)
    if not isinstance(partition, SlotPartition):
        raise TypeError("partition must be a SlotPartition")
    h = partition.horizon
    factor = math.fsum(math.sqrt(l) for l in partition.lengths) / math.sqrt(h)
    # the factor lies in [1, sqrt(m)] by concavity; clamp away rounding so
    # bhh <= mts <= mits holds exactly in floating point
    factor = min(max(factor, 1.0), math.sqrt(partition.m))
    return bhh_length(n, area) * factor


def sampling_length(counts: Sequence[int], area: float, n: int | None = None) -> float:
    """Tour length from the realized client count of each slot.

    ``counts`` are client counts; the depot is added to the first slot.
    """
    _check_area(area)
    counts = [int(c) for c in counts]
    if not counts or any(c < 0 for c in counts):
        raise ValueError("counts must be a non-empty list of non-negative integers")
    total = sum(counts) + 1
    if n is None:
        n = total
    elif n != total:
        raise ValueError(f"counts sum to {total - 1} clients, expected {n - 1}")
    s = math.sqrt(1 + counts[0]) + math.fsum(math.sqrt(c) for c in counts[1:])
    return beta_lookup(n) * math.sqrt(area) * s


def mts_bounds(n: int, m: int, area: float) -> tuple:
    """(lower, upper) envelope of ``mts_length`` over all partitions with m slots."""
    return bhh_length(n, area), mits_length(n, m, area)


class DistributionalFeasibility(NamedTuple):
    feasible: bool
    n_max: float
    l_min_required: float


def feasible_distributional(n: int, partition: SlotPartition, area: float) -> DistributionalFeasibility:
    """Average-case test against the shortest slot; equality counts as feasible."""
    _check_area(area)
    b2 = beta_lookup(n) ** 2
    h = partition.horizon
    n_max = partition.l_min * h / (b2 * area)
    return DistributionalFeasibility(n <= n_max, n_max, n * b2 * area / h)


def feasible_sampled(counts: Sequence[int], partition: SlotPartition, area: float,
                     n: int | None = None, per_slot_beta: bool = False) -> bool:
    """Every slot must fit ``beta * sqrt(area * n_k)`` into its length.

    By default beta is taken at the instance size ``n``; ``per_slot_beta``
    evaluates it at each slot's own count instead.
    """
    counts = list(counts)
    if len(counts) != partition.m:
        raise ValueError(f"{len(counts)} counts for {partition.m} slots")
    if n is None:
        n = sum(counts) + 1
    beta = beta_lookup(n)
    for c, l in zip(counts, partition.lengths):
        if c == 0:
            continue
        b = beta_lookup(max(c, 2)) if per_slot_beta else beta
        if b * math.sqrt(area * c) > l:
            return False
    return True


@dataclass(frozen=True)
class InducedSlots:
    partition: SlotPartition
    m_star: int
    m1: int
    m2: int
    client_ranges: tuple   # per client: (first, last) 1-based slot index it may use
    covered: tuple         # per slot: True if some client window contains it

    @property
    def kept_lengths(self) -> tuple:
        return tuple(l for l, c in zip(self.partition.lengths, self.covered) if c)


def induced_time_slots(tw: TimeWindowSet, h: float | None = None) -> InducedSlots:
    """Slots obtained by cutting the horizon at every window bound.

    The sorted list holds 0, h and both bounds of each client (2n values for
    n points), giving 2n-1 raw slots; ``m1`` counts zero-length slots
    removed by equal bounds and ``m2`` the slots no client window contains.
    """
    h = tw.horizon if h is None else float(h)
    values = [0.0, h]
    for b, f in tw.windows:
        values += [b, f]
    values.sort()
    partition = validate_partition(values, h)
    m1 = partition.merged
    bounds = partition.bounds
    ranges = []
    covered = [False] * partition.m
    for b, f in tw.windows:
        first = bisect.bisect_left(bounds, b) + 1
        last = bisect.bisect_left(bounds, f)
        ranges.append((first, last))
        for k in range(first, last + 1):
            covered[k - 1] = True
    m2 = covered.count(False)
    raw = len(values) - 1
    return InducedSlots(partition, raw - m1 - m2, m1, m2, tuple(ranges), tuple(covered))


def tsptw_upper_bound(tw: TimeWindowSet, n: int, area: float, h: float | None = None,
                      min_slot_frac: float = 0.0) -> float:
    """Upper-bound estimate of a TSP-TW tour from its induced slots.

    Slots no client can use are dropped; so are slots shorter than
    ``min_slot_frac * h``. ``n`` and ``h`` are not adjusted for the drop.
    """
    if not 0.0 <= min_slot_frac < 1.0:
        raise ValueError("min_slot_frac must lie in [0, 1)")
    _check_area(area)
    induced = induced_time_slots(tw, h)
    h = induced.partition.horizon
    kept = [l for l in induced.kept_lengths if l >= min_slot_frac * h]
    if not kept:
        raise ValueError("every induced slot was dropped")
    s = math.fsum(math.sqrt(l) for l in kept)
    return beta_lookup(n) * math.sqrt(n * area / h) * s
