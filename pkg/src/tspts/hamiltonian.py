"""Shortest Hamiltonian paths inside one slot, for every (start, end) pair."""
from __future__ import annotations

import numpy as np
from numba import njit

EXACT_THRESHOLD = 18
# the DP table has 2^s * s doubles; 22 points already take about 740 MB
MAX_EXACT_SIZE = 22


class SlotTooLarge(ValueError):
    pass


@njit(cache=True)
def _held_karp_from(d, start):
    """dp[mask, j]: shortest path from ``start`` through ``mask`` ending at j."""
    s = d.shape[0]
    full = 1 << s
    dp = np.full((full, s), np.inf)
    dp[1 << start, start] = 0.0
    for mask in range(full):
        if not (mask >> start) & 1:
            continue
        for j in range(s):
            cur = dp[mask, j]
            if cur == np.inf:
                continue
            for k in range(s):
                if (mask >> k) & 1:
                    continue
                nxt = mask | (1 << k)
                v = cur + d[j, k]
                if v < dp[nxt, k]:
                    dp[nxt, k] = v
    return dp


@njit(cache=True)
def _all_pairs(d):
    s = d.shape[0]
    out = np.full((s, s), np.inf)
    full = (1 << s) - 1
    for i in range(s):
        dp = _held_karp_from(d, i)
        for j in range(s):
            if j != i:
                out[i, j] = dp[full, j]
    return out


def _as_matrix(dist):
    d = np.ascontiguousarray(dist, dtype=np.float64)
    if d.ndim != 2 or d.shape[0] != d.shape[1]:
        raise ValueError("distance matrix must be square")
    return d


def hamiltonian_all_pairs(dist, exact_threshold: int = EXACT_THRESHOLD,
                          heuristic: bool = False):
    """Matrix H with H[i, j] the shortest path from i to j covering all points.

    ``dist`` is the slot's distance matrix. A single point gives ``[[0]]``;
    otherwise the diagonal is infinite. Slots above ``exact_threshold`` need
    ``heuristic=True`` and then get nearest-neighbor + 2-opt lengths.
    Returns ``(H, exact)``.
    """
    d = _as_matrix(dist)
    s = d.shape[0]
    if s == 0:
        raise ValueError("empty slot")
    if s == 1:
        return np.zeros((1, 1)), True
    if s <= exact_threshold:
        if s > MAX_EXACT_SIZE:
            raise SlotTooLarge(f"slot of {s} points exceeds the hard limit {MAX_EXACT_SIZE} for exact paths")
        return _all_pairs(d), True
    if not heuristic:
        raise SlotTooLarge(f"slot of {s} points exceeds exact threshold {exact_threshold}")
    H = np.full((s, s), np.inf)
    for i in range(s):
        for j in range(i + 1, s):
            H[i, j] = H[j, i] = heuristic_hamiltonian(d, i, j)[0]
    return H, False


def exact_path(dist, start: int, end: int):
    """Shortest path from ``start`` to ``end`` covering every point, with its order."""
    d = _as_matrix(dist)
    s = d.shape[0]
    if s == 1:
        return 0.0, [start]
    dp = _held_karp_from(d, start)
    mask = (1 << s) - 1
    order = [end]
    j = end
    while mask != (1 << start):
        prev_mask = mask ^ (1 << j)
        target = dp[mask, j]
        for k in range(s):
            if (prev_mask >> k) & 1 and dp[prev_mask, k] + d[k, j] == target:
                break
        else:
            raise RuntimeError("path reconstruction failed")
        order.append(k)
        mask, j = prev_mask, k
    order.reverse()
    return float(dp[(1 << s) - 1, end]), order


def path_length(dist, order) -> float:
    d = np.asarray(dist)
    return float(sum(d[a, b] for a, b in zip(order[:-1], order[1:])))


def _two_opt(d, path):
    """Improve a path with fixed endpoints by segment reversals."""
    path = np.array(path)
    s = len(path)
    if s < 4:
        return path
    while True:
        # reversing path[i..j] swaps edges i-1 and j, 1 <= i <= j <= s-2
        edge = d[path[:-1], path[1:]]
        i_idx, j_idx = np.triu_indices(s - 1, k=1)
        e1, e2 = i_idx, j_idx
        delta = (d[path[e1], path[e2]] + d[path[e1 + 1], path[e2 + 1]]
                 - edge[e1] - edge[e2])
        k = int(np.argmin(delta))
        if delta[k] >= -1e-10:
            return path
        i, j = e1[k] + 1, e2[k]
        path[i:j + 1] = path[i:j + 1][::-1]


def heuristic_hamiltonian(dist, start: int, end: int):
    """Nearest-neighbor path from start to end, then 2-opt. Returns (length, order)."""
    d = _as_matrix(dist)
    s = d.shape[0]
    if s == 1:
        return 0.0, [start]
    if start == end:
        raise ValueError("start and end must differ")
    remaining = set(range(s)) - {start, end}
    order = [start]
    cur = start
    while remaining:
        nxt = min(remaining, key=lambda k: (d[cur, k], k))
        order.append(nxt)
        remaining.remove(nxt)
        cur = nxt
    order.append(end)
    order = [int(v) for v in _two_opt(d, order)]
    return path_length(d, order), order
