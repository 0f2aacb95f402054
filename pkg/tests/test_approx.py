import math

import pytest
from hypothesis import assume, given, strategies as st

from tspts.approx import (BETA_BOUNDS, BETA_TABLE, beta_lookup, bhh_length, feasible_distributional,
                          feasible_sampled, induced_time_slots, mits_length, mts_bounds, mts_length,
                          sampling_length, tsptw_upper_bound)
from tspts.model import TimeWindowSet, identical_partition, validate_partition

TABLE_ONE = [(20, 0.8584265), (30, 0.8269698), (40, 0.8129900), (50, 0.7994125), (60, 0.7908632),
             (70, 0.7817751), (80, 0.7775367), (90, 0.7773827), (100, 0.7764689), (200, 0.7563542),
             (300, 0.7477629), (400, 0.7428444), (500, 0.7394544), (600, 0.7369409),
             (700, 0.7349902), (800, 0.7335751), (900, 0.7321114), (1000, 0.7312235),
             (2000, 0.7256264)]


@st.composite
def partitions(draw, max_m=10):
    h = draw(st.floats(1.0, 1e4))
    m = draw(st.integers(1, max_m))
    inner = draw(st.lists(st.floats(0.001, 0.999), min_size=m - 1, max_size=m - 1, unique=True))
    return validate_partition([0.0] + sorted(x * h for x in inner) + [h], h)


def test_beta_table_entries():
    assert sorted(BETA_TABLE.items()) == TABLE_ONE
    for n, b in TABLE_ONE:
        assert beta_lookup(n) == b
        assert BETA_BOUNDS[0] <= b <= BETA_BOUNDS[1]


def test_beta_interpolation_frozen():
    # linear in 1/sqrt(n) between anchors, worked by hand
    assert beta_lookup(101) == pytest.approx(0.7761281, abs=1e-7)
    assert beta_lookup(21) == pytest.approx(0.8542950, abs=1e-6)
    assert beta_lookup(7) == BETA_TABLE[20]
    assert beta_lookup(5000) == BETA_TABLE[2000]
    with pytest.raises(ValueError):
        beta_lookup(1)


@given(st.integers(20, 1999))
def test_beta_between_neighbours(n):
    lo = max(k for k in BETA_TABLE if k <= n)
    hi = min(k for k in BETA_TABLE if k > n)
    b = beta_lookup(n)
    assert min(BETA_TABLE[lo], BETA_TABLE[hi]) <= b <= max(BETA_TABLE[lo], BETA_TABLE[hi])


def test_bhh_and_mits_examples():
    assert bhh_length(100, 1e6) == pytest.approx(7764.689, abs=1e-9)
    assert bhh_length(20, 1) == pytest.approx(0.8584265 * math.sqrt(20))
    assert mits_length(100, 4, 1e6) == pytest.approx(15529.378, abs=1e-9)
    assert mits_length(100, 9, 1e6) == pytest.approx(3 * 7764.689, abs=1e-9)
    assert mits_length(57, 1, 3.0) == bhh_length(57, 3.0)
    with pytest.raises(ValueError):
        bhh_length(100, 0)
    with pytest.raises(ValueError):
        mits_length(100, 0, 1.0)


def test_mts_examples():
    # 0.7764689 * sqrt(100*2500/12) * (sqrt(4) + sqrt(8))
    assert mts_length(100, validate_partition([0, 4, 12], 12), 2500) == pytest.approx(541.1392, abs=1e-3)
    assert mts_length(40, validate_partition([0, 7], 7), 9) == pytest.approx(bhh_length(40, 9), rel=1e-12)
    assert mts_length(40, identical_partition(6, 7), 9) == pytest.approx(mits_length(40, 6, 9), rel=1e-12)
    assert mts_bounds(100, 4, 1e6) == pytest.approx((7764.689, 15529.378))
    lo, hi = mts_bounds(33, 1, 5.0)
    assert lo == hi


@given(st.integers(2, 3000), partitions(), st.floats(1e-3, 1e7))
def test_bound_chain(n, part, area):
    lo, hi = mts_bounds(n, part.m, area)
    v = mts_length(n, part, area)
    assert lo <= v <= hi


def test_sampling_examples():
    assert sampling_length([9], 4.0) == pytest.approx(bhh_length(10, 4.0))
    assert sampling_length([3, 0, 3], 1.0, n=7) == pytest.approx(BETA_TABLE[20] * (2 + math.sqrt(3)))
    # counts matching the expectation n * l_k / h, depot in slot 1
    assert sampling_length([24, 25, 25, 25], 2500.0) == pytest.approx(
        mts_length(100, identical_partition(4, 10.0), 2500.0), rel=1e-12)
    with pytest.raises(ValueError):
        sampling_length([3, 3], 1.0, n=10)
    with pytest.raises(ValueError):
        sampling_length([-1, 3], 1.0)


def test_feasible_distributional_examples():
    r = feasible_distributional(100, validate_partition([0, 530.33, 1060.66], 1060.66), 2500)
    assert r.feasible
    assert r.n_max == pytest.approx(530.33 * 1060.66 / (0.7764689 ** 2 * 2500), rel=1e-12)
    assert r.n_max == pytest.approx(373.2, abs=0.05)
    tiny = feasible_distributional(2, validate_partition([0, 1e-9, 10], 10), 2500)
    assert not tiny.feasible and tiny.n_max < 1e-6


def test_feasible_distributional_boundary_inclusive():
    b2 = 0.7764689 ** 2
    h, area, n = 100.0, 4.0, 100
    l_min = n * b2 * area / h
    part = validate_partition([0, l_min, h], h)
    r = feasible_distributional(n, part, area)
    assert r.l_min_required == pytest.approx(l_min, rel=1e-12)
    # the stored bound may round either way; inclusive means equality passes
    assert r.feasible == (n <= r.n_max)


@given(st.integers(2, 500), st.integers(2, 500), partitions(), st.floats(0.1, 1e4))
def test_feasible_distributional_monotone_in_n(n1, n2, part, area):
    lo, hi = sorted((n1, n2))
    if feasible_distributional(hi, part, area).feasible:
        assert feasible_distributional(lo, part, area).feasible or beta_lookup(lo) > beta_lookup(hi)


def test_feasible_sampled_examples():
    h = 1060.66
    part = validate_partition([0, h / 2, h], h)
    assert feasible_sampled([50, 50], part, 2500)
    assert feasible_sampled([0, 5], part, 2500)
    assert not feasible_sampled([1, 10_000], part, 2500)
    with pytest.raises(ValueError):
        feasible_sampled([1, 2, 3], part, 2500)


def test_induced_slots_examples():
    tw = TimeWindowSet([(2, 5), (5, 8), (0, 10)], 10)
    r = induced_time_slots(tw)
    assert r.partition.bounds == (0, 2, 5, 8, 10)
    assert (r.m1, r.m2, r.m_star) == (3, 0, 4)

    tw = TimeWindowSet([(1, 2), (4, 5)], 6)
    r = induced_time_slots(tw)
    assert r.partition.bounds == (0, 1, 2, 4, 5, 6)
    assert r.covered == (False, True, False, True, False)
    assert (r.m1, r.m2, r.m_star) == (0, 3, 2)
    assert r.client_ranges == ((2, 2), (4, 4))


@pytest.mark.parametrize("clients", [1, 2, 5])
def test_induced_full_windows(clients):
    tw = TimeWindowSet([(0, 9)] * clients, 9)
    n = clients + 1
    r = induced_time_slots(tw)
    assert r.partition.m == 1 and r.m_star == 1
    assert r.m1 == 2 * n - 2
    assert tsptw_upper_bound(tw, n, 16.0) == pytest.approx(bhh_length(n, 16.0), rel=1e-12)


@st.composite
def window_sets(draw):
    h = draw(st.floats(1.0, 1000.0))
    k = draw(st.integers(1, 12))
    ws = []
    for _ in range(k):
        a, b = sorted(draw(st.lists(st.integers(0, 20), min_size=2, max_size=2, unique=True)))
        ws.append((a * h / 20, h if b == 20 else b * h / 20))
    return TimeWindowSet(ws, h)


@given(window_sets(), st.floats(0.1, 1e4))
def test_induced_invariants(tw, area):
    r = induced_time_slots(tw)
    n = len(tw) + 1
    assert r.m_star == 2 * n - 1 - r.m1 - r.m2
    assert r.m_star == sum(r.covered) >= 1
    for (b, f), (first, last) in zip(tw.windows, r.client_ranges):
        assert first <= last
        assert r.partition.bounds[first - 1] == b and r.partition.bounds[last] == f
    assert tsptw_upper_bound(tw, n, area) <= mits_length(n, 2 * n - 1, area) * (1 + 1e-12)


def test_upper_bound_slot_filter():
    tw = TimeWindowSet([(0, 1), (0, 10), (1, 10)], 10)
    full = tsptw_upper_bound(tw, 4, 1.0)
    filtered = tsptw_upper_bound(tw, 4, 1.0, min_slot_frac=0.2)
    assert filtered < full
    assert filtered == pytest.approx(beta_lookup(4) * math.sqrt(4 / 10) * 3.0)
    with pytest.raises(ValueError):
        tsptw_upper_bound(tw, 4, 1.0, min_slot_frac=1.0)
    with pytest.raises(ValueError):
        tsptw_upper_bound(TimeWindowSet([(0, 1)], 10), 2, 1.0, min_slot_frac=0.5)
