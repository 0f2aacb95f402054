"""Turn a small time-window instance into slots and bound its tour length."""
from tspts import approx, genbench

TEXT = """CUST NO.  XCOORD.  YCOORD.  DEMAND  READY TIME  DUE DATE  SERVICE TIME
 1   16.0  23.0  0    0.0  200.0  0
 2   22.0   4.0  0   20.0   60.0  0
 3   36.0  12.0  0   40.0   90.0  0
 4   41.0  33.0  0   40.0  120.0  0
 5   12.0  44.0  0  110.0  170.0  0
 6    3.0  30.0  0  150.0  200.0  0
999   0.0   0.0  0    0.0    0.0  0
"""

bench = genbench.parse_tsptw_instance(TEXT, name="toy", side_a=50.0)
ind = approx.induced_time_slots(bench.time_windows)
print("induced bounds:", ind.partition.bounds)
print(f"m* = {ind.m_star}, merged duplicates m1 = {ind.m1}, uncovered slots m2 = {ind.m2}")
n, area = bench.instance.n, bench.instance.area
for frac in (0.0, 0.03, 0.1):
    print(f"upper bound with slots under {frac:.0%} of h dropped: "
          f"{approx.tsptw_upper_bound(bench.time_windows, n, area, min_slot_frac=frac):.1f}")
