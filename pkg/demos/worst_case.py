"""Worst-case tour lengths when only the demand moments are known."""
import math

from tspts import maxent

a, n, m = 50.0, 101, 8
plain = maxent.wc_mits_length(n, m, a * a)
print(f"no moment information: {plain:.1f}")

# clients concentrated around one corner, with a mild correlation
mom = maxent.SpatialMoments((18.0, 20.0), ((90.0, 25.0), (25.0, 110.0)))
params = maxent.solve_spatial_me(mom, a)
F = maxent.spatial_factor_F(params)
print(f"spatial moments only: F = {F:.2f} (uniform gives {a:.0f}), length {maxent.wc_mits_length(n, m, a * a, mom):.1f}")

for mu_g in (1, m // 2, m):
    print(f"mean slot {mu_g}: f2 = {maxent.f2(mu_g, m):.3f} vs sqrt(m) = {math.sqrt(m):.3f}, "
          f"length {maxent.wc_mits_length(n, m, a * a, mom, mu_g):.1f}")

h = 15 * a * math.sqrt(2)
print("worst-case satisfiable:", maxent.wc_satisfiability(n, m, a * a, h, mom, m // 2))
