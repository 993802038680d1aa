"""
Carnot-Caratheodory distance
============================

Distances by shooting normal geodesics, bracketed by explicit bounds.
"""

import math

import numpy as np

from threebm.geodesy import cc_distance, distance_bounds, exp_map

print("d((1,0,0), 0) =", cc_distance([1, 0, 0, 0, 0, 0]).d)
print("d(0, (0,0,1)) =", cc_distance([0, 0, 0, 0, 0, 1]).d, " sqrt(4 pi) =", math.sqrt(4 * math.pi))

for g in ([1.0, 0, 0, 1.0, 0, 0], [1.0, 0, 0, 0, 0, 1.0], [0.3, 0.5, -0.2, 0.4, 0.1, 0.8]):
    r = cc_distance(g)
    b = distance_bounds(g)
    print(f"{g}: {r.lower:.6f} <= d = {r.d:.6f} <= {r.upper:.6f}  ({r.status}, "
          f"lower from {b.lower_source}, upper from {b.upper_source})")

# the winning covector, integrated by RK4, lands on the unit-gauge representative
r = cc_distance([1.0, 0, 0, 1.0, 0, 0])
flow = exp_map(np.array(r.covector))
print("rotation |eta| =", np.linalg.norm(r.covector[3:]), " endpoint", np.round(np.array(flow.endpoint), 10))
