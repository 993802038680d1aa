"""
Auditing the functional inequalities
====================================

Small versions of the audits: Harnack and Li-Yau constants from the kernel,
and two semigroup inequalities by Monte Carlo.
"""

from threebm.sampler import SimConfig, simulate
from threebm.verify import harnack_fit, li_yau_scan, radial_inequality_gaps, reverse_poincare_gap
from threebm.verify.kernel_audits import default_harnack_pairs

har = harnack_fit([(0.5, 1.0), (1.0, 2.0)], default_harnack_pairs(4, seed=1), restarts=32)
print("Harnack A1, A2:", har.constants["A1"], har.constants["A2"],
      " origin slice A1:", har.diagnostics["origin_slice_A1"])

ly = li_yau_scan((0.5, 1.0), n_points=8)
print("Li-Yau feasible triples:", ly.diagnostics["n_feasible"], " smallest C3:", ly.diagnostics["C3_min_feasible"])

batch = simulate(SimConfig(t=1.0, dt=2e-3, n_paths=50_000, seed=5))
rp = reverse_poincare_gap(t=1.0, batch=batch)
for r in rp.rows:
    print(f"reverse Poincare {r['f']:>10}: gap {r['gap']:+.4f} +- {r['stderr']:.4f}")
rad = radial_inequality_gaps(t=1.0, batch=batch)
print("radial family:", rad.counts())
