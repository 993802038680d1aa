"""
The heat kernel by quadrature
=============================

p_t at the identity, the two moment constants, and the kernel along a few
rays. The scaling law is checked against a second quadrature route that
keeps t inside the integrand.
"""

import math

import numpy as np

from threebm.algebra import dilate_array
from threebm.kernel import constants_W, heat_residual_batch, p_t, p_t_batch, p_t_direct_batch, peak

print("p_1(0) =", p_t(1.0, np.zeros(6)), " closed form", peak(1.0))
W1, W2 = constants_W()
print(f"W1 = {W1:.6f} (8 pi^5 = {8 * math.pi ** 5:.6f})")
print(f"W2 = {W2:.6f} (64 pi^5 = {64 * math.pi ** 5:.6f})")

# horizontal decay is Gaussian, vertical decay only exponential
s = np.linspace(0, 4, 9)
horizontal = np.zeros((len(s), 6))
horizontal[:, 0] = s
vertical = np.zeros((len(s), 6))
vertical[:, 5] = s
for label, pts in (("x1 axis", horizontal), ("y3 axis", vertical)):
    print(label, np.round(p_t_batch(1.0, pts) / peak(1.0), 6))

# heat equation residual and the scaling law at a few points
rng = np.random.default_rng(0)
g = rng.normal(size=(4, 6)) * 0.7
print("heat residual:", heat_residual_batch(1.0, g))
for lam in (0.5, 2.0):
    lhs = p_t_direct_batch(lam * lam, dilate_array(lam, g))
    print(f"lambda {lam}: max rel scaling error", np.max(np.abs(lhs / (lam ** -9 * p_t_batch(1.0, g)) - 1)))
