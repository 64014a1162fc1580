#!/usr/bin/env python3
"""Flatness norms, the normalized frame, and class membership.

A field is "almost one dimensional" when its tangential gradient is small in
W^{2,2}(B_2).  The best frame axis minimizes the tangential content of
grad(Lap u) over B_1; that sphere minimization reduces exactly to the top
eigenvector of the 2x2 Gram matrix of the components, which we cross-check
against a brute-force sweep of 3600 angles.  Membership in the flatness
class combines four checks: flatness below epsilon, positivity set NTA,
vanishing below height -t, and the D^3 bound kappa.
"""

import numpy as np

import biharmlab as bl
from biharmlab.freeboundary import (
    class_membership,
    direction_sweep,
    flatness,
    normalize,
    normalized_direction,
)

grid = bl.square(1.3, 257)
grid_wide = bl.square(2.3, 161)

print("rotated half-space profiles (1/6)((eta . x)_+)^3:")
print(f"{'theta':>6} {'flatness in e2 frame':>21} {'recovered angle':>16} {'sweep gap':>10}")
for deg in (0.0, 5.0, 10.0, 30.0, 45.0):
    theta = np.deg2rad(deg)
    hc = bl.halfspace_cubic((0.0, 1.0)).rotated(theta)
    f = bl.sample(hc, grid)
    wide = bl.sample(hc, grid_wide)
    eps_hat = flatness(wide, (0.0, 1.0), bl.ball(2.0))
    res = normalized_direction(f)
    ang = np.degrees(np.arctan2(-res.eta[0], res.eta[1]))
    _, obj_sweep, _ = direction_sweep(f, 3600)
    print(f"{deg:6.1f} {eps_hat:21.6f} {ang:16.4f} {abs(res.objective - obj_sweep):10.2e}")

print("\nflatness grows linearly with the tilt; the eigenvector frame recovers")
print("the tilt to a fraction of the sweep resolution (0.05 degrees)")

print("\nnormalization: scale so ||D^3 u||_{L2(B1)} = sqrt(|B1|/2)")
f = bl.sample(bl.halfspace_cubic((0.0, 1.0)), grid_wide)
scaled, info = normalize(f * 3.7)
print(f"  input scaled by 3.7 -> factor {info.factor:.6f} (1/3.7 = {1/3.7:.6f} up to quadrature)")
print(f"  post-scaling D^3 norm on B_2: {info.kappa_check:.4f} "
      f"(canonical value 2 omega_2 = {2*bl.omega_norm(2):.4f})")

print("\nclass membership at the origin (kappa=3, rho=1/2, t=1):")
for deg, eps in ((0.0, 0.05), (10.0, 0.05), (10.0, 0.5)):
    hc = bl.halfspace_cubic((0.0, 1.0)).rotated(np.deg2rad(deg))
    rep = class_membership(bl.sample(hc, grid_wide), kappa=3.0, rho=0.5, epsilon=eps, t=1.0)
    print(f"  theta={deg:4.1f} eps={eps:4.2f}: member={rep.member} "
          f"(flatness {rep.epsilon_hat:.4f}, nta {rep.nta_ok}, vanish {rep.vanish_ok})")

print("\nthe slit solution fails the NTA requirement at its interior endpoint:")
slit_field = bl.sample(bl.slit_example(), bl.disk_in_rectangle((0.0, 0.0), 1.0, 201))
rep = class_membership(slit_field, kappa=30.0, rho=0.25, epsilon=10.0, t=1.9)
print(f"  member={rep.member}, nta_ok={rep.nta_ok} "
      f"(the complement of the positivity set is a one-cell line)")
