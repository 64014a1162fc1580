#!/usr/bin/env python3
"""Blow-up traces: iterated rescaling with frame renormalization.

Zooming u(s^k x)/s^{3k} at a free boundary point and re-finding the best
frame axis at every step produces the decay sequence A_k (weighted tangential
content of grad(Lap u) on B_1 plus tangential W^{2,2} flatness on B_2, over
the D^3 norm).  Exactly one-dimensional inputs sit at the pipeline noise
floor for every k >= 1; a solved near-1D instance decays until the zoom
window out-resolves the source grid, which the per-step floors report.
"""

import csv
from pathlib import Path

import numpy as np

import biharmlab as bl
from biharmlab import freeboundary as fb
from biharmlab.experiments import perturbed_profile
from biharmlab.solver import problem_from_oracle, solve

OUT = Path(__file__).parent / "output"
OUT.mkdir(exist_ok=True)


def show(name, trace):
    print(f"\n{name}: s={trace.s}, lambda={trace.lambda_weight}")
    print("  k:      " + "  ".join(f"{k:>9d}" for k in range(len(trace.values))))
    print("  A_k:    " + "  ".join(f"{v:9.2e}" for v in trace.values))
    print("  floor:  " + "  ".join(f"{v:9.2e}" for v in trace.floors))
    print(f"  at_floor={trace.at_floor}  beta_hat={trace.beta_hat}  eta_limit={trace.eta_limit}")


show("axis-aligned half-space cubic (exactly 1D, exactly zero trace)",
     fb.blowup_sequence(bl.halfspace_cubic((0.0, 1.0)), s=0.4, K=4))

theta = np.deg2rad(25.0)
show("rotated half-space cubic, started in the unrotated frame",
     fb.blowup_sequence(bl.halfspace_cubic((0.0, 1.0)).rotated(theta), s=0.4, K=4))
print("  (A_0 and A_1 carry the frame mismatch; one renormalization kills it)")

oracle = bl.one_dim_solution(-6.0)
show("1D solution embedded in 2D at its contact point",
     fb.blowup_sequence(lambda x, y: oracle.value(oracle.gamma + y), s=0.4, K=4))

print("\nsolving a near-1D perturbed instance (seeded trigonometric boundary graph) ...")
profile = perturbed_profile(seed=7, amplitude=0.02, half_width=2.25)
grid = bl.square(2.25, 257)
u, report = solve(problem_from_oracle(grid, profile))
boundary = fb.extract_free_boundary(u)
x0 = boundary.points[int(np.argmin(np.linalg.norm(boundary.points, axis=1)))]
trace = fb.blowup_sequence(u, 0.4, 4, x0=x0)
show(f"solved perturbed instance, blow-up at {np.round(x0, 4)}", trace)
print("  decay is monotone within the floor; deep steps out-resolve the "
      "source grid and the floor says so")

with open(OUT / "blowup_trace.csv", "w", newline="") as fh:
    w = csv.writer(fh)
    w.writerow(["k", "A", "floor", "eta_x", "eta_y"])
    for k in range(len(trace.values)):
        w.writerow([k, trace.values[k], trace.floors[k], *trace.directions[k]])
print(f"\ntrace written to {OUT / 'blowup_trace.csv'}")
