"""
Collapse on the tetrahedron
===========================

With all weights pi/3 every vertex has character pi < 2 pi.  No hyperbolic
pattern exists and the flow drives every radius to zero exponentially:
ln tanh(r_max / 2) decreases linearly in time.
"""

from pathlib import Path

import numpy as np

import circlepattern as cp

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
tetra = cp.load_complex(FIXTURES / "tetrahedron.json")

res = cp.run_flow(tetra, cp.FlowConfig("hyperbolic"))
traj = res.trajectory
print(f"status: {res.status.value} at t={res.time:.2f} after {res.steps} steps")

peak = traj.log_radii.max(axis=1)
for t in (0, 2, 4, 8, 12):
    k = np.searchsorted(traj.times, t)
    print(f"  t={traj.times[k]:6.2f}  ln tanh(r_max/2) = {peak[k]:9.3f}   max|K| = {traj.gap_supnorm[k]:.4f}")

rate = res.rate_estimate
print(f"fitted slope {rate.slope:.5f} with R^2 {rate.r_squared:.6f}")
# Near collapse every angle approaches phi/2 = pi/6, so K -> 2 pi - 6 pi/6 = pi
# and the slope of u = ln tanh(r/2) approaches -pi.
print(f"final curvatures: {np.round(res.final_curvature.values, 8)}")
