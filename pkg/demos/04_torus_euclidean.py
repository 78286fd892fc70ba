"""
Euclidean flow on the 3x3 torus
===============================

Every vertex has character 2 pi, equal to the threshold 2 pi (1 - chi/N)
with chi = 0: the boundary case of the Euclidean criterion.  The flat
pattern exists, is unique up to scaling and is reached from any start; the
product of the radii is conserved along the way.
"""

from pathlib import Path

import numpy as np

import circlepattern as cp

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
torus = cp.load_complex(FIXTURES / "torus3x3.json")

rng = np.random.default_rng(0)
for run in range(3):
    r0 = rng.uniform(0.2, 5.0, 9)
    res = cp.run_flow(torus, cp.FlowConfig("euclidean", initial_radii=r0))
    gm0 = np.exp(np.mean(np.log(r0)))
    print(f"run {run}: {res.status.value} at t={res.time:.2f}; "
          f"geometric mean {gm0:.6f} -> {np.exp(np.mean(np.log(res.final_radii))):.6f}; "
          f"spread of final radii {np.ptp(res.final_radii):.1e}; "
          f"drift of sum ln r {res.conservation.max_drift:.1e}")

# A constant start is already flat: nothing to integrate.
res = cp.run_flow(torus, cp.FlowConfig("euclidean", initial_radii=np.full(9, 2.0)))
print(f"constant start: {res.status.value}, steps={res.steps}")

# The same weights in hyperbolic geometry sit exactly on the threshold 2 pi.
# Neither convergence nor collapse is guaranteed and the flow stalls.
res = cp.run_flow(torus, cp.FlowConfig("hyperbolic", max_time=50))
print(f"hyperbolic: {res.status.value} ({res.message}); max|K| = {res.gap_supnorm:.2e}")
