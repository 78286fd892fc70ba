"""
The genus-2 octagon: hyperbolic Ricci flow to a circle pattern
==============================================================

One vertex, four loop edges and one octagonal face glued as
a b a^-1 b^-1 c d c^-1 d^-1, every weight 3 pi / 4.  The character is
6 pi > 2 pi, so the zero-curvature hyperbolic pattern exists and the flow
dr/dt = -K sinh r finds it from any start.
"""

import math
from pathlib import Path

import circlepattern as cp

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
octagon = cp.load_complex(FIXTURES / "octagon.json")
tri = cp.triangulate(octagon)

for r0 in (0.1, 1.0, 10.0):
    res = cp.run_flow(octagon, cp.FlowConfig("hyperbolic", initial_radii=[r0]))
    print(f"start r={r0:<5} -> {res.status.value} at t={res.time:.3f} "
          f"r={res.final_radii[0]:.10f}  |K|={res.gap_supnorm:.1e}  "
          f"rate {res.rate_estimate.slope:.2f} (R^2 {res.rate_estimate.r_squared:.4f})")

# At the limit all 16 corner angles equal pi/8, so the cone angle is 2 pi and
# Gauss-Bonnet forces the area to be -2 pi chi = 4 pi.
r = res.final_radii
print(f"\ninner angle at the limit: {cp.inner_angle('hyperbolic', r[0], r[0], 3 * math.pi / 4):.12f}"
      f"  (pi/8 = {math.pi / 8:.12f})")
print(f"area: {cp.hyperbolic_area(tri, r):.10f}  (4 pi = {4 * math.pi:.10f})")
