"""
Prescribed curvature: recovering radii from their curvatures
============================================================

Pick radii, compute their curvatures, forget the radii and run the
prescribed-curvature flow from somewhere else.  Hyperbolic radii come back
exactly; Euclidean radii come back up to a common scale.
"""

from pathlib import Path

import numpy as np

import circlepattern as cp

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"
rng = np.random.default_rng(1)

# The box test is only sufficient: curvatures of actual radii often fall
# outside (2 pi - L_i, 2 pi) and the verdict is then indeterminate, yet the
# flow still finds them.
for name in ("tetrahedron", "torus3x3"):
    c = cp.load_complex(FIXTURES / f"{name}.json")
    tri = cp.triangulate(c)
    for g in ("hyperbolic", "euclidean"):
        rbar = rng.uniform(0.5, 2.0, c.vertex_count)
        kbar = cp.curvature_vector(tri, g, rbar).values
        box = cp.check_prescribed(c, g, kbar)
        res = cp.run_flow(c, cp.FlowConfig(g, target=kbar, initial_radii=np.ones(c.vertex_count)))
        r = res.final_radii
        if g == "euclidean":
            r = r / np.exp(np.mean(np.log(r))) * np.exp(np.mean(np.log(rbar)))
        print(f"{name:<12} {g:<10} box verdict {box.verdict.value:<13} flow {res.status.value}, "
              f"max |r - rbar| = {np.max(np.abs(r - rbar)):.1e}")

# A target inside the box (2 pi - L_i, 2 pi) is always reachable: on the
# octagon L = 6 pi, so K = -pi is fine.
octagon = cp.load_complex(FIXTURES / "octagon.json")
res = cp.run_flow(octagon, cp.FlowConfig("hyperbolic", target=[-np.pi]))
print(f"octagon with K = -pi: {res.status.value}, r = {res.final_radii[0]:.8f}")

# Euclidean targets must add up to 2 pi chi.
try:
    cp.run_flow(cp.load_complex(FIXTURES / "torus3x3.json"),
                cp.FlowConfig("euclidean", target=np.full(9, 0.1)))
except cp.FlowError as exc:
    print(f"rejected: {exc}")
