"""
Deciding existence from the vertex characters
=============================================

The character of a vertex is the sum of the weights on its incident
half-edges.  Comparing it with 2 pi (hyperbolic) or with the mean character
(Euclidean) decides whether an ideal circle pattern exists, without
solving anything.
"""

from pathlib import Path

import numpy as np

import circlepattern as cp
from circlepattern.criteria import incident_weight_sums

FIXTURES = Path(__file__).resolve().parent.parent / "fixtures"

for name in ("tetrahedron", "torus3x3", "octagon"):
    c = cp.load_complex(FIXTURES / f"{name}.json")
    s = c.summary()
    ch = cp.character(c)
    print(f"\n{name}: N={s['vertices']} E={s['edges']} F={s['faces']} chi={s['euler_characteristic']}")
    print("  characters / pi:", np.round(ch.values / np.pi, 6))
    print(f"  mean / pi = {ch.average / np.pi:.6f}, 2(1 - chi/N) = {2 * (1 - s['euler_characteristic'] / s['vertices']):.6f}")
    for g in ("hyperbolic", "euclidean"):
        rep = cp.classify_character(c, g)
        extra = " (flow should collapse)" if rep.predicts_collapse else ""
        print(f"  {g:<10} -> {rep.verdict.value}{extra}: {rep.tag}")

# Subset condition H3 asks for sum of weights on edges meeting A > pi |A|.
# On the tetrahedron a single vertex sees three edges of weight pi/3, exactly
# pi, so it already fails with zero slack; larger subsets fail by more.
tetra = cp.load_complex(FIXTURES / "tetrahedron.json")
h3 = cp.check_subset_inequalities(tetra, "ghz-h3")
single = incident_weight_sums(tetra, np.array([1], dtype=np.int64))[0] - np.pi
print(f"\ntetrahedron, subset condition H3: passed={h3.passed}")
print(f"  slack at A={{0}}: {single:.2e}; worst subset {h3.worst_subset} with slack {h3.worst_slack:.4f}")
