"""Edge set ensembles: averaging over every ordering of a fixed set of edges.

The permutation oracle literally visits all n! orderings; the closed forms
need only the sum of squared edgelengths and the failure to close. For the
regular pentagon and an irregular equilateral pentagon, both give 6/25 for
chords spanning two edges.
"""

import numpy as np

from hopfpoly.experiments import builtin_edge_set
from hopfpoly.polystats import (
    EdgeSet,
    schord_formula,
    schord_permutation_oracle,
    sgyradius_formula,
    sgyradius_permutation_oracle,
)

for name in ("pentagon", "irregular5"):
    E = builtin_edge_set(name)
    print(f"{name}: edge directions (deg) {np.round(np.degrees(np.arctan2(E.edges[:, 1], E.edges[:, 0])), 2)}")
    print(f"  2-chord: oracle {schord_permutation_oracle(E, 2):.17f}, formula {schord_formula(E, 5, 2):.17f}, "
          f"6/25 = {6 / 25:.17f}")

rng = np.random.default_rng(1)
E = EdgeSet(rng.normal(size=(6, 3)))
print(f"\nrandom open 6-edge set, failure to close {E.failure_to_close:.3f}")
for k in range(1, 7):
    print(f"  k={k}: oracle {schord_permutation_oracle(E, k):.12f} formula {schord_formula(E, 6, k):.12f}")
print(f"  gyradius: oracle {sgyradius_permutation_oracle(E, False):.12f} "
      f"formula {sgyradius_formula(E, 6, False):.12f}")
