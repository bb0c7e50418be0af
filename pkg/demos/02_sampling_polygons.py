"""Sampling arms and closed polygons.

Arms come from uniform points on a sphere; closed polygons come from
orthonormal 2-frames, which is why they close exactly. Every sample has
total length 2.
"""

import numpy as np

from hopfpoly import RngStream, sample_edges
from hopfpoly.polystats import closure_defect
from hopfpoly import theory

rng = RngStream(seed=2024)
n, count = 12, 50_000

for space in ("arm2", "arm3", "pol2", "pol3"):
    e = sample_edges(rng, space, n, count)
    lengths = np.linalg.norm(e, axis=2)
    ell = closure_defect(e)
    print(f"{space}: total length {lengths.sum(axis=1).min():.15f}..{lengths.sum(axis=1).max():.15f}, "
          f"max failure to close {ell.max():.2e}")
    print(f"      mean |e|^2 = {np.mean(lengths ** 2):.6f}  (closed form {theory.edge_moment(space, n, 2):.6f})")
    if space.startswith("arm"):
        print(f"      mean ell^2 = {np.mean(ell ** 2):.6f}  (closed form {theory.expected_ftc_sq(space, n):.6f})")

# Same seed and stream id, same polygons.
a = sample_edges(RngStream(7, 3), "pol3", 5, 2)
b = sample_edges(RngStream(7, 3), "pol3", 5, 2)
print("\nreproducible:", a.tobytes() == b.tobytes())
