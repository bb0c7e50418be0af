"""The Hopf map turns quaternions into edge vectors.

A quaternion q of squared norm r becomes a vector of length r, and
right-multiplying q by a unit quaternion rotates that vector by the frame
frame_hopf(p). These two facts are what make the samplers work: a point on a
sphere of radius sqrt(2) in 4n real dimensions becomes n edges of total
length 2, and rotating the point rotates the whole polygon.
"""

import numpy as np

from hopfpoly.quat_geom import frame_hopf, hopf, hopf_complex, hopf_planar, norm_sq, quat_mul

rng = np.random.default_rng(0)

q = np.array([1.0, 0.0, 1.0, 0.0])
print("hopf(1 + j) =", hopf(q), " |.| =", np.linalg.norm(hopf(q)), " norm_sq =", norm_sq(q))

# Norms are squared.
qs = rng.normal(size=(5, 4))
print("\n|hopf(q)| / norm_sq(q) over five random q:", np.linalg.norm(hopf(qs), axis=1) / norm_sq(qs))

# Right multiplication by a unit quaternion acts as a rotation.
p = rng.normal(size=4)
p /= np.linalg.norm(p)
R = frame_hopf(p)
print("\nframe_hopf(p) is a rotation: R^T R =\n", np.round(R.T @ R, 12), "\n det =", np.linalg.det(R))
print("hopf(q p) - R hopf(q):", hopf(quat_mul(qs[0], p)) - R @ hopf(qs[0]))

# Complex and planar coordinates.
a, b = 1 / np.sqrt(2), 1 / np.sqrt(2)
print("\nhopf_complex(1/sqrt2, 1/sqrt2) =", hopf_complex(a, b))
print("hopf_planar(1/sqrt2, 1/sqrt2)  =", hopf_planar(a, b), "(i and k coordinates)")
