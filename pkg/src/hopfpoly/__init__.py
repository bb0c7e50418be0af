"""Random polygons through the quaternionic Hopf map.

Arms and closed polygons of total length 2, in the plane or in space, are
sampled by pushing uniform points of spheres and Stiefel manifolds forward
edge by edge. ``theory`` holds the matching closed-form expectations and
densities, ``polystats`` the estimators, and ``experiments`` ties them into
seeded Monte Carlo checks that the ``hopfpoly`` command runs.
"""

__version__ = "0.1.0"

from .polystats import EdgeSet, MomentAccumulator  # noqa: E402
from .quat_geom import Quaternion, frame_hopf, hopf, hopf_complex, hopf_planar  # noqa: E402
from .sampler import (  # noqa: E402
    Polygon,
    RejectionStats,
    RngStream,
    rejection_sample,
    sample_arm2,
    sample_arm3,
    sample_edges,
    sample_equilateral_arm,
    sample_pol2,
    sample_pol3,
)
from .theory import SpaceKind, TheoryValue, UnsupportedSpace  # noqa: E402

__all__ = [
    "EdgeSet",
    "MomentAccumulator",
    "Polygon",
    "Quaternion",
    "RejectionStats",
    "RngStream",
    "SpaceKind",
    "TheoryValue",
    "UnsupportedSpace",
    "frame_hopf",
    "hopf",
    "hopf_complex",
    "hopf_planar",
    "rejection_sample",
    "sample_arm2",
    "sample_arm3",
    "sample_edges",
    "sample_equilateral_arm",
    "sample_pol2",
    "sample_pol3",
]
