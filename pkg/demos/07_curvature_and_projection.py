"""Total curvature and projections of closed space polygons.

Mean total curvature sits a little above n pi/2; the surplus looks like
pi/4, which is a conjecture rather than a theorem. Projecting to a random
plane gives mean length pi/2, but rescaled projections do not reproduce the
planar gyradius.
"""

import math

from hopfpoly import experiments

r = experiments.curvature(1000, 10_000, seed=6)
s = r.estimates[0]
print(f"n=1000: surplus {s.estimate:.3f} +/- {s.stderr:.3f} (pi/4 = {math.pi / 4:.3f}); "
      f"plain estimator s.e. {r.extra['plain_stderr']:.3f}, "
      f"control variate correlation {r.extra['control_variate_correlation']:.2f}")

r = experiments.project(1024, 5_000, seed=7)
print(f"projected length {r.find('projected_length').estimate:.5f} (pi/2 = {math.pi / 2:.5f})")
print(f"rescaled gyradius {r.extra['rescaled_gyradius']:.4e} vs planar prediction "
      f"{r.extra['planar_prediction']:.4e} (gap {100 * r.extra['relative_gap_to_planar']:.1f}%)")
