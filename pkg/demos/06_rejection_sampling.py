"""Quasi-equilateral polygons by rejection.

Keep polygons whose longest edge is below lambda times the mean edge 2/n.
The acceptance rate is compared with the estimate that treats edgelengths
as independent. Even at about one acceptance in a thousand, the second
moment of edgelength stays close to the unconstrained value, far from the
equilateral one.
"""

from hopfpoly import experiments, theory

for space, lam in (("pol3", 4.5), ("pol2", 6.5)):
    r = experiments.reject(space, 2000, lam, count=100, seed=4)
    print(f"{space} lambda {lam}: accepted {r.extra['accepted']}/{r.extra['attempted']} = "
          f"{r.extra['acceptance_ratio']:.4f}, independence estimate {r.extra['acceptance_estimate']:.4f}")

lam = theory.lambda_for_acceptance("pol3", 2000, 1e-3)
r = experiments.reject("pol3", 2000, lam, count=10, seed=5)
print(f"\nlambda {lam:.3f}: acceptance {r.extra['acceptance_ratio']:.2e}")
print(f"  second moment {r.extra['second_moment']:.4e}, unconstrained {r.extra['second_moment_unconstrained']:.4e}, "
      f"equilateral {r.extra['second_moment_equilateral']:.4e}")
