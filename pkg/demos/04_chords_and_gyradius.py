"""Mean squared chords and gyradius against their closed forms.

A scaled-down version of the large chord and gyradius experiments; the
acceptance suite runs the full-size ones.
"""

from hopfpoly import experiments

report = experiments.verify_chords("pol3", 500, 5_000, seed=1, ks=[1, 50, 250, 500])
print("\n".join(report.summary_lines()))

report = experiments.verify_gyradius(["pol3", "pol2", "arm3", "arm2"], [100], 5_000, seed=2)
print()
print("\n".join(report.summary_lines()))
print("\nreport JSON excerpt:")
print(report.to_json()[:400], "...")
