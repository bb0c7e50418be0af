"""Edgelength histogram against the closed-form Beta density.

Bins are equiprobable under the predicted law, so every cell expects the same
count and the chi-square test is well conditioned.
"""

from hopfpoly import experiments

report = experiments.verify_pdf("arm3", 64, 50_000, bins=20, seed=3)
print(f"chi-square {report.extra['chi2']:.2f} on {report.extra['dof']} dof, p = {report.extra['p_value']:.3f}")
print(f"{'center':>10} {'empirical':>12} {'theory':>12}")
for left, right, center, emp, th in report.extra["histogram"]:
    print(f"{center:10.5f} {emp:12.4f} {th:12.4f}")
print()
print("\n".join(report.summary_lines()))
