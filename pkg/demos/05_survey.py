"""Survey at level 11: represented classes, the lower bound for nu and the residuals.

Writes survey-N11.csv in the current directory.

Run: python3 demos/05_survey.py
"""

from fractions import Fraction
from pathlib import Path

from quatlat.identities import build_configuration, theorem_reports

cfg = build_configuration(11, 11)
report = theorem_reports(cfg, range(3, 501), kappa=Fraction(1, 2), fundamental_only=True)
Path("survey-N11.csv").write_text(report.csv_text())

print("exact checks failing:", report.failures() or "none")
for line in report.discrepancies():
    print("as stated:", line)

print(f"\n{'d':>4} {'h':>3} {'nu':>3} {'nu_prime':>8} {'bound':>8} {'residual':>10}  (i = j = 1)")
for r in report.rows:
    if r.i == r.j == 1 and r.d % 25 in (3, 4, 7, 8):
        print(f"{r.d:>4} {r.h:>3} {r.nu:>3} {r.nu_prime:>8} {float(r.bound_rhs):>8.3f} {str(r.residual):>10}")

# Proportion of classes represented by I_11 itself, growing with d.
for lo, hi in ((3, 100), (100, 300), (300, 500)):
    rows = [r for r in report.rows if r.i == r.j == 1 and lo <= r.d < hi and r.admissible]
    frac = sum(r.nu_prime for r in rows) / max(1, sum(r.h for r in rows))
    print(f"admissible d in [{lo}, {hi}): share of classes represented by I_11 = {frac:.3f}")
