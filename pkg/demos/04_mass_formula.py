"""Siegel averages, the averaged mass formula and the bound used for nu.

The Siegel average of r(., T) over the quaternary genus does not depend on the
class T of discriminant -d. Weighting each class by 1/eps(T) turns the
quaternary side into the square of the ternary genus average.

Run: python3 demos/04_mass_formula.py
"""

from quatlat import binary as bf
from quatlat.identities import build_configuration, proof_inequality, proposition_by_summation, verify_proposition

for N, N1 in ((2, 2), (11, 11), (15, 5)):
    cfg = build_configuration(N, N1)
    print(f"\nN = {N}, N1 = {N1}")
    print(f"{'d':>4} {'h':>2} {'sum 1/eps':>9} {'r(gen R,T)':>11} {'r(gen L,d)^2':>13} {'h*s0*r':>8} {'weighted':>9} {'summed':>8}")
    for d in range(3, 90):
        if not bf.is_fundamental(d):
            continue
        p = verify_proposition(cfg, d)
        print(f"{d:>4} {p.h:>2} {str(p.unit_weight):>9} {str(p.siegel[0]):>11} {str(p.rhs):>13} "
              f"{str(p.lhs):>8} {str(p.weighted_lhs):>9} {str(proposition_by_summation(cfg, d)):>8}")

cfg = build_configuration(6, 2)
print("\nN = 6: per-lattice bound versus the sum over the partial duals")
for d in (20, 23, 47):
    for rec in proof_inequality(cfg, d)[:2]:
        print(f"  d={d} T={rec.T}: largest single term {rec.largest_term}, sum {rec.rpd}, bound {rec.bound}")
