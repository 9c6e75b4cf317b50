"""Ideal classes of Eichler orders, certified by the mass formula.

Run: python3 demos/02_class_sets.py
"""

from quatlat.identities import build_configuration, decompositions, genus_mass, genus_omax
from quatlat.orders import eichler_mass

print(f"{'N':>3} {'N1':>3} {'N2':>3} {'h':>3}  {'units':<10} {'mass':>6}  {'genus |O(L)|':<16} ternary |O(L)|")
for N in (2, 3, 5, 7, 11, 13, 6, 10, 15):
    for N1 in decompositions(N):
        cfg = build_configuration(N, N1)
        cs = cfg.classes
        assert cs.mass == eichler_mass(cfg.N1, cfg.N2)
        print(f"{N:>3} {N1:>3} {cfg.N2:>3} {cs.h:>3}  {str(list(cs.unit_counts)):<10} {str(cs.mass):>6}  "
              f"{str([g.automorphisms for g in cfg.genus]):<16} {[g.automorphisms for g in cfg.ternary_genus]}")

# The quaternary genus can have more classes than h: the h x h matrix of I_ij
# covers it with repetitions.
cfg = build_configuration(11, 11)
print("\nN = 11: mu(R) =", genus_mass(cfg.genus), " o_max =", genus_omax(cfg.genus))
for (i, j), k in sorted((key[:2], v) for key, v in cfg.genus_index.items() if key[2] == 1):
    print(f"  I_{i}{j} lies in genus class {k}")
