"""The quaternary/ternary identity, term by term.

For every discriminant -d the primitive averages of the rescaled partial duals
of I_ij add up to r(L_i, d) r(L_j, d). For prime N the partial dual at N is
isometric to I_ij only through the level part N_d, so the halved prime-level
form needs N coprime to d.

Run: python3 demos/03_identities.py
"""

from fractions import Fraction

from quatlat import binary as bf
from quatlat.identities import build_configuration, lhs_identity, lhs_prime_level, rhs_identity

cfg = build_configuration(6, 2)
print("N = 6, N1 = 2, i = j = 1")
print(f"{'d':>4} {'N_d':>4} {'lhs':>8} {'rhs':>8}")
for d in range(3, 60):
    if bf.is_discriminant(-d):
        lhs, rhs = lhs_identity(cfg, 1, 1, d), rhs_identity(cfg, 1, 1, d)
        print(f"{d:>4} {bf.Nd(6, d):>4} {str(lhs):>8} {rhs:>8}{'' if lhs == rhs else '  <-- mismatch'}")

cfg = build_configuration(11, 11)
print("\nN = 11, prime-level form with the factor 1/2")
print(f"{'d':>4} {'i':>2} {'j':>2} {'lhs':>8} {'rhs/2':>8}  holds")
for d in (3, 4, 11, 15, 44, 55, 88, 99):
    for i, j in cfg.pairs():
        lhs = lhs_prime_level(cfg, i, j, d)
        half = Fraction(rhs_identity(cfg, i, j, d), 2)
        print(f"{d:>4} {i:>2} {j:>2} {str(lhs):>8} {str(half):>8}  {lhs == half}{'  (11 | d)' if d % 11 == 0 else ''}")
