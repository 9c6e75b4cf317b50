"""The Hurwitz order and its norm lattice.

Run: python3 demos/01_hurwitz_order.py
"""

from quatlat.lattice import automorphism_count, theta_prefix
from quatlat.orders import as_ideal, ideal_to_lattice, maximal_order, ternary_lattice, unit_count
from quatlat.quaternion import find_algebra, hilbert_symbol

# The smallest definite algebra ramified only at 2 is the Hamilton quaternions.
A = find_algebra(2)
print(f"algebra (a, b) = ({A.a}, {A.b})")
for p in (2, 3, 5, "infinity"):
    print(f"  Hilbert symbol at {p}: {hilbert_symbol(A.a, A.b, p)}")

# Saturating Z<1, i, j, k> at 2 adds (1 + i + j + k)/2.
O = maximal_order(A)
print("maximal order basis (rows / den):", O.basis, "/", O.den)
print("Gram determinant:", O.gram_det(), "  units:", unit_count(O))

# As a quadratic lattice with the reduced norm it is D4.
L = ideal_to_lattice(as_ideal(O))
print("norm lattice Gram:", L.bgram)
print("theta series r(L, n), n = 1..8:", theta_prefix(L, 8))
print("|O(L)| =", automorphism_count(L))

# The ternary lattice: trace-zero part of Z + 2O.
T = ternary_lattice(O)
print("ternary Gram:", T.bgram, " discriminant", T.discriminant(), " level", T.level())
print("r(L_1, n), n = 1..12:", theta_prefix(T, 12))
