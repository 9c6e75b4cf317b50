"""Orders, Eichler orders and left ideal classes in a definite quaternion algebra.

Lattices in the algebra are stored as a row-HNF integer basis over a common
denominator, in coordinates w.r.t. 1, i, j, k. The HNF makes equality a tuple
comparison.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from fractions import Fraction
from functools import cached_property
from math import gcd
from typing import Iterable, Sequence

import numpy as np
from sympy import primerange

from . import _linalg as la
from .lattice import GramLattice, count_unary, lll_gram
from .quaternion import (
    AlgebraParams,
    RationalQuaternion,
    bilinear_coords,
    gcd_fractions,
    mul_coords,
    norm_coords,
    primes_of,
)

__all__ = [
    "QuaternionLattice",
    "OrderLattice",
    "LeftIdeal",
    "ClassSet",
    "ConstructionError",
    "maximal_order",
    "eichler_order",
    "ideal_classes",
    "ideal_inverse",
    "ideal_product",
    "make_Iij",
    "unit_count",
    "ternary_lattice",
    "ideal_to_lattice",
    "eichler_mass",
    "norm_p_left_ideals",
    "equivalent",
]


class ConstructionError(RuntimeError):
    """A construction certificate (determinant, mass, closure) failed."""


@dataclass(frozen=True)
class QuaternionLattice:
    algebra: AlgebraParams
    basis: tuple[tuple[int, int, int, int], ...]
    den: int = 1

    @classmethod
    def from_generators(cls, algebra: AlgebraParams, gens: Iterable[Sequence]) -> "QuaternionLattice":
        rows, den = la.rational_hnf(list(gens))
        if len(rows) != 4:
            raise ValueError("generators do not span a full lattice")
        return cls(algebra, tuple(tuple(r) for r in rows), den)

    @property
    def a(self) -> int:
        return self.algebra.a

    @property
    def b(self) -> int:
        return self.algebra.b

    def rational_basis(self) -> list[list[Fraction]]:
        return [[Fraction(x, self.den) for x in row] for row in self.basis]

    def elements(self) -> list[RationalQuaternion]:
        return [RationalQuaternion(self.algebra, tuple(row)) for row in self.rational_basis()]

    @cached_property
    def bgram(self) -> list[list[Fraction]]:
        d2 = self.den * self.den
        return [[Fraction(bilinear_coords(self.a, self.b, x, y), d2) for y in self.basis] for x in self.basis]

    def gram_det(self) -> Fraction:
        return la.det(self.bgram)

    def reduced_norm(self) -> Fraction:
        """Positive generator of the Z-module spanned by n(x), x in the lattice."""
        g = self.bgram
        vals = [g[i][i] / 2 for i in range(4)] + [g[i][j] for i in range(4) for j in range(i + 1, 4)]
        return gcd_fractions(vals)

    def contains(self, v: Sequence) -> bool:
        coeffs = la.matmul([list(map(Fraction, v))], la.inverse(self.rational_basis()))[0]
        return all(c.denominator == 1 for c in coeffs)

    def contains_lattice(self, other: "QuaternionLattice") -> bool:
        return all(self.contains(v) for v in other.rational_basis())

    def scale(self, s) -> "QuaternionLattice":
        s = Fraction(s)
        return QuaternionLattice.from_generators(self.algebra, [[x * s for x in row] for row in self.rational_basis()])

    def conjugate(self) -> "QuaternionLattice":
        return QuaternionLattice.from_generators(
            self.algebra, [[r[0], -r[1], -r[2], -r[3]] for r in self.rational_basis()]
        )

    def __mul__(self, other: "QuaternionLattice") -> "QuaternionLattice":
        gens = [mul_coords(self.a, self.b, x, y) for x in self.basis for y in other.basis]
        den = self.den * other.den
        return QuaternionLattice.from_generators(self.algebra, [[Fraction(c, den) for c in g] for g in gens])

    def left_multiply(self, q: Sequence) -> "QuaternionLattice":
        """q * self for a single element q (coordinates)."""
        return QuaternionLattice.from_generators(
            self.algebra, [mul_coords(self.a, self.b, q, x) for x in self.rational_basis()]
        )

    def right_multiply(self, q: Sequence) -> "QuaternionLattice":
        return QuaternionLattice.from_generators(
            self.algebra, [mul_coords(self.a, self.b, x, q) for x in self.rational_basis()]
        )

    def intersect(self, other: "QuaternionLattice") -> "QuaternionLattice":
        rows, den = la.intersect(self.rational_basis(), other.rational_basis())
        return QuaternionLattice(self.algebra, tuple(tuple(r) for r in rows), den)

    def index_in(self, other: "QuaternionLattice") -> Fraction:
        """[other : self] as a ratio of covolumes."""
        return abs(la.det(self.rational_basis()) / la.det(other.rational_basis()))

    def gram_lattice(self, scale=1) -> GramLattice:
        return GramLattice(tuple(tuple(x / Fraction(scale) for x in row) for row in self.bgram))

    def to_json(self) -> dict:
        return {"a": self.a, "b": self.b, "basis": [list(r) for r in self.basis], "den": self.den}

    def __repr__(self):
        return f"{type(self).__name__}(den={self.den}, basis={self.basis})"


class OrderLattice(QuaternionLattice):
    """A quaternion lattice that is a ring containing 1."""

    @classmethod
    def of(cls, lat: QuaternionLattice) -> "OrderLattice":
        return cls(lat.algebra, lat.basis, lat.den)

    def is_order(self) -> bool:
        if not self.contains((1, 0, 0, 0)):
            return False
        if not all(x.denominator == 1 for row in self.bgram for x in row):
            return False
        prod = QuaternionLattice.__mul__(self, self)
        return self.contains_lattice(prod)

    def discriminant(self) -> int:
        """Reduced discriminant: sqrt of the Gram determinant of b."""
        d = self.gram_det()
        r = int(round(float(d) ** 0.5))
        for cand in (r - 1, r, r + 1):
            if cand > 0 and cand * cand == d:
                return cand
        raise ConstructionError(f"Gram determinant {d} is not a square")


@dataclass(frozen=True)
class LeftIdeal:
    lattice: QuaternionLattice
    left_order: OrderLattice
    right_order: OrderLattice
    reduced_norm: Fraction

    @classmethod
    def make(cls, lattice: QuaternionLattice) -> "LeftIdeal":
        nrm = lattice.reduced_norm()
        conj = lattice.conjugate()
        left = OrderLattice.of((lattice * conj).scale(1 / nrm))
        right = OrderLattice.of((conj * lattice).scale(1 / nrm))
        return cls(lattice, left, right, nrm)

    @property
    def basis(self):
        return self.lattice.basis

    def check(self) -> None:
        if not self.lattice.contains_lattice(self.left_order * self.lattice):
            raise ConstructionError("left order does not stabilise the ideal")
        if not self.lattice.contains_lattice(self.lattice * self.right_order):
            raise ConstructionError("right order does not stabilise the ideal")

    def to_json(self) -> dict:
        n = self.reduced_norm
        return {"lattice": self.lattice.to_json(), "reduced_norm": f"{n.numerator}/{n.denominator}"}


@dataclass(frozen=True)
class ClassSet:
    order: OrderLattice
    N1: int
    N2: int
    representatives: tuple[LeftIdeal, ...]
    right_orders: tuple[OrderLattice, ...]
    unit_counts: tuple[int, ...]

    @property
    def h(self) -> int:
        return len(self.representatives)

    @property
    def mass(self) -> Fraction:
        return sum((Fraction(1, e) for e in self.unit_counts), Fraction(0))

    def to_json(self) -> dict:
        return {
            "N1": self.N1,
            "N2": self.N2,
            "order": self.order.to_json(),
            "representatives": [I.to_json() for I in self.representatives],
            "unit_counts": list(self.unit_counts),
        }

    @classmethod
    def from_json(cls, doc: dict) -> "ClassSet":
        alg_primes = frozenset(primes_of(doc["N1"]))

        def lat(d):
            return QuaternionLattice(
                AlgebraParams(d["a"], d["b"], alg_primes), tuple(tuple(r) for r in d["basis"]), d["den"]
            )

        order = OrderLattice.of(lat(doc["order"]))
        reps = tuple(LeftIdeal.make(lat(r["lattice"])) for r in doc["representatives"])
        return cls(order, doc["N1"], doc["N2"], reps, tuple(I.right_order for I in reps), tuple(doc["unit_counts"]))


# --- maximal orders -------------------------------------------------------------

def _standard_order(params: AlgebraParams) -> OrderLattice:
    return OrderLattice(params, tuple(tuple(r) for r in la.identity(4)), 1)


def _ring_closure(lat: QuaternionLattice, max_steps: int = 20) -> OrderLattice | None:
    """Smallest ring containing `lat`, or None once a non-integral element appears."""
    cur = lat
    for _ in range(max_steps):
        if not all(x.denominator == 1 for row in cur.bgram for x in row):
            return None
        if any(cur.bgram[i][i] % 2 for i in range(4)):
            return None
        nxt = QuaternionLattice.from_generators(
            cur.algebra, cur.rational_basis() + (cur * cur).rational_basis()
        )
        if nxt == cur:
            return OrderLattice.of(cur)
        cur = nxt
    return None


def _residue_vectors(p: int, normalized: bool = False) -> np.ndarray:
    """All nonzero c in [0, p)^4 in lexicographic order (first nonzero = 1 if normalized)."""
    grid = np.array(list(itertools.product(range(p), repeat=4)), dtype=np.int64)[1:]
    if normalized:
        first = grid[np.arange(len(grid)), (grid != 0).argmax(axis=1)]
        grid = grid[first == 1]
    return grid


def _saturate_at(order: OrderLattice, p: int) -> OrderLattice | None:
    """A strictly larger order inside (1/p) order, or None if order is p-maximal."""
    G = np.array([[int(x) for x in row] for row in order.bgram], dtype=np.int64)
    traces = np.array([int(2 * Fraction(r[0], order.den)) for r in order.basis], dtype=np.int64)
    cands = _residue_vectors(p)
    normsx2 = np.einsum("ij,jk,ik->i", cands, G, cands)  # = 2 n(sum c_i e_i)
    ok = (normsx2 % (2 * p * p) == 0) & ((cands @ traces) % p == 0)
    base = order.rational_basis()
    for c in cands[ok]:
        x = [sum(Fraction(int(ci), p) * base[k][t] for k, ci in enumerate(c)) for t in range(4)]
        closed = _ring_closure(QuaternionLattice.from_generators(order.algebra, base + [x]))
        if closed is not None:
            return closed
    return None


def maximal_order(params: AlgebraParams, max_iterations: int = 64) -> OrderLattice:
    """Maximal order by p-saturation of Z<1, i, j, k>; reduced discriminant = prod of ramified primes."""
    target = params.discriminant
    order = _standard_order(params)
    for _ in range(max_iterations):
        disc = order.discriminant()
        if disc == target:
            return order
        progressed = False
        for p in primes_of(disc):
            if (disc // target) % p == 0 or (target % p == 0 and (disc // p) % p == 0):
                bigger = _saturate_at(order, p)
                if bigger is not None:
                    order = bigger
                    progressed = True
                    break
        if not progressed:
            raise ConstructionError(f"saturation stalled at discriminant {disc} (target {target})")
    raise ConstructionError("saturation did not terminate")


# --- ideals -----------------------------------------------------------------------

def _zero_divisors_mod_p(order: OrderLattice, p: int) -> list[list[Fraction]]:
    """Elements sum c_k e_k with n = 0 mod p, c in [0,p)^4, first nonzero c = 1."""
    G = np.array([[int(x) for x in row] for row in order.bgram], dtype=np.int64)
    cands = _residue_vectors(p, normalized=True)
    normsx2 = np.einsum("ij,jk,ik->i", cands, G, cands)
    hits = cands[normsx2 % (2 * p) == 0]
    base = order.rational_basis()
    return [[sum(int(ci) * base[k][t] for k, ci in enumerate(c)) for t in range(4)] for c in hits]


def norm_p_left_ideals(order: OrderLattice, p: int) -> list[QuaternionLattice]:
    """The p + 1 left ideals of `order` of reduced norm p containing p*order (p not dividing the level)."""
    found: dict[QuaternionLattice, None] = {}
    base = order.rational_basis()
    pO = [[p * x for x in row] for row in base]
    for alpha in _zero_divisors_mod_p(order, p):
        gens = [mul_coords(order.a, order.b, e, alpha) for e in base] + pO
        I = QuaternionLattice.from_generators(order.algebra, gens)
        if I.index_in(order) != p * p:
            continue
        found.setdefault(I)
        if len(found) == p + 1:
            break
    return list(found)


def eichler_order(maximal: OrderLattice, N2: int) -> OrderLattice:
    """Eichler order of level N1*N2 inside `maximal`: upper triangular mod p for each p | N2."""
    ramified = maximal.algebra.ramified_finite
    order = maximal
    for p in primes_of(N2) if N2 > 1 else []:
        if p in ramified:
            raise ValueError(f"p = {p} is ramified; cannot impose Eichler level structure")
        for alpha in _zero_divisors_mod_p(maximal, p):
            base = maximal.rational_basis()
            gens = [mul_coords(maximal.a, maximal.b, e, alpha) for e in base] + [[p * x for x in r] for r in base]
            I = QuaternionLattice.from_generators(maximal.algebra, gens)
            if I.index_in(maximal) != p * p:
                continue
            right = (I.conjugate() * I).scale(Fraction(1, p))
            order = OrderLattice.of(order.intersect(right))
            break
        else:
            raise ConstructionError(f"could not split the residue algebra at p = {p}")
    expected = maximal.discriminant() * N2
    if order.discriminant() != expected or not order.is_order():
        raise ConstructionError(f"Eichler order has discriminant {order.discriminant()}, expected {expected}")
    return order


def ideal_inverse(I: LeftIdeal) -> LeftIdeal:
    inv = I.lattice.conjugate().scale(1 / I.reduced_norm)
    return LeftIdeal(inv, I.right_order, I.left_order, 1 / I.reduced_norm)


def ideal_product(I: LeftIdeal, J: LeftIdeal) -> LeftIdeal:
    if I.right_order != J.left_order:
        raise ValueError("right order of the first ideal must equal left order of the second")
    prod = I.lattice * J.lattice
    return LeftIdeal(prod, I.left_order, J.right_order, I.reduced_norm * J.reduced_norm)


def as_ideal(order: OrderLattice) -> LeftIdeal:
    return LeftIdeal(order, order, order, Fraction(1))


def unit_count(order: QuaternionLattice) -> int:
    """Number of elements of reduced norm 1."""
    return count_unary(order.gram_lattice(), 1)


def equivalent(I: LeftIdeal, J: LeftIdeal) -> bool:
    """I ~ J (J = I x for some x) iff conj(I) J has an element of norm n(I) n(J)."""
    M = I.lattice.conjugate() * J.lattice
    return count_unary(_reduced(M.gram_lattice(I.reduced_norm * J.reduced_norm)), 1) > 0


def _reduced(L: GramLattice) -> GramLattice:
    red, _ = lll_gram(L.bgram)
    return GramLattice(tuple(map(tuple, red)))


def eichler_mass(N1: int, N2: int) -> Fraction:
    m = Fraction(1, 24)
    for p in primes_of(N1):
        m *= p - 1
    for p in primes_of(N2) if N2 > 1 else []:
        m *= p + 1
    return m


def ideal_classes(R: OrderLattice, N1: int, N2: int, primes: Iterable[int] | None = None,
                  max_classes: int = 500) -> ClassSet:
    """Left ideal class representatives of the Eichler order R by neighbour exploration.

    Stops as soon as the unit-weighted count reaches the Eichler mass, which
    certifies that every class was found.
    """
    N = N1 * N2
    target = eichler_mass(N1, N2)
    if primes is None:
        primes = [p for p in primerange(2, 200) if N % p]
    reps = [as_ideal(R)]
    units = [unit_count(R)]
    mass = Fraction(1, units[0])
    for p in primes:
        if mass == target:
            break
        queue = list(reps)
        while queue and mass < target:
            J = queue.pop(0)
            for K in norm_p_left_ideals(J.right_order, p):
                cand = LeftIdeal.make(J.lattice * K)
                if any(equivalent(rep, cand) for rep in reps):
                    continue
                reps.append(cand)
                e = unit_count(cand.right_order)
                units.append(e)
                mass += Fraction(1, e)
                queue.append(cand)
                if mass >= target or len(reps) > max_classes:
                    break
    if mass != target:
        raise ConstructionError(f"class exploration reached mass {mass}, expected {target}")
    return ClassSet(R, N1, N2, tuple(reps), tuple(I.right_order for I in reps), tuple(units))


def make_Iij(classes: ClassSet, i: int, j: int) -> LeftIdeal:
    """I_ij = I_i^-1 I_j, left order R_i and right order R_j (1-based indices)."""
    Ii = classes.representatives[i - 1]
    Ij = classes.representatives[j - 1]
    if i == j:
        return as_ideal(classes.right_orders[i - 1])
    return ideal_product(ideal_inverse(Ii), Ij)


def ideal_to_lattice(I: LeftIdeal) -> GramLattice:
    """(I, n / n(I)) as an LLL-reduced Gram lattice."""
    return _reduced(I.lattice.gram_lattice(I.reduced_norm))


def ternary_lattice(order: QuaternionLattice) -> GramLattice:
    """Trace-zero part of Z + 2*order with the reduced norm."""
    base = order.rational_basis()
    M = QuaternionLattice.from_generators(order.algebra, [[1, 0, 0, 0]] + [[2 * x for x in r] for r in base])
    mb = M.rational_basis()
    traces = [int(2 * r[0]) for r in mb]
    ker = la.integer_kernel([traces])
    gens = [[sum(c * mb[k][t] for k, c in enumerate(row)) for t in range(4)] for row in ker]
    a, b = order.a, order.b
    G = [[bilinear_coords(a, b, x, y) for y in gens] for x in gens]
    return _reduced(GramLattice(tuple(map(tuple, G))))
