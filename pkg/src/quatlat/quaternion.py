"""Exact arithmetic in definite quaternion algebras over Q.

The algebra (a, b) has basis 1, i, j, k with i^2 = a, j^2 = b, k = ij = -ji.
Everything here is exact; no floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import gcd

import numpy as np
from sympy import factorint

__all__ = [
    "AlgebraParams",
    "RationalQuaternion",
    "multiply",
    "norm",
    "trace",
    "conjugate",
    "bilinear",
    "hilbert_symbol",
    "find_algebra",
    "primes_of",
    "AlgebraSearchError",
]


class AlgebraSearchError(RuntimeError):
    pass


def primes_of(n: int) -> list[int]:
    return sorted(factorint(abs(n)))


@dataclass(frozen=True)
class AlgebraParams:
    a: int
    b: int
    ramified_finite: frozenset[int] = field(default_factory=frozenset)

    def __post_init__(self):
        if self.a >= 0 or self.b >= 0:
            raise ValueError("definite algebra needs a < 0 and b < 0")
        if len(self.ramified_finite) % 2 == 0:
            raise ValueError("a definite algebra is ramified at an odd number of finite primes")

    @property
    def discriminant(self) -> int:
        out = 1
        for p in self.ramified_finite:
            out *= p
        return out

    def __call__(self, w=0, x=0, y=0, z=0) -> "RationalQuaternion":
        return RationalQuaternion(self, (Fraction(w), Fraction(x), Fraction(y), Fraction(z)))

    def basis(self) -> tuple["RationalQuaternion", ...]:
        return tuple(self(*row) for row in np.eye(4, dtype=int).tolist())


def mul_coords(a: int, b: int, p, q) -> tuple:
    """Product of coordinate 4-tuples in the algebra (a, b). Works for ints or Fractions."""
    w1, x1, y1, z1 = p
    w2, x2, y2, z2 = q
    return (
        w1 * w2 + a * x1 * x2 + b * y1 * y2 - a * b * z1 * z2,
        w1 * x2 + x1 * w2 - b * y1 * z2 + b * z1 * y2,
        w1 * y2 + y1 * w2 + a * x1 * z2 - a * z1 * x2,
        w1 * z2 + z1 * w2 + x1 * y2 - y1 * x2,
    )


def norm_coords(a: int, b: int, q) -> object:
    w, x, y, z = q
    return w * w - a * x * x - b * y * y + a * b * z * z


def bilinear_coords(a: int, b: int, p, q) -> object:
    """tr(p * conj(q)), the polarisation of the reduced norm."""
    return 2 * (p[0] * q[0] - a * p[1] * q[1] - b * p[2] * q[2] + a * b * p[3] * q[3])


@dataclass(frozen=True)
class RationalQuaternion:
    algebra: AlgebraParams
    coefficients: tuple[Fraction, Fraction, Fraction, Fraction]

    def _same(self, other: "RationalQuaternion") -> None:
        if (self.algebra.a, self.algebra.b) != (other.algebra.a, other.algebra.b):
            raise ValueError("quaternions from different algebras")

    def __add__(self, other):
        if not isinstance(other, RationalQuaternion):
            other = self.algebra(other)
        self._same(other)
        return RationalQuaternion(self.algebra, tuple(x + y for x, y in zip(self.coefficients, other.coefficients)))

    __radd__ = __add__

    def __neg__(self):
        return RationalQuaternion(self.algebra, tuple(-x for x in self.coefficients))

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, RationalQuaternion):
            return multiply(self, other)
        s = Fraction(other)
        return RationalQuaternion(self.algebra, tuple(x * s for x in self.coefficients))

    def __rmul__(self, other):
        s = Fraction(other)
        return RationalQuaternion(self.algebra, tuple(s * x for x in self.coefficients))

    def __truediv__(self, other):
        if isinstance(other, RationalQuaternion):
            return self * inverse(other)
        return self * (1 / Fraction(other))

    def __eq__(self, other):
        if isinstance(other, RationalQuaternion):
            return self.coefficients == other.coefficients and self.algebra.a == other.algebra.a \
                and self.algebra.b == other.algebra.b
        if isinstance(other, (int, Fraction)):
            return self.coefficients == (Fraction(other), 0, 0, 0)
        return NotImplemented

    def __hash__(self):
        return hash((self.algebra.a, self.algebra.b, self.coefficients))

    def __repr__(self):
        w, x, y, z = self.coefficients
        return f"{w} + {x}*i + {y}*j + {z}*k"

    def norm(self) -> Fraction:
        return norm(self)

    def trace(self) -> Fraction:
        return trace(self)

    def conjugate(self) -> "RationalQuaternion":
        return conjugate(self)


def multiply(p: RationalQuaternion, q: RationalQuaternion) -> RationalQuaternion:
    p._same(q)
    alg = p.algebra
    return RationalQuaternion(alg, mul_coords(alg.a, alg.b, p.coefficients, q.coefficients))


def norm(q: RationalQuaternion) -> Fraction:
    return norm_coords(q.algebra.a, q.algebra.b, q.coefficients)


def trace(q: RationalQuaternion) -> Fraction:
    return 2 * q.coefficients[0]


def conjugate(q: RationalQuaternion) -> RationalQuaternion:
    w, x, y, z = q.coefficients
    return RationalQuaternion(q.algebra, (w, -x, -y, -z))


def inverse(q: RationalQuaternion) -> RationalQuaternion:
    n = norm(q)
    if n == 0:
        raise ZeroDivisionError("zero quaternion")
    return conjugate(q) * (1 / n)


def bilinear(x: RationalQuaternion, y: RationalQuaternion) -> Fraction:
    x._same(y)
    return bilinear_coords(x.algebra.a, x.algebra.b, x.coefficients, y.coefficients)


# --- Hilbert symbols by exhaustive local solubility -------------------------

def _squarefree_part(n: int) -> int:
    sign = -1 if n < 0 else 1
    out = 1
    for p, e in factorint(abs(n)).items():
        if e % 2:
            out *= p
    return sign * out


def _vp(n: int, p: int) -> int:
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def _has_primitive_solution(a: int, b: int, p: int, modulus: int) -> bool:
    """Is z^2 = a x^2 + b y^2 solvable mod `modulus` with (x, y, z) not all divisible by p?

    A primitive solution has a unit coordinate, which can be scaled to 1, so it
    is enough to intersect two residue sets on each of the three affine charts.
    """
    r = np.arange(modulus, dtype=np.int64)
    sq = (r * r) % modulus
    # z = 1: 1 - a x^2 = b y^2
    if np.intersect1d((1 - a * sq) % modulus, (b * sq) % modulus).size:
        return True
    # x = 1: z^2 - b y^2 = a
    if np.intersect1d((sq - a) % modulus, (b * sq) % modulus).size:
        return True
    # y = 1: z^2 - a x^2 = b
    if np.intersect1d((sq - b) % modulus, (a * sq) % modulus).size:
        return True
    return False


@lru_cache(maxsize=None)
def hilbert_symbol(a: int, b: int, p) -> int:
    """Hilbert symbol (a, b)_p for p a prime or the string "infinity".

    Decided by searching for a primitive solution of z^2 = a x^2 + b y^2 modulo a
    power of p large enough for Hensel lifting: p^(1 + v(a) + v(b)) for odd p
    after removing square factors, 2^6 for p = 2.
    """
    if a == 0 or b == 0:
        raise ValueError("Hilbert symbol needs nonzero arguments")
    if p == "infinity" or p == float("inf"):
        return -1 if (a < 0 and b < 0) else 1
    a, b = _squarefree_part(a), _squarefree_part(b)
    if p == 2:
        modulus = 2 ** 6
    else:
        modulus = p ** (1 + _vp(a, p) + _vp(b, p))
    return 1 if _has_primitive_solution(a, b, p, modulus) else -1


def relevant_primes(a: int, b: int) -> list[int]:
    """Finite places where (a, b)_p can be -1."""
    return primes_of(2 * a * b)


def ramified_primes(a: int, b: int) -> frozenset[int]:
    return frozenset(p for p in relevant_primes(a, b) if hilbert_symbol(a, b, p) == -1)


def find_algebra(N1: int, window: int | None = None) -> AlgebraParams:
    """Smallest (|a|, |b|), |a| <= |b|, with (a, b) definite and ramified exactly at primes(N1)."""
    if N1 < 1:
        raise ValueError("N1 must be positive")
    target = primes_of(N1)
    if any(e > 1 for e in factorint(N1).values()):
        raise ValueError(f"N1 = {N1} is not squarefree")
    if len(target) % 2 == 0:
        raise ValueError(f"N1 = {N1} has an even number of prime factors")
    window = window or 4 * N1 * N1
    tset = frozenset(target)
    for A in range(1, window + 1):
        for B in range(A, window + 1):
            a, b = -A, -B
            # Fail fast on the primes that must ramify.
            if any(hilbert_symbol(a, b, p) != -1 for p in target):
                continue
            if ramified_primes(a, b) == tset:
                return AlgebraParams(a, b, tset)
    raise AlgebraSearchError(f"no algebra for N1 = {N1} with |a|, |b| <= {window}")


def gcd_fractions(values) -> Fraction:
    """Positive generator of the Z-module spanned by the given rationals."""
    num, den = 0, 1
    for v in values:
        v = Fraction(v)
        if v == 0:
            continue
        # gcd(n1/d1, n2/d2) = gcd(n1*d2, n2*d1) / (d1*d2)
        num, den = gcd(num * v.denominator, v.numerator * den), den * v.denominator
        g = gcd(num, den)
        num, den = num // g, den // g
    return Fraction(num, den)
