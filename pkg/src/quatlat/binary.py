"""Positive definite binary quadratic forms a x^2 + b xy + c y^2 of discriminant -d.

A form (a, b, c) stands for the even matrix [[2a, b], [b, 2c]], so -d = b^2 - 4ac.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from math import gcd, isqrt

from sympy import factorint, jacobi_symbol

from .quaternion import primes_of

__all__ = [
    "BinaryFormClass",
    "reduce",
    "class_list",
    "class_number",
    "unit_count",
    "is_discriminant",
    "is_fundamental",
    "divisor_count",
    "Nd",
    "kronecker",
    "local_admissible",
    "apply_sl2",
]


@dataclass(frozen=True, order=True)
class BinaryFormClass:
    a: int
    b: int
    c: int

    @property
    def d(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    @property
    def is_reduced(self) -> bool:
        a, b, c = self.a, self.b, self.c
        return abs(b) <= a <= c and not (b < 0 and (abs(b) == a or a == c))

    @property
    def is_primitive(self) -> bool:
        return gcd(gcd(self.a, self.b), self.c) == 1

    def as_tuple(self) -> tuple[int, int, int]:
        return (self.a, self.b, self.c)

    def matrix(self) -> list[list[int]]:
        return [[2 * self.a, self.b], [self.b, 2 * self.c]]


def apply_sl2(form, U) -> tuple[int, int, int]:
    """Coefficients of U^T T U."""
    a, b, c = form
    (p, q), (r, s) = U
    return (
        a * p * p + b * p * r + c * r * r,
        2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s,
        a * q * q + b * q * s + c * s * s,
    )


def reduce(a: int, b: int, c: int) -> BinaryFormClass:
    """Gauss reduction to the unique reduced form in the SL2(Z) class."""
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError(f"({a}, {b}, {c}) is not positive definite")
    while True:
        if c < a:
            a, b, c = c, -b, a
            continue
        if not -a < b <= a:
            # translate x -> x + k y with k chosen to bring b into (-a, a]
            k = (a - b) // (2 * a)
            a, b, c = a, b + 2 * a * k, a * k * k + b * k + c
            continue
        if a == c and b < 0:
            b = -b
        return BinaryFormClass(a, b, c)


def is_discriminant(D: int) -> bool:
    return D % 4 in (0, 1)


@lru_cache(maxsize=None)
def class_list(d: int, primitive_only: bool = False) -> tuple[BinaryFormClass, ...]:
    """All reduced forms of discriminant -d (imprimitive ones included unless asked)."""
    if d <= 0 or not is_discriminant(-d):
        raise ValueError(f"-{d} is not a negative discriminant")
    out = []
    for a in range(1, isqrt(d // 3) + 1):
        for b in range(-a + 1, a + 1):
            if (b * b + d) % (4 * a):
                continue
            c = (b * b + d) // (4 * a)
            f = BinaryFormClass(a, b, c)
            if c >= a and f.is_reduced and (f.is_primitive or not primitive_only):
                out.append(f)
    return tuple(out)


def class_number(d: int, primitive_only: bool = False) -> int:
    return len(class_list(d, primitive_only))


@lru_cache(maxsize=None)
def unit_count(form) -> int:
    """Number of U in SL2(Z) with U^T T U = T, by exhaustive search.

    The columns (p, r) and (q, s) of an automorph satisfy f(p, r) = a and
    f(q, s) = c. Since the smaller eigenvalue of T/2 is at least d / (4 (a + c)),
    both columns have squared length at most 4 max(a, c) (a + c) / d, which
    bounds the search box.
    """
    if isinstance(form, BinaryFormClass):
        form = form.as_tuple()
    a, b, c = form
    if a <= 0 or b * b - 4 * a * c >= 0:
        raise ValueError("form must be positive definite")
    d = 4 * a * c - b * b
    bound = isqrt(4 * max(a, c) * (a + c) // d) + 1
    box = [(x, y) for x in range(-bound, bound + 1) for y in range(-bound, bound + 1)]

    def f(x, y):
        return a * x * x + b * x * y + c * y * y

    first = [v for v in box if f(*v) == a]
    second = [v for v in box if f(*v) == c]
    n = 0
    for p, r in first:
        for q, s in second:
            if p * s - q * r == 1 and 2 * a * p * q + b * (p * s + q * r) + 2 * c * r * s == b:
                n += 1
    return n


# --- arithmetic helpers ---------------------------------------------------------

def is_fundamental(d: int) -> bool:
    """Is -d the discriminant of an imaginary quadratic field?"""
    D = -d
    if D >= 0:
        return False
    if D % 4 == 1:
        return _squarefree(d)
    if D % 4 == 0:
        m = D // 4
        return m % 4 in (2, 3) and _squarefree(abs(m))
    return False


def _squarefree(n: int) -> bool:
    return all(e == 1 for e in factorint(n).values())


def divisor_count(n: int) -> int:
    out = 1
    for e in factorint(n).values():
        out *= e + 1
    return out


def Nd(N: int, d: int) -> int:
    return N // gcd(N, d)


def kronecker(D: int, p: int) -> int:
    """Kronecker symbol (D / p) for a prime p and a discriminant D.

    Small p use residue counting; larger odd p use quadratic reciprocity.
    """
    if p == 2:
        if D % 2 == 0:
            return 0
        return 1 if D % 8 == 1 else -1
    if D % p == 0:
        return 0
    if p <= 100:
        roots = sum(1 for x in range(p) if (x * x - D) % p == 0)
        return 1 if roots else -1
    return int(jacobi_symbol(D % p, p))


def local_admissible(d: int, N1: int, N2: int) -> bool:
    """No p | N1 splits and no p | N2 is inert in Q(sqrt(-d)); fundamental -d only."""
    if not is_fundamental(d):
        raise ValueError(f"-{d} is not a fundamental discriminant")
    if any(kronecker(-d, p) == 1 for p in primes_of(N1)):
        return False
    if N2 > 1 and any(kronecker(-d, p) == -1 for p in primes_of(N2)):
        return False
    return True
