"""Small exact linear algebra over Z and Q.

Matrices are lists of rows. Entries are ints or Fractions. Sizes here never
exceed a dozen rows, so plain Python loops are fine.
"""

from __future__ import annotations

from fractions import Fraction
from math import gcd, lcm
from typing import Sequence

Matrix = list[list]


def identity(n: int) -> list[list[int]]:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(m: Sequence[Sequence]) -> Matrix:
    return [list(col) for col in zip(*m)]


def matmul(a: Sequence[Sequence], b: Sequence[Sequence]) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def det(m: Sequence[Sequence]) -> Fraction:
    """Determinant by fraction-free Gaussian elimination."""
    a = [[Fraction(x) for x in row] for row in m]
    n = len(a)
    sign = 1
    result = Fraction(1)
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != c:
            a[c], a[piv] = a[piv], a[c]
            sign = -sign
        result *= a[c][c]
        inv = 1 / a[c][c]
        for r in range(c + 1, n):
            f = a[r][c] * inv
            if f:
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return sign * result


def inverse(m: Sequence[Sequence]) -> list[list[Fraction]]:
    n = len(m)
    a = [[Fraction(x) for x in row] + [Fraction(int(i == j)) for j in range(n)] for i, row in enumerate(m)]
    for c in range(n):
        piv = next((r for r in range(c, n) if a[r][c] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        a[c], a[piv] = a[piv], a[c]
        inv = 1 / a[c][c]
        a[c] = [x * inv for x in a[c]]
        for r in range(n):
            if r != c and a[r][c]:
                f = a[r][c]
                a[r] = [x - f * y for x, y in zip(a[r], a[c])]
    return [row[n:] for row in a]


def common_denominator(rows: Sequence[Sequence]) -> int:
    den = 1
    for row in rows:
        for x in row:
            den = lcm(den, Fraction(x).denominator)
    return den


def hnf(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Row Hermite normal form; zero rows are dropped.

    The result is upper triangular with positive pivots and entries above each
    pivot reduced into [0, pivot). Two integer matrices generate the same row
    lattice iff their HNFs agree.
    """
    a = [list(map(int, r)) for r in rows if any(r)]
    if not a:
        return []
    ncols = len(a[0])
    out: list[list[int]] = []
    col = 0
    while a and col < ncols:
        nz = [r for r in a if r[col] != 0]
        if not nz:
            col += 1
            continue
        zero = [r for r in a if r[col] == 0]
        # Euclid on the column until one row carries the gcd.
        while len(nz) > 1:
            nz.sort(key=lambda r: abs(r[col]))
            p = nz[0]
            rest = []
            for r in nz[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if r[col] != 0:
                    rest.append(r)
                elif any(r):
                    zero.append(r)
            nz = [p] + rest
        p = nz[0]
        if p[col] < 0:
            p = [-x for x in p]
        out.append(p)
        a = [r for r in zero if any(r)]
        col += 1
    # reduce above pivots
    for i in range(len(out)):
        pc = next(c for c, x in enumerate(out[i]) if x != 0)
        for k in range(i):
            q = out[k][pc] // out[i][pc]
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def rational_hnf(rows: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """HNF of the Z-span of rational rows, returned as (integer rows, denominator)."""
    den = common_denominator(rows)
    ints = [[int(Fraction(x) * den) for x in row] for row in rows]
    basis = hnf(ints)
    g = 0
    for row in basis:
        for x in row:
            g = gcd(g, x)
    g = gcd(g, den) or 1
    if g > 1:
        basis = [[x // g for x in row] for row in basis]
        den //= g
    return basis, den


def integer_kernel(rows: Sequence[Sequence[int]]) -> list[list[int]]:
    """Z-basis of {v in Z^n : rows . v = 0} (rows of the returned list)."""
    m = [list(map(int, r)) for r in rows]
    n = len(m[0])
    # Column operations on m tracked by an n x n unimodular matrix.
    aug = [[m[r][c] for r in range(len(m))] + identity(n)[c] for c in range(n)]
    k = len(m)
    red = hnf(aug)
    return [row[k:] for row in red if not any(row[:k])]


def dual_rows(basis: Sequence[Sequence]) -> list[list[Fraction]]:
    """Rows of the dual basis w.r.t. the standard dot product (square basis)."""
    return transpose(inverse(basis))


def intersect(basis_a: Sequence[Sequence], basis_b: Sequence[Sequence]) -> tuple[list[list[int]], int]:
    """Intersection of two full-rank lattices in Q^n via (A^* + B^*)^*."""
    rows, den = rational_hnf(dual_rows(basis_a) + dual_rows(basis_b))
    summed = [[Fraction(x, den) for x in row] for row in rows]
    return rational_hnf(dual_rows(summed))
