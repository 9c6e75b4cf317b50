"""Positive definite integral lattices given by a Gram matrix.

The stored object is the Gram matrix of the bilinear form b (even diagonal);
the quadratic value of a vector is q(x) = b(x, x) / 2. Vectors are integer
coordinate rows with respect to the lattice basis.

Enumeration is Fincke-Pohst on an LLL-reduced basis. Bounds are computed in
floating point with slack and every candidate is then checked exactly, so
results are exact.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Iterator, Sequence

import numpy as np

from . import _linalg as la

__all__ = [
    "GramLattice",
    "BinaryTarget",
    "lll_gram",
    "short_vectors",
    "vectors_by_norm",
    "count_unary",
    "count_binary",
    "count_binary_primitive",
    "dual",
    "partial_dual",
    "partial_dual_basis",
    "rescale",
    "rescaled_partial_dual",
    "isometric",
    "automorphism_count",
    "theta_prefix",
]


def _normalize(x):
    x = Fraction(x)
    return int(x) if x.denominator == 1 else x


@dataclass(frozen=True)
class GramLattice:
    """Lattice with b-Gram matrix `bgram` (a tuple of row tuples)."""

    bgram: tuple[tuple, ...]

    def __post_init__(self):
        rows = tuple(tuple(_normalize(x) for x in row) for row in self.bgram)
        object.__setattr__(self, "bgram", rows)
        n = len(rows)
        if any(len(r) != n for r in rows):
            raise ValueError("Gram matrix must be square")
        for i in range(n):
            for j in range(i):
                if rows[i][j] != rows[j][i]:
                    raise ValueError("Gram matrix must be symmetric")
        for k in range(1, n + 1):
            if la.det([r[:k] for r in rows[:k]]) <= 0:
                raise ValueError("Gram matrix is not positive definite")

    @classmethod
    def from_matrix(cls, m) -> "GramLattice":
        return cls(tuple(tuple(row) for row in np.asarray(m, dtype=object).tolist()))

    @property
    def rank(self) -> int:
        return len(self.bgram)

    @property
    def is_integral(self) -> bool:
        return all(isinstance(x, int) for row in self.bgram for x in row)

    @property
    def is_even(self) -> bool:
        return self.is_integral and all(self.bgram[i][i] % 2 == 0 for i in range(self.rank))

    def matrix(self) -> np.ndarray:
        if not self.is_integral:
            raise ValueError("lattice is not integral")
        return np.array(self.bgram, dtype=np.int64)

    def det(self) -> Fraction:
        return la.det(self.bgram)

    def discriminant(self) -> int:
        """Determinant of the b-Gram matrix."""
        d = self.det()
        return int(d) if d.denominator == 1 else d

    def level(self) -> int:
        """Smallest k > 0 with k * bgram^-1 integral with even diagonal."""
        inv = la.inverse(self.bgram)
        k = 1
        for row in inv:
            for x in row:
                k = k * x.denominator // gcd(k, x.denominator)
        while True:
            m = [[k * x for x in row] for row in inv]
            if all(x.denominator == 1 for row in m for x in row) and all(m[i][i] % 2 == 0 for i in range(len(m))):
                return k
            k *= 2  # only the diagonal parity can still fail

    def q(self, x: Sequence[int]):
        g = self.bgram
        n = self.rank
        return Fraction(sum(x[i] * g[i][j] * x[j] for i in range(n) for j in range(n)), 2)

    def b(self, x: Sequence[int], y: Sequence[int]):
        g = self.bgram
        n = self.rank
        return sum(x[i] * g[i][j] * y[j] for i in range(n) for j in range(n))

    def transform(self, basis: Sequence[Sequence]) -> "GramLattice":
        """Lattice spanned by `basis` rows (coordinates in this lattice's basis)."""
        return GramLattice(tuple(map(tuple, la.matmul(la.matmul(basis, self.bgram), la.transpose(basis)))))

    def to_json(self) -> dict:
        if not self.is_integral:
            raise ValueError("only integral lattices serialise to the lattice JSON format")
        return {"rank": self.rank, "bgram": [list(r) for r in self.bgram]}

    @classmethod
    def from_json(cls, doc: dict) -> "GramLattice":
        lat = cls(tuple(tuple(int(x) for x in row) for row in doc["bgram"]))
        if lat.rank != doc.get("rank", lat.rank):
            raise ValueError("rank field does not match bgram")
        return lat


@dataclass(frozen=True)
class BinaryTarget:
    """Binary form a x^2 + b xy + c y^2, i.e. the even matrix [[2a, b], [b, 2c]]."""

    a: int
    b: int
    c: int

    def __post_init__(self):
        if self.a <= 0 or self.b * self.b - 4 * self.a * self.c >= 0:
            raise ValueError(f"{self} is not positive definite")

    @property
    def d(self) -> int:
        return 4 * self.a * self.c - self.b * self.b

    def matrix(self) -> list[list[int]]:
        return [[2 * self.a, self.b], [self.b, 2 * self.c]]


# --- LLL on a Gram matrix ----------------------------------------------------

def lll_gram(gram: Sequence[Sequence], delta: Fraction = Fraction(3, 4)) -> tuple[list[list], list[list[int]]]:
    """Exact LLL reduction of a positive definite Gram matrix.

    Returns (reduced_gram, U) with reduced_gram = U gram U^T and U unimodular.
    """
    n = len(gram)
    G = [[Fraction(x) for x in row] for row in gram]
    U = la.identity(n)

    def gso():
        mu = [[Fraction(0)] * n for _ in range(n)]
        B = [Fraction(0)] * n
        for i in range(n):
            for j in range(i):
                s = G[i][j] - sum(mu[j][k] * mu[i][k] * B[k] for k in range(j))
                mu[i][j] = s / B[j]
            B[i] = G[i][i] - sum(mu[i][k] ** 2 * B[k] for k in range(i))
        return mu, B

    def recompute():
        # G = U g U^T from scratch keeps the bookkeeping trivial.
        m = la.matmul(la.matmul(U, gram), la.transpose(U))
        for i in range(n):
            for j in range(n):
                G[i][j] = Fraction(m[i][j])

    k = 1
    while k < n:
        for j in range(k - 1, -1, -1):
            mu, _ = gso()
            q = round(mu[k][j])
            if q:
                U[k] = [x - q * y for x, y in zip(U[k], U[j])]
                recompute()
        mu, B = gso()
        if B[k] >= (delta - mu[k][k - 1] ** 2) * B[k - 1]:
            k += 1
        else:
            U[k], U[k - 1] = U[k - 1], U[k]
            recompute()
            k = max(k - 1, 1)
    return [[_normalize(x) for x in row] for row in G], U


# --- Fincke-Pohst enumeration -------------------------------------------------

def _cholesky_float(gram: Sequence[Sequence]) -> tuple[np.ndarray, np.ndarray]:
    """q(x) = sum_i diag[i] * (x_i + sum_{j>i} mu[i][j] x_j)^2 for q = x gram x^T / 2."""
    n = len(gram)
    Q = [[Fraction(x) / 2 for x in row] for row in gram]
    mu = [[Fraction(0)] * n for _ in range(n)]
    diag = [Fraction(0)] * n
    for i in range(n):
        for j in range(i, n):
            s = Q[i][j] - sum(mu[k][i] * mu[k][j] * diag[k] for k in range(i))
            if j == i:
                diag[i] = s
            else:
                mu[i][j] = s / diag[i]
    return np.array([float(x) for x in diag]), np.array([[float(x) for x in row] for row in mu])


def _enumerate_reduced(gram: Sequence[Sequence[int]], bound) -> np.ndarray:
    """All x != 0 (both signs) with q(x) <= bound, for an integral even gram."""
    n = len(gram)
    diag, mu = _cholesky_float(gram)
    eps = 1e-9 * (1 + float(bound))
    B = float(bound) + eps
    coords = np.zeros((1, 0), dtype=np.int64)
    rem = np.array([B])
    for i in range(n - 1, -1, -1):
        # coords holds x_{i+1..n-1}
        if coords.shape[1]:
            center = -(coords @ mu[i, i + 1:])
        else:
            center = np.zeros(len(rem))
        t = np.sqrt(np.maximum(rem, 0.0) / diag[i])
        lo = np.ceil(center - t - 1e-9).astype(np.int64)
        hi = np.floor(center + t + 1e-9).astype(np.int64)
        cnt = np.maximum(hi - lo + 1, 0)
        total = int(cnt.sum())
        if total == 0:
            return np.zeros((0, n), dtype=np.int64)
        parent = np.repeat(np.arange(len(cnt)), cnt)
        starts = np.cumsum(cnt) - cnt
        xi = lo[parent] + (np.arange(total) - starts[parent])
        new_rem = rem[parent] - diag[i] * (xi - center[parent]) ** 2
        keep = new_rem >= -eps
        coords = np.concatenate([xi[keep, None], coords[parent][keep]], axis=1)
        rem = new_rem[keep]
    G = np.array(gram, dtype=np.int64)
    qv = np.einsum("ij,jk,ik->i", coords, G, coords) // 2
    ok = (qv > 0) & (qv <= int(bound))
    return coords[ok]


class _VectorCache:
    """Per-process memo of enumerations, keyed by lattice; guarded by a lock."""

    def __init__(self, maxsize: int = 256):
        self._lock = threading.Lock()
        self._data: dict[GramLattice, tuple[int, np.ndarray, np.ndarray]] = {}
        self._maxsize = maxsize

    def get(self, L: GramLattice, bound: int) -> tuple[np.ndarray, np.ndarray]:
        with self._lock:
            hit = self._data.get(L)
        if hit is not None and hit[0] >= bound:
            _, vecs, qs = hit
            stop = np.searchsorted(qs, bound, side="right")
            return vecs[:stop], qs[:stop]
        vecs, qs = _all_vectors(L, bound)
        with self._lock:
            if len(self._data) >= self._maxsize:
                self._data.pop(next(iter(self._data)))
            self._data[L] = (bound, vecs, qs)
        return vecs, qs

    def clear(self) -> None:
        with self._lock:
            self._data.clear()


_CACHE = _VectorCache()


def _all_vectors(L: GramLattice, bound: int) -> tuple[np.ndarray, np.ndarray]:
    """Both signs, sorted by (q, coordinates). Coordinates in L's own basis."""
    if not L.is_even:
        raise ValueError("enumeration needs an integral lattice with even diagonal")
    red, U = lll_gram(L.bgram)
    ys = _enumerate_reduced(red, bound)
    xs = ys @ np.array(U, dtype=np.int64)
    G = L.matrix()
    qs = np.einsum("ij,jk,ik->i", xs, G, xs) // 2
    order = np.lexsort(tuple(xs[:, k] for k in range(L.rank - 1, -1, -1)) + (qs,))
    return xs[order], qs[order]


def vectors_by_norm(L: GramLattice, t: int) -> np.ndarray:
    """All x (both signs) with q(x) == t."""
    if t <= 0:
        return np.zeros((0, L.rank), dtype=np.int64)
    vecs, qs = _CACHE.get(L, int(t))
    lo, hi = np.searchsorted(qs, [t, t + 1])
    return vecs[lo:hi]


def short_vectors(L: GramLattice, bound: int, both_signs: bool = False) -> list[tuple[tuple[int, ...], int]]:
    """Nonzero x with q(x) <= bound, as (coords, q) sorted by q then coordinates.

    By default one vector per +-pair is returned (first nonzero coordinate positive).
    """
    vecs, qs = _CACHE.get(L, int(bound))
    out = []
    for v, qv in zip(vecs.tolist(), qs.tolist()):
        if not both_signs:
            first = next(x for x in v if x)
            if first < 0:
                continue
        out.append((tuple(v), qv))
    return out


def count_unary(L: GramLattice, t: int) -> int:
    return len(vectors_by_norm(L, t))


def theta_prefix(L: GramLattice, bound: int) -> tuple[int, ...]:
    """(r(L,1), ..., r(L,bound))."""
    _, qs = _CACHE.get(L, bound)
    return tuple(np.bincount(qs, minlength=bound + 1)[1:bound + 1].tolist())


def _target(T) -> BinaryTarget:
    if isinstance(T, BinaryTarget):
        return T
    a, b, c = T
    return BinaryTarget(int(a), int(b), int(c))


def _pair_matches(L: GramLattice, T) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    T = _target(T)
    xs = vectors_by_norm(L, T.a)
    ys = vectors_by_norm(L, T.c)
    if not len(xs) or not len(ys):
        empty = np.zeros((0, L.rank), dtype=np.int64)
        return empty, empty, np.zeros(0, dtype=np.int64)
    prods = (xs @ L.matrix()) @ ys.T
    ix, iy = np.nonzero(prods == T.b)
    return xs, ys, np.stack([ix, iy]) if len(ix) else np.zeros((2, 0), dtype=np.int64)


def count_binary(L: GramLattice, T) -> int:
    """Number of (x, y) with q(x) = a, q(y) = c, b(x, y) = b."""
    _, _, idx = _pair_matches(L, T)
    return int(idx.shape[1]) if idx.ndim == 2 else 0


def _minor_gcd(X: np.ndarray, Y: np.ndarray) -> np.ndarray:
    n = X.shape[1]
    g = np.zeros(len(X), dtype=np.int64)
    for k in range(n):
        for l in range(k + 1, n):
            g = np.gcd(g, X[:, k] * Y[:, l] - X[:, l] * Y[:, k])
    return g


def count_binary_primitive(L: GramLattice, T) -> int:
    """Representations (x, y) for which Zx + Zy is a direct summand of L."""
    xs, ys, idx = _pair_matches(L, T)
    if idx.ndim != 2 or idx.shape[1] == 0:
        return 0
    return int(np.count_nonzero(_minor_gcd(xs[idx[0]], ys[idx[1]]) == 1))


# --- duals -------------------------------------------------------------------

def dual(L: GramLattice) -> list[list[Fraction]]:
    """Gram matrix of the dual lattice in the dual basis (= bgram^-1)."""
    return la.inverse(L.bgram)


def partial_dual_basis(L: GramLattice, s: int) -> list[list[Fraction]]:
    """Basis (rows, in L-coordinates) of L^# intersected with (1/s) L."""
    if s < 1:
        raise ValueError("s must be positive")
    if s == 1:
        return [[Fraction(x) for x in row] for row in la.identity(L.rank)]
    lev = L.level()
    if lev % s:
        raise ValueError(f"s = {s} does not divide the level {lev}")
    rows, den = la.intersect(la.inverse(L.bgram), [[Fraction(x, s) for x in row] for row in la.identity(L.rank)])
    return [[Fraction(x, den) for x in row] for row in rows]


def partial_dual(L: GramLattice, s: int) -> GramLattice:
    return L.transform(partial_dual_basis(L, s))


def rescale(L: GramLattice, s) -> GramLattice:
    return GramLattice(tuple(tuple(s * x for x in row) for row in L.bgram))


def rescaled_partial_dual(L: GramLattice, s: int) -> GramLattice:
    """L^{*,s}: the partial dual at s with the form multiplied by s, LLL-reduced."""
    M = rescale(partial_dual(L, s), s)
    red, _ = lll_gram(M.bgram)
    return GramLattice(tuple(map(tuple, red)))


# --- isometries ---------------------------------------------------------------

def _backtrack(G1: list[list[int]], L2: GramLattice) -> Iterator[np.ndarray]:
    """Yield integer matrices M with M G2 M^T = G1 (rows = images of G1's basis)."""
    n = len(G1)
    G2 = L2.matrix()
    cands = []
    for i in range(n):
        if G1[i][i] % 2:
            return
        c = vectors_by_norm(L2, G1[i][i] // 2)
        if not len(c):
            return
        cands.append((c, c @ G2))
    chosen: list[np.ndarray] = []

    def rec(i: int):
        c, cg = cands[i]
        mask = np.ones(len(c), dtype=bool)
        for j, v in enumerate(chosen):
            mask &= (cg @ v) == G1[i][j]
        for row in c[mask]:
            chosen.append(row)
            if i + 1 == n:
                yield np.array(chosen)
            else:
                yield from rec(i + 1)
            chosen.pop()

    yield from rec(0)


def isometric(L1: GramLattice, L2: GramLattice) -> np.ndarray | None:
    """An integral X with X G2 X^T = G1, or None if the lattices are not isometric."""
    if L1.rank != L2.rank or L1.det() != L2.det():
        return None
    red1, U1 = lll_gram(L1.bgram)
    bound = max(red1[i][i] for i in range(L1.rank)) // 2
    if theta_prefix(L1, bound) != theta_prefix(L2, bound):
        return None
    for M in _backtrack(red1, L2):
        Uinv = la.inverse(U1)
        X = la.matmul(Uinv, M.tolist())
        return np.array([[int(x) for x in row] for row in X], dtype=np.int64)
    return None


def automorphism_count(L: GramLattice) -> int:
    """|O(L)|, improper automorphisms included."""
    red, _ = lll_gram(L.bgram)
    R = GramLattice(tuple(map(tuple, red)))
    return sum(1 for _ in _backtrack(red, R))
