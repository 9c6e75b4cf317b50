import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from quatlat.lattice import (
    GramLattice,
    automorphism_count,
    count_binary,
    count_binary_primitive,
    count_unary,
    dual,
    isometric,
    lll_gram,
    partial_dual,
    rescale,
    rescaled_partial_dual,
    short_vectors,
    theta_prefix,
)

Z3 = GramLattice.from_matrix(2 * np.eye(3, dtype=int))
Z4 = GramLattice.from_matrix(2 * np.eye(4, dtype=int))
D4 = GramLattice(((2, 0, 0, 1), (0, 2, 0, 1), (0, 0, 2, 1), (1, 1, 1, 2)))  # Hurwitz order


def _random_lattice(rng, n):
    while True:
        A = rng.integers(-2, 3, size=(n, n))
        M = A @ A.T + np.diag(rng.integers(1, 3, size=n))
        E = rng.integers(-1, 2, size=(n, n))
        E = np.triu(E, 1)
        G = 2 * M + E + E.T
        if np.linalg.det(A) != 0 and np.all(np.linalg.eigvalsh(G) > 0.5):
            return GramLattice.from_matrix(G)


def _box(L, bound):
    """Every x with q(x) <= bound, by brute force over a box that provably contains them."""
    G = np.array(L.matrix(), dtype=float)
    Ginv = np.linalg.inv(G)
    radii = [int(math.isqrt(int(2 * bound * Ginv[i, i])) + 1) for i in range(L.rank)]
    ranges = [np.arange(-r, r + 1) for r in radii]
    X = np.array(list(itertools.product(*ranges)), dtype=np.int64)
    Gi = np.array(L.matrix(), dtype=np.int64)
    q = np.einsum("ij,jk,ik->i", X, Gi, X) // 2
    keep = (q <= bound) & np.any(X != 0, axis=1)
    return X[keep], q[keep]


RANDOM = [_random_lattice(np.random.default_rng(seed), 3 + seed % 2) for seed in range(24)]


@pytest.mark.parametrize("L", RANDOM)
def test_short_vectors_match_box(L):
    bound = 30
    X, q = _box(L, bound)
    expected = sorted((tuple(int(v) for v in x), int(t)) for x, t in zip(X, q))
    got = sorted(short_vectors(L, bound, both_signs=True))
    assert got == expected
    half = short_vectors(L, bound)
    assert 2 * len(half) == len(got)


@pytest.mark.parametrize("L", RANDOM[:20])
def test_count_binary_matches_box(L):
    X, q = _box(L, 12)
    G = np.array(L.matrix(), dtype=np.int64)
    B = X @ G @ X.T
    for T in [(1, 0, 1), (1, 1, 1), (1, 0, 2), (2, 1, 2), (2, 0, 3), (1, 1, 3), (3, 2, 3), (2, 2, 5)]:
        a, b, c = T
        xs = np.nonzero(q == a)[0]
        ys = np.nonzero(q == c)[0]
        pairs = [(s, t) for s in xs for t in ys if B[s, t] == b]
        assert count_binary(L, T) == len(pairs)
        prim = 0
        for s, t in pairs:
            minors = [int(X[s, u] * X[t, v] - X[s, v] * X[t, u]) for u in range(L.rank) for v in range(u + 1, L.rank)]
            if math.gcd(*minors) == 1:
                prim += 1
        assert count_binary_primitive(L, T) == prim


def test_unit_vectors():
    assert len(short_vectors(Z4, 1)) == 4
    assert len(short_vectors(Z4, 1, both_signs=True)) == 8
    assert len(short_vectors(D4, 1)) == 12
    assert count_unary(Z3, 1) == 6
    assert count_unary(Z3, 9) == 30
    assert count_unary(D4, 0) == 0


def test_theta_prefix_z3():
    # r_3(n) for n = 1..10
    assert theta_prefix(Z3, 10) == (6, 12, 8, 6, 24, 24, 0, 12, 30, 24)


def test_count_binary_known():
    assert count_binary(Z4, (1, 0, 1)) == 48
    assert count_binary(Z4, (5, 0, 5)) > 0
    assert count_binary(D4, (1, 1, 1)) == 24 * 8  # each unit pairs with 8 units at b = 1
    big = GramLattice.from_matrix(20 * np.eye(3, dtype=int))
    assert count_binary(big, (1, 0, 1)) == 0


def test_lll_gram_unimodular():
    rng = np.random.default_rng(5)
    for _ in range(10):
        L = _random_lattice(rng, 4)
        red, U = lll_gram(L.bgram)
        Um = np.array(U, dtype=object)
        assert abs(int(round(float(np.linalg.det(np.array(U, dtype=float)))))) == 1
        assert (Um @ np.array(L.bgram, dtype=object) @ Um.T).tolist() == [list(r) for r in red]


def test_discriminant_and_level():
    assert Z4.discriminant() == 16 and Z4.level() == 4
    assert D4.discriminant() == 4 and D4.level() == 2
    assert Z3.discriminant() == 8 and Z3.level() == 4


def test_dual_inverse():
    G = np.array(D4.bgram, dtype=object)
    Gs = np.array(dual(D4), dtype=object)
    assert (G.dot(Gs) == np.eye(4, dtype=int)).all()


def test_partial_duals(config):
    cfg = config(6, 2)
    L = cfg.quaternary[(1, 1)]
    assert rescaled_partial_dual(L, 1) == L
    for s in (2, 3, 6):
        P = rescaled_partial_dual(L, s)
        assert P.is_integral and P.is_even
        assert P.discriminant() == 36 and P.level() == 6
        assert partial_dual(L, s).det() * s ** 4 == P.det()
    assert isometric(rescaled_partial_dual(L, 6), L) is not None


def test_rescale():
    assert rescale(Z4, 3).bgram == tuple(tuple(6 * int(i == j) for j in range(4)) for i in range(4))
    half = rescale(Z4, Fraction(1, 2))
    assert not half.is_even and half.is_integral


def _brute_automorphisms(L):
    """Integer matrices whose columns are images of basis vectors of the right norms."""
    G = np.array(L.matrix(), dtype=np.int64)
    n = L.rank
    vecs = [np.array(v) for v, _ in short_vectors(L, max(G[i, i] // 2 for i in range(n)), both_signs=True)]
    cands = [[v for v in vecs if v @ G @ v == G[i, i]] for i in range(n)]
    count = 0
    for cols in itertools.product(*cands):
        X = np.array(cols).T
        if np.array_equal(X.T @ G @ X, G):
            count += 1
    return count


def test_automorphism_counts():
    assert automorphism_count(Z4) == 384 == _brute_automorphisms(Z4)
    assert automorphism_count(D4) == 1152 == _brute_automorphisms(D4)
    assert automorphism_count(Z3) == 48


def test_isometry_detects_transform():
    rng = np.random.default_rng(11)
    for L in RANDOM[:6]:
        U = np.eye(L.rank, dtype=int)
        for _ in range(5):
            i, j = rng.choice(L.rank, 2, replace=False)
            U[i] += int(rng.integers(-2, 3)) * U[j]
        M = L.transform(U.tolist())
        X = isometric(L, M)
        assert X is not None
        assert isometric(L, rescale(L, 2)) is None
    assert isometric(Z4, D4) is None


def test_invalid_gram():
    with pytest.raises(ValueError):
        GramLattice(((1, 2), (2, 1)))
    with pytest.raises(ValueError):
        GramLattice(((2, 1), (0, 2)))


def test_json_roundtrip():
    assert GramLattice.from_json(D4.to_json()) == D4
    with pytest.raises(ValueError):
        GramLattice.from_json({"rank": 3, "bgram": [[2, 0], [0, 2]]})


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000), st.integers(1, 20))
def test_counts_invariant_under_basis_change(seed, t):
    rng = np.random.default_rng(seed)
    L = RANDOM[seed % len(RANDOM)]
    U = np.eye(L.rank, dtype=int)
    i, j = rng.choice(L.rank, 2, replace=False)
    U[i] += int(rng.integers(-3, 4)) * U[j]
    M = L.transform(U.tolist())
    assert count_unary(L, t) == count_unary(M, t)
    assert count_binary(L, (1, 1, 2)) == count_binary(M, (1, 1, 2))
