from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from sympy import legendre_symbol, primerange

from quatlat.quaternion import (
    AlgebraParams,
    AlgebraSearchError,
    bilinear,
    conjugate,
    find_algebra,
    hilbert_symbol,
    inverse,
    norm,
    ramified_primes,
    trace,
)

H = AlgebraParams(-1, -1, frozenset({2}))
B11 = AlgebraParams(-1, -11, frozenset({11}))


def test_basis_products():
    one, i, j, k = H.basis()
    assert i * j == k
    assert j * i == -k
    assert i * i == -1 and j * j == -1 and k * k == -1
    assert (one + i) * (one - i) == 2


def test_product_with_general_a():
    A = AlgebraParams(-2, -5, frozenset({5}))
    one, i, j, k = A.basis()
    assert i * i == -2 and j * j == -5 and k * k == -10
    assert (one + i) * (one - i) == 1 - (-2)


def test_norm_and_trace():
    q = H(1, 1, 1, 1)
    assert norm(q) == 4 and trace(q) == 2
    assert norm(H(1)) == 1 and trace(H(1)) == 2
    j = B11(0, 0, 1, 0)
    assert norm(j) == 11 and trace(j) == 0


def test_bilinear_small():
    one, i, j, _ = H.basis()
    assert bilinear(one, one) == 2
    assert bilinear(i, j) == 0


coords = st.tuples(*[st.fractions(min_value=-20, max_value=20, max_denominator=6)] * 4)
algebras = st.sampled_from([H, B11, AlgebraParams(-1, -3, frozenset({3})), AlgebraParams(-2, -5, frozenset({5}))])


@settings(max_examples=100, deadline=None)
@given(algebras, coords)
def test_bilinear_is_twice_norm(A, x):
    q = A(*x)
    assert bilinear(q, q) == 2 * norm(q)


@settings(max_examples=60, deadline=None)
@given(algebras, coords, coords, coords)
def test_ring_laws(A, x, y, z):
    p, q, r = A(*x), A(*y), A(*z)
    assert (p * q) * r == p * (q * r)
    assert p * (q + r) == p * q + p * r
    assert norm(p * q) == norm(p) * norm(q)
    assert conjugate(p * q) == conjugate(q) * conjugate(p)
    assert p * conjugate(p) == norm(p)
    if norm(p) != 0:
        assert p * inverse(p) == 1


def test_definite_norm_positive():
    assert all(norm(H(*v)) > 0 for v in [(1, 0, 0, 0), (0, 3, -1, 2), (Fraction(1, 2),) * 4])


def _hilbert_oracle(a, b, p):
    """Closed formula for the Hilbert symbol (independent of the solubility search)."""
    def split(n):
        v = 0
        while n % p == 0:
            n //= p
            v += 1
        return v, n
    al, u = split(a)
    be, v = split(b)
    if p == 2:
        eps = lambda x: ((x - 1) // 2) % 2
        om = lambda x: ((x * x - 1) // 8) % 2
        e = (eps(u) * eps(v) + al * om(v) + be * om(u)) % 2
        return -1 if e else 1
    sign = -1 if (al * be * ((p - 1) // 2)) % 2 else 1
    return sign * legendre_symbol(u % p, p) ** be * legendre_symbol(v % p, p) ** al


def test_hilbert_symbol_examples():
    assert hilbert_symbol(-1, -1, 2) == -1
    assert hilbert_symbol(-1, -1, "infinity") == -1
    assert hilbert_symbol(-1, -11, 11) == -1
    assert hilbert_symbol(3, 5, "infinity") == 1


@pytest.mark.parametrize("p", [2, 3, 5, 7, 11, 13])
def test_hilbert_symbol_matches_formula(p):
    vals = [n for n in range(-40, 41) if n]
    for a in vals[::3]:
        for b in vals[::2]:
            assert hilbert_symbol(a, b, p) == _hilbert_oracle(a, b, p), (a, b, p)


def test_hilbert_product_formula():
    for a in range(-15, 16):
        for b in range(-15, 16):
            if a and b:
                prod = hilbert_symbol(a, b, "infinity")
                for p in primerange(2, 32):
                    prod *= hilbert_symbol(a, b, p)
                assert prod == 1


@pytest.mark.parametrize("N1, expected", [(2, (-1, -1)), (3, (-1, -3)), (5, (-2, -5)), (7, (-1, -7)),
                                          (11, (-1, -11)), (13, (-2, -13))])
def test_find_algebra(N1, expected):
    A = find_algebra(N1)
    assert (A.a, A.b) == expected
    assert ramified_primes(A.a, A.b) == A.ramified_finite
    assert A.discriminant == N1


def test_find_algebra_rejects():
    with pytest.raises(ValueError):
        find_algebra(6)
    with pytest.raises(ValueError):
        find_algebra(4)
    with pytest.raises(AlgebraSearchError):
        find_algebra(13, window=2)


def test_algebra_params_validation():
    with pytest.raises(ValueError):
        AlgebraParams(1, -1, frozenset({2}))
    with pytest.raises(ValueError):
        AlgebraParams(-1, -1, frozenset())
