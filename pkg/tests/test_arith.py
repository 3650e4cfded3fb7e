from fractions import Fraction
from math import comb

import pytest
from hypothesis import given, strategies as st

from mhscong.arith import (
    Modulus,
    Residue,
    batch_inverse,
    binomial_lucas,
    crt_combine,
    inverse,
    is_prime,
    mod_pow,
    p_valuation,
    rational_residue,
    sieve_primes,
    split_p,
)
from mhscong.errors import ModuliNotCoprime, ModulusMismatch, NonInvertible, PreconditionViolated


def test_sieve_examples():
    assert sieve_primes(10) == [2, 3, 5, 7]
    assert sieve_primes(2) == [2]
    assert sieve_primes(30) == [2, 3, 5, 7, 11, 13, 17, 19, 23, 29]


def test_is_prime_agrees_with_sieve():
    table = set(sieve_primes(5000))
    assert all(is_prime(n) == (n in table) for n in range(-3, 5000))
    assert is_prime(2**61 - 1)
    assert not is_prime(3215031751)  # strong pseudoprime to bases 2, 3, 5, 7


def test_modulus_rejects_bad_input():
    with pytest.raises(PreconditionViolated):
        Modulus(6, 1)
    with pytest.raises(PreconditionViolated):
        Modulus(5, 0)
    assert Modulus(7, 3).q == 343


def test_residue_canonical_and_ring_ops():
    m = Modulus(5, 2)
    x = Residue(-1, m)
    assert x.v == 24
    assert (x + 3).v == 2
    assert (x * x).v == 1
    assert (-x).v == 1
    with pytest.raises(ModulusMismatch):
        _ = x + Residue(1, Modulus(5, 3))


def test_mod_pow_examples():
    # residues live modulo prime powers, so 2^10 mod 1000 is assembled from 8 and 125
    parts = [mod_pow(Residue(2, Modulus(2, 3)), 10), mod_pow(Residue(2, Modulus(5, 3)), 10)]
    assert crt_combine(parts) == (24, 1000)
    assert mod_pow(Residue(3, Modulus(5, 2)), 0).v == 1
    assert mod_pow(Residue(5, Modulus(7, 1)), 6).v == 1


def test_inverse_examples():
    assert inverse(Residue(6, Modulus(5, 2))).v == 21
    with pytest.raises(NonInvertible):
        inverse(Residue(5, Modulus(5, 2)))


def test_rational_residue_examples():
    assert rational_residue(Fraction(-1, 3), Modulus(5, 1)).v == 3
    with pytest.raises(NonInvertible):
        rational_residue(Fraction(1, 5), Modulus(5, 2))


def test_crt_examples():
    assert crt_combine([Residue(2, Modulus(3, 1)), Residue(3, Modulus(5, 2))]) == (53, 75)
    parts = [Residue(-2, Modulus(p, 1)) for p in (5, 7, 11)]
    assert crt_combine(parts) == (383, 385)
    assert crt_combine([]) == (0, 1)
    with pytest.raises(ModuliNotCoprime):
        crt_combine([(1, 4), (1, 6)])


def test_lucas_examples_and_grid():
    assert binomial_lucas(10, 2, 7).v == 3
    assert binomial_lucas(3, 5, 7).v == 0
    for p in (2, 3, 5, 7):
        for n in range(201):
            for k in range(n + 1):
                assert binomial_lucas(n, k, p).v == comb(n, k) % p


def test_valuation_helpers():
    assert p_valuation(250, 5) == 3
    assert split_p(250, 5) == (3, 2)


@given(st.lists(st.integers(1, 10**6), min_size=1, max_size=40))
def test_batch_inverse_matches_pow(values):
    q = 7**5
    values = [v for v in values if v % 7] or [1]
    assert batch_inverse(values, q) == [pow(v, -1, q) for v in values]


@given(st.integers(), st.sampled_from([(5, 1), (5, 3), (7, 2), (101, 1)]))
def test_inverse_round_trip(n, pa):
    m = Modulus(*pa)
    x = Residue(n, m)
    if n % m.p == 0:
        with pytest.raises(NonInvertible):
            inverse(x)
    else:
        assert (x * inverse(x)).v == 1


@given(
    st.permutations([(3, 1), (5, 2), (7, 1), (11, 2), (13, 1)]),
    st.lists(st.integers(), min_size=5, max_size=5),
)
def test_crt_permutation_invariant(mods, values):
    parts = [Residue(v, Modulus(p, a)) for v, (p, a) in zip(values, mods)]
    V, M = crt_combine(parts)
    assert 0 <= V < M
    assert all(V % r.q == r.v for r in parts)
    assert crt_combine(reversed(parts)) == (V, M)
