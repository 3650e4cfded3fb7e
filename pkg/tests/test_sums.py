from fractions import Fraction
from math import factorial

import pytest

from mhscong.arith import Modulus, Residue
from mhscong.bernoulli import bernoulli_exact
from mhscong.errors import BudgetExceeded, PreconditionViolated
from mhscong.sums import (
    r_nm_fast,
    r_nm_naive,
    sigma_direct,
    sigma_parts,
    t4_via_sigma,
    t_n_fast,
    t_n_naive,
)

from conftest import brute_compositions, frac_mod


def test_t_n_examples():
    assert t_n_naive(2, 5, 1, Modulus(5, 2)).v == 5
    assert t_n_naive(3, 5, 1, Modulus(5, 1)).v == 3
    assert t_n_naive(4, 7, 2, Modulus(7, 3)).v == 98
    assert t_n_fast(4, 7, 2, Modulus(7, 3)).v == 98


def test_t_n_matches_exact_fractions():
    for n, p, r in [(2, 5, 1), (3, 5, 1), (2, 7, 2), (3, 7, 1), (4, 5, 2)]:
        exact = brute_compositions(n, p**r, p)
        assert t_n_fast(n, p, r, Modulus(p, 3)).v == frac_mod(exact, p**3)


def test_t_n_preconditions():
    with pytest.raises(PreconditionViolated):
        t_n_fast(5, 5, 1, Modulus(5, 1))
    with pytest.raises(BudgetExceeded):
        t_n_naive(4, 11, 2, Modulus(11, 1), budget=1000)


def test_t6_at_seven_squared():
    mod = Modulus(7, 3)
    fast = t_n_fast(6, 7, 2, mod)
    assert fast == t_n_naive(6, 7, 2, mod)
    assert fast.v == 126


def test_r_nm_examples():
    assert r_nm_naive(3, 1, 5, Modulus(5, 1)).v == 3
    assert r_nm_naive(4, 1, 7, Modulus(7, 2)).v == 28
    # two parts of p: sum 1/(i(p-i)) = (2/p) H_{p-1}
    for p in (5, 7, 11, 13):
        direct = sum(Fraction(1, i * (p - i)) for i in range(1, p))
        assert r_nm_naive(2, 1, p, Modulus(p, 1)).v == frac_mod(direct, p)
    with pytest.raises(PreconditionViolated):
        r_nm_fast(3, 3, 5, Modulus(5, 1))


def test_r_nm_matches_exact_fractions():
    for n, m, p in [(3, 2, 5), (4, 3, 5), (5, 2, 7)]:
        exact = brute_compositions(n, m * p, p)
        assert r_nm_fast(n, m, p, Modulus(p, 2)).v == frac_mod(exact, p * p)


def test_oracle_equivalence_t_n():
    for n in (2, 3, 4):
        for p in (5, 7, 11):
            for r in (1, 2):
                mod = Modulus(p, r + 2)
                assert t_n_fast(n, p, r, mod) == t_n_naive(n, p, r, mod), (n, p, r)


def test_oracle_equivalence_r_nm():
    for n in range(2, 7):
        for m in range(1, n):
            for p in (7, 11, 13):
                if p <= n:
                    continue
                mod = Modulus(p, 2)
                assert r_nm_fast(n, m, p, mod) == r_nm_naive(n, m, p, mod), (n, m, p)


def test_multiset_counting_agrees_with_enumeration():
    from collections import Counter
    from itertools import combinations_with_replacement

    for n in (2, 3, 4):
        for p in (5, 7, 11):
            if p <= n:
                continue
            total = Fraction(0)
            for parts in combinations_with_replacement(range(1, p), n):
                if sum(parts) != p:
                    continue
                mult = factorial(n)
                for c in Counter(parts).values():
                    mult //= factorial(c)
                prod = 1
                for x in parts:
                    prod *= x
                total += Fraction(mult, prod)
            assert total == brute_compositions(n, p, p)
            assert r_nm_fast(n, 1, p, Modulus(p, 2)).v == frac_mod(total, p * p)


def test_sigma_decomposition_and_reduction():
    for p in (5, 7, 11):
        r = 2
        mod = Modulus(p, 2 * r + 1)
        parts = sigma_parts(p, r, mod)
        assert parts.sigma == parts.s_I - parts.s_II + parts.s_III
        # 24 sigma = p^r T_4 in lifted arithmetic
        lifted = Modulus(p, 3 * r + 1)
        lhs = sigma_direct(p, r, lifted) * 24
        rhs = t_n_fast(4, p, r, Modulus(p, 2 * r + 1)).v * p**r
        assert lhs.v == rhs % lifted.q
        if p > 5:
            assert t4_via_sigma(p, r, Modulus(p, r + 1)) == t_n_naive(4, p, r, Modulus(p, r + 1))


def test_sigma_value_at_seven_squared():
    mod = Modulus(7, 5)
    expected = frac_mod(Fraction(-1, 5) * bernoulli_exact(2) * 7**4, 7**5)
    assert sigma_direct(7, 2, mod).v == expected


def test_projection_consistency():
    for n, p, r in [(2, 7, 2), (4, 7, 2), (3, 11, 1)]:
        hi = t_n_fast(n, p, r, Modulus(p, 4))
        for a in (1, 2, 3):
            assert hi.reduce(a) == t_n_fast(n, p, r, Modulus(p, a))
