"""Bernoulli numbers: exact values, p-adic reductions, power sums, Kummer checks.

Convention: B_1 = -1/2, so that ``x/(e^x - 1) = sum B_j x^j / j!``.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass
from fractions import Fraction
from math import comb
from typing import NamedTuple

from .arith import Modulus, Residue, rational_residue, split_p
from .errors import BadWeight, BoundExceeded, PreconditionViolated, ValuationError

BERNOULLI_BOUND = 64

_table: list[Fraction] = [Fraction(1), Fraction(-1, 2)]
_lock = threading.Lock()


def _bernoulli_unbounded(k: int) -> Fraction:
    if k < 0:
        raise PreconditionViolated("Bernoulli index must be nonnegative")
    if k < len(_table):
        return _table[k]
    with _lock:
        # recurrence: sum_{j=0}^{m} C(m+1, j) B_j = 0
        for m in range(len(_table), k + 1):
            if m % 2 and m > 1:
                _table.append(Fraction(0))
                continue
            s = Fraction(m + 1) * _table[1] + _table[0]
            for j in range(2, m, 2):
                s += comb(m + 1, j) * _table[j]
            _table.append(-s / (m + 1))
    return _table[k]


def bernoulli_exact(k: int, bound: int | None = None) -> Fraction:
    """Exact B_k for ``0 <= k <= bound`` (default :data:`BERNOULLI_BOUND`)."""
    limit = BERNOULLI_BOUND if bound is None else bound
    if k > limit:
        raise BoundExceeded(f"B_{k} exceeds the exact Bernoulli bound {limit}")
    return _bernoulli_unbounded(k)


@dataclass(frozen=True)
class PadicValue:
    """A p-adic number ``u * p**e`` with ``u`` a unit known modulo ``p**a``.

    ``kind == "zero"`` encodes the exact value 0 (``e`` and ``u`` unused).
    """

    kind: str
    e: int = 0
    u: Residue | None = None

    @property
    def is_zero(self) -> bool:
        return self.kind == "zero"

    def to_residue(self, modulus: Modulus | None = None) -> Residue:
        """Reduce to ``modulus`` (default: the precision of ``u``)."""
        if self.is_zero:
            assert modulus is not None or self.u is not None
            return Residue(0, modulus or self.u.modulus)
        assert self.u is not None
        m = modulus or self.u.modulus
        if self.e < 0:
            raise ValuationError(f"value has valuation {self.e} at p={m.p}")
        if m.a > self.u.modulus.a + self.e:
            raise PreconditionViolated("requested precision exceeds the known digits")
        return Residue(self.u.v * m.p**self.e, m)


def padic_from_fraction(x: Fraction, p: int, a: int) -> PadicValue:
    if x == 0:
        return PadicValue("zero")
    vn, un = split_p(x.numerator, p)
    vd, ud = split_p(x.denominator, p)
    return PadicValue("value", vn - vd, rational_residue(Fraction(un, ud), Modulus(p, a)))


def bernoulli_top_mod_p(p: int, w: int) -> Residue:
    """B_{p-w} mod p from the power sum ``sum_{j<p} j^(p-w) = p B_{p-w} (mod p^2)``."""
    if p < 5:
        raise PreconditionViolated("p must be >= 5")
    if w % 2 == 0 or w < 3 or w > p - 2:
        raise BadWeight(f"weight {w} invalid for p={p}")
    k = p - w
    p2 = p * p
    s = sum(pow(j, k, p2) for j in range(1, p))
    assert s % p == 0
    return Residue(s // p, Modulus(p, 1))


def bernoulli_mod_pk(k: int, p: int, a: int) -> PadicValue:
    """B_k as a :class:`PadicValue` with unit part modulo ``p**a``; needs ``k <= 3p``."""
    if k > 3 * p:
        raise PreconditionViolated(f"index {k} exceeds 3p for p={p}")
    return padic_from_fraction(_bernoulli_unbounded(k), p, a)


def bernoulli_residue(k: int, modulus: Modulus) -> Residue:
    """B_k reduced modulo ``modulus``; raises :class:`ValuationError` if not p-integral.

    Uses the O(p) power-sum route when only a residue mod p of B_{p-w} is needed.
    """
    p, a = modulus.p, modulus.a
    if k == 0:
        return Residue(1, modulus)
    if k % 2 and k > 1:
        return Residue(0, modulus)
    if a == 1 and 2 <= k <= p - 3 and k % 2 == 0:
        return bernoulli_top_mod_p(p, p - k)
    if k > 1 and k % (p - 1) == 0:
        raise ValuationError(f"B_{k} is not {p}-integral")
    value = padic_from_fraction(_bernoulli_unbounded(k), p, a)
    return value.to_residue(modulus) if not value.is_zero else Residue(0, modulus)


def power_sum_direct(m: int, n: int, mod: Modulus) -> Residue:
    """``sum_{j=1}^{n-1} j^m`` modulo ``mod``."""
    q = mod.q
    return Residue(sum(pow(j, m, q) for j in range(1, n)), mod)


def power_sum_formula(m: int, n: int, bound: int | None = None) -> Fraction:
    """The Bernoulli-polynomial closed form of ``sum_{j=1}^{n-1} j^m``.

    The closed form itself sums from ``j = 0``; the ``0^m`` term (1 when m = 0)
    is subtracted so both sides agree for every ``m >= 0``.
    """
    total = sum(
        comb(m + 1, k) * bernoulli_exact(k, bound) * Fraction(n) ** (m + 1 - k)
        for k in range(m + 1)
    )
    return total / (m + 1) - (1 if m == 0 else 0)


class KummerResult(NamedTuple):
    holds: bool
    left: Residue
    right: Residue


def kummer_check(p: int, m1: int, m2: int, bound: int | None = None) -> KummerResult:
    """Compare B_{m1}/m1 and B_{m2}/m2 modulo p."""
    for m in (m1, m2):
        if m <= 0 or m % 2 or m % (p - 1) == 0:
            raise PreconditionViolated(f"{m} is not an admissible even index for p={p}")
    if (m1 - m2) % (p - 1):
        raise PreconditionViolated(f"{m1} and {m2} differ modulo p-1={p - 1}")
    mod = Modulus(p, 1)
    left = rational_residue(bernoulli_exact(m1, bound) / m1, mod)
    right = rational_residue(bernoulli_exact(m2, bound) / m2, mod)
    return KummerResult(left == right, left, right)
