"""Exact modular arithmetic over prime-power moduli.

Everything here works on Python integers; there is no floating point.
Rationals are plain :class:`fractions.Fraction` values, which already keep
``gcd(num, den) == 1`` and ``den > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import reduce
from math import comb, gcd, isqrt
from typing import Iterable, Sequence

from .errors import ModuliNotCoprime, ModulusMismatch, NonInvertible, PreconditionViolated

Rational = Fraction

# Deterministic Miller-Rabin witnesses, valid for every n < 3.3 * 10**24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41)


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    for w in _MR_WITNESSES:
        if n % w == 0:
            return n == w
    d, s = n - 1, 0
    while not d & 1:
        d >>= 1
        s += 1
    for w in _MR_WITNESSES:
        x = pow(w, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def sieve_primes(limit: int) -> list[int]:
    """All primes ``<= limit`` in ascending order (empty for ``limit < 2``)."""
    if limit < 2:
        return []
    flags = bytearray([1]) * (limit + 1)
    flags[0] = flags[1] = 0
    for i in range(2, isqrt(limit) + 1):
        if flags[i]:
            flags[i * i :: i] = bytes(len(range(i * i, limit + 1, i)))
    return [i for i, f in enumerate(flags) if f]


def primes_between(lo: int, hi: int) -> list[int]:
    return [p for p in sieve_primes(hi) if p >= lo]


def first_primes(count: int, start: int = 2) -> list[int]:
    """The first ``count`` primes that are ``>= start``."""
    out: list[int] = []
    n = max(start, 2)
    while len(out) < count:
        if is_prime(n):
            out.append(n)
        n += 1
    return out


def p_valuation(n: int, p: int) -> int:
    """v_p(n) for a nonzero integer ``n``."""
    if n == 0:
        raise ValueError("valuation of 0 is infinite")
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def split_p(n: int, p: int) -> tuple[int, int]:
    """Write nonzero ``n = p**v * u`` with ``p`` not dividing ``u``; return ``(v, u)``."""
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v, n


@dataclass(frozen=True)
class Modulus:
    """The modulus ``p**a`` for a prime ``p`` and exponent ``a >= 1``."""

    p: int
    a: int
    q: int = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        if self.a < 1:
            raise PreconditionViolated(f"exponent must be >= 1, got {self.a}")
        if not is_prime(self.p):
            raise PreconditionViolated(f"{self.p} is not prime")
        object.__setattr__(self, "q", self.p**self.a)

    def __call__(self, value: int | Fraction) -> Residue:
        if isinstance(value, Fraction):
            return rational_residue(value, self)
        return Residue(value, self)

    def lower(self, a: int) -> Modulus:
        return Modulus(self.p, a)

    def __str__(self) -> str:
        return f"{self.p}^{self.a}"


@dataclass(frozen=True)
class Residue:
    """An integer class modulo ``modulus.q``, stored in ``[0, q)``."""

    v: int
    modulus: Modulus

    def __post_init__(self) -> None:
        object.__setattr__(self, "v", self.v % self.modulus.q)

    @property
    def q(self) -> int:
        return self.modulus.q

    def _other(self, other: object) -> int:
        if isinstance(other, Residue):
            if other.modulus != self.modulus:
                raise ModulusMismatch(f"{self.modulus} vs {other.modulus}")
            return other.v
        if isinstance(other, int):
            return other
        if isinstance(other, Fraction):
            return rational_residue(other, self.modulus).v
        return NotImplemented  # type: ignore[return-value]

    def __add__(self, other: object) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue(self.v + o, self.modulus)

    __radd__ = __add__

    def __sub__(self, other: object) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue(self.v - o, self.modulus)

    def __rsub__(self, other: object) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue(o - self.v, self.modulus)

    def __mul__(self, other: object) -> Residue:
        o = self._other(other)
        if o is NotImplemented:
            return NotImplemented
        return Residue(self.v * o, self.modulus)

    __rmul__ = __mul__

    def __neg__(self) -> Residue:
        return Residue(-self.v, self.modulus)

    def __pow__(self, exp: int) -> Residue:
        if exp < 0:
            return inverse(self) ** (-exp)
        return mod_pow(self, exp)

    def __eq__(self, other: object) -> bool:
        if isinstance(other, Residue):
            return self.modulus == other.modulus and self.v == other.v
        if isinstance(other, int):
            return (other - self.v) % self.q == 0
        return NotImplemented

    def __hash__(self) -> int:
        return hash((self.v, self.modulus))

    def __int__(self) -> int:
        return self.v

    def reduce(self, a: int) -> Residue:
        """Project to ``p**a`` for ``a <= self.modulus.a``."""
        if a > self.modulus.a:
            raise PreconditionViolated("cannot lift a residue to a finer modulus")
        return Residue(self.v, self.modulus.lower(a))

    def __str__(self) -> str:
        return f"{self.v} mod {self.modulus}"


def mod_pow(base: Residue, exp: int) -> Residue:
    if exp < 0:
        raise PreconditionViolated("exponent must be nonnegative")
    return Residue(pow(base.v, exp, base.q), base.modulus)


def _inv_int(x: int, q: int) -> int:
    try:
        return pow(x, -1, q)
    except ValueError:
        raise NonInvertible(f"{x} is not invertible modulo {q}") from None


def inverse(x: Residue) -> Residue:
    return Residue(_inv_int(x.v, x.q), x.modulus)


def rational_residue(x: Fraction, m: Modulus) -> Residue:
    x = Fraction(x)
    if x.denominator % m.p == 0:
        raise NonInvertible(f"denominator of {x} is divisible by {m.p}")
    return Residue(x.numerator * _inv_int(x.denominator, m.q), m)


def rational_mod(x: Fraction, q: int) -> int:
    """``x`` reduced modulo an arbitrary integer ``q`` (denominator must be a unit)."""
    x = Fraction(x)
    return x.numerator * _inv_int(x.denominator, q) % q


def batch_inverse(values: Sequence[int], q: int) -> list[int]:
    """Inverses of ``values`` modulo ``q`` with a single modular inversion.

    Montgomery's trick: prefix products, one inversion, then a backward sweep.
    Every value must be a unit modulo ``q``.
    """
    n = len(values)
    if n == 0:
        return []
    prefix = [0] * n
    acc = 1
    for i, v in enumerate(values):
        acc = acc * v % q
        prefix[i] = acc
    inv = _inv_int(acc, q)
    out = [0] * n
    for i in range(n - 1, 0, -1):
        out[i] = inv * prefix[i - 1] % q
        inv = inv * values[i] % q
    out[0] = inv
    return out


def crt_pair(v1: int, m1: int, v2: int, m2: int) -> tuple[int, int]:
    if gcd(m1, m2) != 1:
        raise ModuliNotCoprime(f"{m1} and {m2} share a factor")
    t = (v2 - v1) * pow(m1, -1, m2) % m2
    m = m1 * m2
    return (v1 + m1 * t) % m, m


def crt_combine(parts: Iterable[Residue | tuple[int, int]]) -> tuple[int, int]:
    """Combine residues with pairwise coprime moduli into ``(V, M)``, ``0 <= V < M``.

    Parts may be :class:`Residue` values or plain ``(value, modulus)`` pairs.
    """
    pairs = [(r.v, r.q) if isinstance(r, Residue) else (r[0] % r[1], r[1]) for r in parts]
    if not pairs:
        return 0, 1
    # balanced merge keeps the operands small
    while len(pairs) > 1:
        merged = [crt_pair(*pairs[i], *pairs[i + 1]) for i in range(0, len(pairs) - 1, 2)]
        if len(pairs) % 2:
            merged.append(pairs[-1])
        pairs = merged
    return pairs[0]


def binomial_lucas(n: int, k: int, p: int) -> Residue:
    """C(n, k) mod p as a product of binomials of base-p digits."""
    m = Modulus(p, 1)
    if k < 0 or k > n:
        return Residue(0, m)
    acc = 1
    while n or k:
        n, nd = divmod(n, p)
        k, kd = divmod(k, p)
        if kd > nd:
            return Residue(0, m)
        acc = acc * comb(nd, kd) % p
    return Residue(acc, m)


def product_mod(values: Iterable[int], q: int) -> int:
    return reduce(lambda a, b: a * b % q, values, 1)
