"""Composition sums T_n(p, r), R_n^{(m)}(p) and the sigma(p^r) decomposition.

Both composition sums have the shape

    C_n(N) = sum_{i_1 + ... + i_n = N, p does not divide i_j} 1 / (i_1 ... i_n)

with ``N = p^r`` (T_n) or ``N = m p`` (R_n^{(m)}).  Each has a naive
enumerator (the oracle) and a convolution DP over exact partial sums.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from operator import mul

from .arith import Modulus, Residue, batch_inverse, split_p
from .errors import BudgetExceeded, PreconditionViolated, ValuationError
from .mhs import ConstraintSet, constrained_mhs

ENUMERATION_BUDGET = 10**7

try:
    import numpy as np
except ImportError:  # pragma: no cover
    np = None


def _coprime_inverses(N: int, p: int, q: int) -> list[int]:
    """``g[s] = s^{-1} mod q`` for ``0 < s < N`` coprime to p, else 0; length N + 1."""
    g = [0] * (N + 1)
    units = [s for s in range(1, N) if s % p]
    for s, inv in zip(units, batch_inverse(units, q)):
        g[s] = inv
    return g


def _convolve(f: list[int], g: list[int], N: int, q: int) -> list[int]:
    """``h[t] = sum_{0<s<t} f[s] g[t-s] mod q`` for ``t <= N``."""
    if np is not None and N * (q - 1) ** 2 < 2**62:
        h = np.convolve(np.asarray(f, dtype=np.int64), np.asarray(g, dtype=np.int64))
        return [int(x) for x in h[: N + 1] % q]
    h = [0] * (N + 1)
    first = next((s for s, x in enumerate(f) if x), N + 1)
    for t in range(first + 1, N + 1):
        h[t] = sum(map(mul, f[1:t], g[t - 1 : 0 : -1])) % q
    return h


def composition_sum_fast(n: int, N: int, p: int, mod: Modulus) -> Residue:
    """C_n(N) mod p^a by the layered convolution DP.

    ``f_1(s) = 1/s`` on coprime ``s`` and ``f_{j+1} = f_j * f_1``; only the last
    layer is evaluated at the single point ``N``.
    """
    if n < 1:
        raise PreconditionViolated("need at least one part")
    q = mod.q
    g = _coprime_inverses(N, p, q)
    if n == 1:
        return Residue(pow(N, -1, q) if N % p else 0, mod)
    f = g
    for _ in range(n - 2):
        f = _convolve(f, g, N, q)
    return Residue(sum(map(mul, f[1:N], g[N - 1 : 0 : -1])), mod)


def composition_sum_naive(
    n: int, N: int, p: int, mod: Modulus, budget: int | None = None
) -> Residue:
    """C_n(N) mod p^a by enumerating every ordered composition."""
    if n < 1:
        raise PreconditionViolated("need at least one part")
    budget = ENUMERATION_BUDGET if budget is None else budget
    count = comb(N - 1, n - 1)
    if count > budget:
        raise BudgetExceeded(
            f"{count} compositions exceed the budget {budget}; use the fast evaluator"
        )
    q = mod.q
    inv = [0] + [pow(i, -1, q) if i % p else 0 for i in range(1, N + 1)]
    if n == 1:
        return Residue(inv[N], mod)

    def walk(parts_left: int, rem: int, acc: int) -> int:
        if parts_left == 2:
            # the final two parts (i, rem - i) for every split of rem
            return acc * sum(map(mul, inv[1:rem], inv[rem - 1 : 0 : -1])) % q
        total = 0
        for i in range(1, rem - parts_left + 2):
            if inv[i]:
                total += walk(parts_left - 1, rem - i, acc * inv[i] % q)
        return total % q

    return Residue(walk(n, N, 1), mod)


def _check_tn(n: int, p: int, r: int, mod: Modulus) -> None:
    if n < 2 or r < 1:
        raise PreconditionViolated("need n >= 2 and r >= 1")
    if p <= n:
        raise PreconditionViolated(f"need p > n (p={p}, n={n})")
    if mod.p != p:
        raise PreconditionViolated("modulus prime differs from p")


def t_n_naive(n: int, p: int, r: int, mod: Modulus, budget: int | None = None) -> Residue:
    _check_tn(n, p, r, mod)
    return composition_sum_naive(n, p**r, p, mod, budget)


def t_n_fast(n: int, p: int, r: int, mod: Modulus) -> Residue:
    _check_tn(n, p, r, mod)
    return composition_sum_fast(n, p**r, p, mod)


def _check_rnm(n: int, m: int, p: int, mod: Modulus) -> None:
    if not n > m >= 1:
        raise PreconditionViolated(f"need n > m >= 1 (n={n}, m={m})")
    if p <= n:
        raise PreconditionViolated(f"need p > n (p={p}, n={n})")
    if mod.p != p:
        raise PreconditionViolated("modulus prime differs from p")


def r_nm_naive(n: int, m: int, p: int, mod: Modulus, budget: int | None = None) -> Residue:
    _check_rnm(n, m, p, mod)
    return composition_sum_naive(n, m * p, p, mod, budget)


def r_nm_fast(n: int, m: int, p: int, mod: Modulus) -> Residue:
    _check_rnm(n, m, p, mod)
    return composition_sum_fast(n, m * p, p, mod)


@dataclass(frozen=True)
class SigmaParts:
    sigma: Residue
    s_I: Residue
    s_II: Residue
    s_III: Residue


def sigma_direct(p: int, r: int, mod: Modulus) -> Residue:
    """sigma(p^r) summed directly over its defining range.

    Terms with ``p | u_2`` have p in the denominator, so the sum is taken at
    precision ``p^(a + r - 1)`` after scaling by ``p^(r - 1)``.
    """
    N = p**r
    E = r - 1
    Q = p ** (mod.a + E)
    units, vals = [1] * N, [0] * N
    for u in range(1, N):
        vals[u], units[u] = split_p(u, p)
    inv = [0] + batch_inverse(units[1:], Q)
    w2 = [0] + [inv[u] * p ** (E - vals[u]) % Q for u in range(1, N)]
    w13 = [inv[u] if u % p else 0 for u in range(N)]
    # suffix sums over coprime u3, in total and per residue class
    suf = [0] * (N + 1)
    suf_cls = [0] * (N + p)
    for u in range(N - 1, 0, -1):
        suf[u] = suf[u + 1] + w13[u]
        suf_cls[u] = suf_cls[u + p] + w13[u]
    total = 0
    for u1 in range(1, N - 2):
        a1 = w13[u1]
        if not a1:
            continue
        c1 = u1 % p
        inner = 0
        for u2 in range(u1 + 1, N - 1):
            if u2 % p == c1:
                continue
            lo = u2 + 1
            tail = suf[lo]
            c2 = u2 % p
            if c2:
                t = lo + (c2 - lo) % p
                if t < N:
                    tail -= suf_cls[t]
            inner += w2[u2] * tail
        total += a1 * inner
    total %= Q
    scale = p**E
    if total % scale:
        raise ValuationError("sigma is not p-integral")
    return Residue(total // scale, mod)


def sigma_parts(p: int, r: int, mod: Modulus) -> SigmaParts:
    """sigma(p^r) and its inclusion-exclusion pieces.

    ``s_I`` ranges over ``u_1, u_3`` coprime; ``s_II`` adds the constraints
    ``u_1 == u_2`` and ``u_2 == u_3``; ``s_III`` has all three congruent.
    """
    if p < 5 or r < 2:
        raise PreconditionViolated("need p >= 5 and r >= 2")
    N = p**r
    one = (1, 1, 1)
    s_I = constrained_mhs(N, one, ConstraintSet.of(3, coprime=(1, 3)), p, mod)
    h12 = constrained_mhs(N, one, ConstraintSet.of(3, (1, 3), [(1, 2)]), p, mod)
    h23 = constrained_mhs(N, one, ConstraintSet.of(3, (1, 3), [(2, 3)]), p, mod)
    s_III = constrained_mhs(N, one, ConstraintSet.of(3, (1,), [(1, 2), (2, 3)]), p, mod)
    return SigmaParts(sigma_direct(p, r, mod), s_I, h12 + h23, s_III)


def t4_via_sigma(p: int, r: int, mod: Modulus) -> Residue:
    """T_4(p, r) as ``24 sigma(p^r) / p^r``, with sigma evaluated modulo p^(a + r)."""
    lifted = Modulus(p, mod.a + r)
    s = sigma_direct(p, r, lifted).v * 24
    if s % p**r:
        raise ValuationError("24 sigma is not divisible by p^r")
    return Residue(s // p**r, mod)
