"""Multiple harmonic sums with coprimality and congruence constraints.

An :class:`Index` ``(s_1, ..., s_d)`` is stored in *ascending* order: ``s_i`` is
the exponent of the i-th smallest summation variable, so

    constrained_mhs(N, (s_1, ..., s_d), cs) = sum_{0<u_1<...<u_d<N, cs} prod u_i^{-s_i}.

Printed literature usually lists the arguments the other way round
(largest variable first); use :meth:`Index.from_display` to translate.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Iterator, Mapping, Union

from .arith import Modulus, Residue, batch_inverse, split_p
from .errors import InconsistentConstraints, PreconditionViolated, ValuationError


@dataclass(frozen=True, order=True)
class Index:
    parts: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        object.__setattr__(self, "parts", tuple(int(s) for s in self.parts))
        if any(s < 1 for s in self.parts):
            raise PreconditionViolated(f"index parts must be positive: {self.parts}")

    @classmethod
    def from_display(cls, *display: int) -> Index:
        """Build from the conventional largest-variable-first argument order."""
        return cls(tuple(reversed(display)))

    @property
    def depth(self) -> int:
        return len(self.parts)

    @property
    def weight(self) -> int:
        return sum(self.parts)

    def __iter__(self) -> Iterator[int]:
        return iter(self.parts)

    def __len__(self) -> int:
        return len(self.parts)

    def __str__(self) -> str:
        return "(" + ",".join(map(str, self.parts)) + ")"


IndexLike = Union[Index, Iterable[int]]


def as_index(idx: IndexLike) -> Index:
    return idx if isinstance(idx, Index) else Index(tuple(idx))


@dataclass(frozen=True)
class ConstraintSet:
    """Per-position coprimality flags plus congruences between positions.

    ``congruences`` holds 1-based pairs ``(i, j)``: ``u_i == u_j (mod p)``, and
    ``(i, 0)`` means ``u_i == 0 (mod p)``.  Congruence is closed transitively,
    so a position linked to a coprime position is itself coprime; a chain that
    forces both "coprime" and "divisible by p" is rejected here.
    """

    coprime: tuple[bool, ...]
    congruences: frozenset[tuple[int, int]] = frozenset()
    _groups: tuple[int, ...] = field(init=False, repr=False, compare=False)
    _kinds: tuple[str, ...] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        d = len(self.coprime)
        object.__setattr__(self, "coprime", tuple(bool(c) for c in self.coprime))
        object.__setattr__(self, "congruences", frozenset(self.congruences))
        parent = list(range(d + 1))  # node 0 is the class of multiples of p

        def find(x: int) -> int:
            while parent[x] != x:
                parent[x] = parent[parent[x]]
                x = parent[x]
            return x

        for i, j in self.congruences:
            if not (1 <= i <= d and 0 <= j <= d) or i == j:
                raise InconsistentConstraints(f"bad congruence pair {(i, j)} for depth {d}")
            parent[find(i)] = find(j)
        zero_root = find(0)
        coprime_roots = {find(i + 1) for i in range(d) if self.coprime[i]}
        if zero_root in coprime_roots:
            raise InconsistentConstraints("a position is both coprime to p and divisible by p")
        groups = tuple(find(i + 1) for i in range(d))
        kinds = tuple(
            "zero" if g == zero_root else "coprime" if g in coprime_roots else "free"
            for g in groups
        )
        object.__setattr__(self, "_groups", groups)
        object.__setattr__(self, "_kinds", kinds)

    @property
    def depth(self) -> int:
        return len(self.coprime)

    @classmethod
    def all_coprime(cls, d: int) -> ConstraintSet:
        return cls((True,) * d)

    @classmethod
    def unrestricted(cls, d: int) -> ConstraintSet:
        return cls((False,) * d)

    @classmethod
    def of(
        cls,
        d: int,
        coprime: Iterable[int] = (),
        congruent: Iterable[tuple[int, int]] = (),
    ) -> ConstraintSet:
        """``coprime`` lists 1-based positions, ``congruent`` 1-based pairs."""
        flags = [False] * d
        for i in coprime:
            flags[i - 1] = True
        return cls(tuple(flags), frozenset(congruent))

    def kind(self, i: int) -> str:
        """``"coprime"``, ``"zero"`` or ``"free"`` for 0-based position ``i``."""
        return self._kinds[i]

    def anchor(self, i: int) -> int | None:
        """Earliest 0-based position before ``i`` that must be congruent to it."""
        g = self._groups[i]
        for j in range(i):
            if self._groups[j] == g:
                return j
        return None


def _max_valuation(n: int, p: int) -> int:
    """Largest ``e`` with ``p**e <= n``."""
    e = 0
    while p ** (e + 1) <= n:
        e += 1
    return e


def constrained_mhs(
    N: int,
    idx: IndexLike,
    cs: ConstraintSet | None,
    p: int,
    mod: Modulus,
) -> Residue:
    """Constrained multiple harmonic sum modulo ``mod``.

    Positions that are not forced coprime to ``p`` may contribute terms with
    ``p`` in the denominator.  The sum is then computed at a lifted precision
    ``p**(a + E)`` after scaling by ``p**E`` and divided back exactly;
    :class:`ValuationError` is raised if the total is not p-integral.
    """
    idx = as_index(idx)
    d = idx.depth
    if cs is None:
        cs = ConstraintSet.all_coprime(d)
    if cs.depth != d:
        raise PreconditionViolated("constraint set depth differs from index depth")
    if mod.p != p:
        raise PreconditionViolated("modulus prime differs from p")
    if d == 0:
        return Residue(1, mod)
    if N <= d:
        return Residue(0, mod)

    vmax = _max_valuation(N - 1, p)
    lifts = [0 if cs.kind(i) == "coprime" else s * vmax for i, s in enumerate(idx.parts)]
    E = sum(lifts)
    Q = p ** (mod.a + E)

    units = [1] * N
    vals = [0] * N
    for u in range(1, N):
        vals[u], units[u] = split_p(u, p)
    inv_units = [0] + batch_inverse(units[1:], Q)

    weights = [_weight_row(N, p, s, cs.kind(i), lifts[i], Q, vals, inv_units)
               for i, s in enumerate(idx.parts)]
    anchors = [cs.anchor(i) for i in range(d)]

    last = weights[-1]
    suffix_all = [0] * (N + 1)
    suffix_cls = [0] * (N + p)
    for u in range(N - 1, 0, -1):
        suffix_all[u] = (suffix_all[u + 1] + last[u]) % Q
        suffix_cls[u] = (suffix_cls[u + p] + last[u]) % Q

    def tail(lo: int, cls: int | None) -> int:
        if cls is None:
            return suffix_all[lo] if lo < N else 0
        t = lo + (cls - lo) % p
        return suffix_cls[t] if t < N else 0

    chosen = [0] * d

    def rec(k: int, lo: int, acc: int) -> int:
        a = anchors[k]
        if k == d - 1:
            return acc * tail(lo, None if a is None else chosen[a] % p) % Q
        row = weights[k]
        hi = N - (d - 1 - k)
        if a is None:
            us = range(lo, hi)
        else:
            us = range(lo + (chosen[a] - lo) % p, hi, p)
        total = 0
        for u in us:
            w = row[u]
            if w:
                chosen[k] = u
                total += rec(k + 1, u + 1, acc * w % Q)
        return total % Q

    total = rec(0, 1, 1)
    scale = p**E
    if total % scale:
        raise ValuationError(f"sum is not {p}-integral (N={N}, index={idx})")
    return Residue(total // scale, mod)


def _weight_row(N, p, s, kind, lift, Q, vals, inv_units) -> list[int]:
    row = [0] * N
    for u in range(1, N):
        v = vals[u]
        if (kind == "coprime" and v) or (kind == "zero" and not v):
            continue
        row[u] = pow(inv_units[u], s, Q) * p ** (lift - s * v) % Q
    return row


def s_k_x(x: int, k: int, p: int, r: int, mod: Modulus) -> Residue:
    """``sum_{0 < i < p^r, i == x (mod p)} i^{-k}`` for ``0 < x < p``."""
    if not 0 < x < p:
        raise PreconditionViolated(f"x={x} must lie in [1, p-1]")
    if mod.p != p:
        raise PreconditionViolated("modulus prime differs from p")
    q = mod.q
    terms = batch_inverse(range(x, p**r, p), q)
    return Residue(sum(pow(t, k, q) for t in terms), mod)


class FormalSum(dict):
    """Integer combination of indices; zero coefficients are never stored."""

    def add(self, idx: Index, coeff: int) -> None:
        c = self.get(idx, 0) + coeff
        if c:
            self[idx] = c
        else:
            self.pop(idx, None)

    def __add__(self, other: Mapping[Index, int]) -> FormalSum:
        out = FormalSum(self)
        for k, c in other.items():
            out.add(k, c)
        return out


@lru_cache(maxsize=4096)
def _qsh(s: tuple[int, ...], t: tuple[int, ...]) -> tuple[tuple[tuple[int, ...], int], ...]:
    if not s:
        return ((t, 1),)
    if not t:
        return ((s, 1),)
    out: dict[tuple[int, ...], int] = {}
    # the largest summation variable belongs to s, to t, or to both
    for rest, last in (
        (_qsh(s[:-1], t), s[-1]),
        (_qsh(s, t[:-1]), t[-1]),
        (_qsh(s[:-1], t[:-1]), s[-1] + t[-1]),
    ):
        for w, c in rest:
            key = w + (last,)
            out[key] = out.get(key, 0) + c
    return tuple(sorted(out.items()))


def stuffle_product(s: IndexLike, t: IndexLike) -> FormalSum:
    """Quasi-shuffle (stuffle) product of two indices."""
    out = FormalSum()
    for w, c in _qsh(as_index(s).parts, as_index(t).parts):
        out.add(Index(w), c)
    return out


def stuffle_check(s: IndexLike, t: IndexLike, N: int, p: int, mod: Modulus) -> bool:
    """Numerically confirm ``H(s) H(t) = sum c_w H(w)`` over coprime variables."""
    s, t = as_index(s), as_index(t)
    if s.depth == 0 or t.depth == 0:
        return True

    def h(i: Index) -> Residue:
        return constrained_mhs(N, i, ConstraintSet.all_coprime(i.depth), p, mod)

    rhs = Residue(0, mod)
    for w, c in stuffle_product(s, t).items():
        rhs = rhs + h(w) * c
    return h(s) * h(t) == rhs
