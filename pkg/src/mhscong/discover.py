"""Integer-relation discovery over windows of per-prime residues.

A *window* holds one residue per prime, all modulo ``p^a`` for a common ``a``.
Combining a window by CRT gives one integer modulo ``M = prod p^a``; a rational
relation that holds at every prime is then a short vector in an integer
lattice, which exact LLL reduction finds when it exists.

Typical use::

    primes = first_primes(30, 5)
    target = target_window(TARGETS["zhao"], primes)
    basis = [monomial_window(mono, primes) for mono in basis_monomials(3)]
    discover_combination(target, basis)          # coefficient -2 for B_{p-3}
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import gcd, isqrt
from typing import Callable, Iterable, Mapping, Sequence

from .arith import Modulus, Residue, crt_combine, first_primes
from .bernoulli import bernoulli_residue
from .errors import (
    InconsistentData,
    MismatchedWindows,
    PreconditionViolated,
    PrimeTooSmall,
    SingularInput,
    ValuationError,
)
from .sums import composition_sum_fast

DEFAULT_HEIGHT_BOUND = 10**12
# A relation of height H among k+1 windows is only believed if H^(k+1) is
# this many digits below the lattice determinant; random lattices of the same
# determinant have shortest vectors near det^(1/(k+1)).
DEFAULT_SIGNIFICANCE_DIGITS = 8


# ---- windows -----------------------------------------------------------------


@dataclass(frozen=True)
class CrtImage:
    V: int
    M: int


@dataclass(frozen=True)
class PrimeWindow:
    """Residues indexed by strictly increasing primes, all modulo ``p^a``."""

    entries: Mapping[int, Residue]

    def __post_init__(self) -> None:
        entries = dict(self.entries)
        primes = list(entries)
        if any(b <= a for a, b in zip(primes, primes[1:])):
            raise PreconditionViolated("window primes must be strictly increasing")
        exps = {r.modulus.a for r in entries.values()}
        if len(exps) > 1:
            raise PreconditionViolated(f"mixed exponents in window: {sorted(exps)}")
        for p, r in entries.items():
            if r.modulus.p != p:
                raise PreconditionViolated(f"entry for {p} is modulo {r.modulus}")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def build(cls, primes: Iterable[int], fn: Callable[[int], Residue]) -> PrimeWindow:
        return cls({p: fn(p) for p in primes})

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(self.entries)

    @property
    def exponent(self) -> int:
        return next(iter(self.entries.values())).modulus.a if self.entries else 1

    def __getitem__(self, p: int) -> Residue:
        return self.entries[p]

    def __len__(self) -> int:
        return len(self.entries)

    def _same_shape(self, other: PrimeWindow) -> None:
        if self.primes != other.primes or self.exponent != other.exponent:
            raise MismatchedWindows("windows differ in primes or exponent")

    def __mul__(self, other: PrimeWindow) -> PrimeWindow:
        self._same_shape(other)
        return PrimeWindow({p: self[p] * other[p] for p in self.primes})

    def scale(self, c: int | Fraction) -> PrimeWindow:
        return PrimeWindow({p: r * c for p, r in self.entries.items()})

    def crt(self) -> CrtImage:
        V, M = crt_combine(self.entries.values())
        return CrtImage(V, M)


@dataclass(frozen=True, order=True)
class BernoulliMonomial:
    """Product of B_{p-w} over a multiset of odd weights ``w >= 3``."""

    weights: tuple[int, ...]

    def __post_init__(self) -> None:
        ws = tuple(sorted(self.weights))
        if any(w < 3 or w % 2 == 0 for w in ws):
            raise PreconditionViolated(f"weights must be odd and >= 3: {ws}")
        object.__setattr__(self, "weights", ws)

    @property
    def total_weight(self) -> int:
        return sum(self.weights)

    @property
    def label(self) -> str:
        return "{" + ",".join(map(str, self.weights)) + "}"

    def __str__(self) -> str:
        return self.label


def basis_monomials(w: int) -> list[BernoulliMonomial]:
    """All multisets of odd parts >= 3 with sum ``w``, most parts first."""
    out: list[tuple[int, ...]] = []

    def walk(rest: int, smallest: int, acc: tuple[int, ...]) -> None:
        if rest == 0:
            out.append(acc)
            return
        for part in range(smallest, rest + 1, 2):
            walk(rest - part, part, acc + (part,))

    if w > 0:
        walk(w, 3, ())
    return [BernoulliMonomial(t) for t in sorted(out, key=lambda t: (-len(t), t))]


def _check_primes(weights: Iterable[int], primes: Sequence[int]) -> None:
    top = max(weights, default=0)
    small = [p for p in primes if p < top + 2]
    if small:
        raise PrimeTooSmall(f"primes {small} are below w+2={top + 2}")


def beta_window(w: int, primes: Sequence[int], a: int = 1) -> PrimeWindow:
    """``B_{p-w} / w`` for each prime; requires ``p >= w + 2``."""
    if w < 3 or w % 2 == 0:
        raise PreconditionViolated(f"beta_w needs odd w >= 3, got {w}")
    _check_primes([w], primes)
    return PrimeWindow.build(
        primes, lambda p: bernoulli_residue(p - w, Modulus(p, a)) * Fraction(1, w)
    )


def monomial_window(
    mono: BernoulliMonomial,
    primes: Sequence[int],
    a: int = 1,
    normalization: str = "B",
    p_power: int = 0,
) -> PrimeWindow:
    """``p^p_power * prod B_{p-w}`` (or ``prod beta_w`` when ``normalization="beta"``)."""
    if normalization not in ("B", "beta"):
        raise PreconditionViolated(f"unknown normalization {normalization!r}")
    _check_primes(mono.weights, primes)

    def value(p: int) -> Residue:
        mod = Modulus(p, a)
        acc = Residue(p**p_power, mod)
        for w in mono.weights:
            acc = acc * bernoulli_residue(p - w, mod)
            if normalization == "beta":
                acc = acc * Fraction(1, w)
        return acc

    return PrimeWindow.build(primes, value)


# ---- rational reconstruction and lattice reduction -------------------------------


def rational_reconstruction(V: int, M: int) -> Fraction | None:
    """The unique ``a/b`` with ``a == V b (mod M)`` and ``|a|, b <= sqrt(M/2)``.

    Runs the extended Euclidean algorithm on ``(M, V)`` and stops halfway.
    Returns ``None`` when no such fraction exists.
    """
    if M < 1 or not 0 <= V < M:
        raise PreconditionViolated("need 0 <= V < M")
    bound = isqrt(M // 2)
    r0, r1 = M, V
    t0, t1 = 0, 1
    while r1 > bound:
        q = r0 // r1
        r0, r1 = r1, r0 - q * r1
        t0, t1 = t1, t0 - q * t1
    if t1 == 0 or abs(t1) > bound or gcd(t1, M) != 1:
        return None
    x = Fraction(r1, t1)
    if (x.numerator - V * x.denominator) % M:
        return None
    return x


def lll_reduce(basis: Sequence[Sequence[int]], delta: Fraction = Fraction(3, 4)) -> list[list[int]]:
    """LLL-reduce linearly independent integer rows with exact integer arithmetic.

    This is the all-integer formulation: instead of rational Gram-Schmidt data
    it keeps ``d_i`` (Gram determinants of leading rows) and ``lam[k][j] =
    d_{j+1} mu_{kj}``, both integers.
    """
    b = [list(map(int, row)) for row in basis]
    n = len(b)
    if n == 0:
        return []
    if any(len(row) != len(b[0]) for row in b):
        raise PreconditionViolated("rows must have equal length")
    dn, dd = Fraction(delta).numerator, Fraction(delta).denominator

    def dot(u: list[int], v: list[int]) -> int:
        return sum(x * y for x, y in zip(u, v))

    d = [1] + [0] * n  # d[i+1] is the Gram determinant of rows 0..i
    lam = [[0] * n for _ in range(n)]

    def add_row(k: int) -> None:
        for j in range(k + 1):
            u = dot(b[k], b[j])
            for i in range(j):
                u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
            if j < k:
                lam[k][j] = u
            elif u == 0:
                raise SingularInput("rows are linearly dependent")
            else:
                d[k + 1] = u

    def red(k: int, l: int) -> None:
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            b[k] = [x - q * y for x, y in zip(b[k], b[l])]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k: int, kmax: int) -> None:
        b[k], b[k - 1] = b[k - 1], b[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        mu = lam[k][k - 1]
        new = (d[k - 1] * d[k + 1] + mu * mu) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - mu * t) // d[k]
            lam[i][k - 1] = (new * t + mu * lam[i][k]) // d[k + 1]
        d[k] = new

    add_row(0)
    if n == 1:
        return b
    k, kmax = 1, 0
    while k < n:
        if k > kmax:
            kmax = k
            add_row(k)
        red(k, k - 1)
        mu = lam[k][k - 1]
        if dd * d[k + 1] * d[k - 1] < dn * d[k] * d[k] - dd * mu * mu:
            swap(k, kmax)
            k = max(1, k - 1)
        else:
            for l in range(k - 2, -1, -1):
                red(k, l)
            k += 1
    return b


# ---- discovery ---------------------------------------------------------------


@dataclass(frozen=True)
class RelationResult:
    coefficients: tuple[Fraction, ...]
    relation_vector: tuple[int, ...]
    verified: bool
    labels: tuple[str, ...] = ()
    alternatives: tuple[tuple[int, ...], ...] = ()

    @property
    def height(self) -> int:
        return max(abs(c) for c in self.relation_vector)

    def __bool__(self) -> bool:
        return True


@dataclass(frozen=True)
class NoResult:
    """No relation below ``height_bound``; ``shortest_height`` is what LLL did find."""

    height_bound: int
    shortest_height: int | None = None
    reason: str = ""

    def __bool__(self) -> bool:
        return False


def _verify_relation(vec: Sequence[int], windows: Sequence[PrimeWindow]) -> bool:
    for p in windows[0].primes:
        mod = windows[0][p].modulus
        total = sum(c * w[p].v for c, w in zip(vec, windows)) % mod.q
        if total:
            return False
    return True


def discover_combination(
    target: PrimeWindow,
    basis: Sequence[PrimeWindow],
    height_bound: int = DEFAULT_HEIGHT_BOUND,
    labels: Sequence[str] = (),
    significance_digits: int = DEFAULT_SIGNIFICANCE_DIGITS,
) -> RelationResult | NoResult:
    """Rationals ``q_i`` with ``target == sum q_i basis_i`` at every prime of the window.

    Lattice rows are ``(e_i, K v_i)`` for the CRT images ``v_0 = target``,
    ``v_i = basis_i`` and ``(0, K M)``, with ``K = M``.  Reduced rows whose last
    entry vanishes are integer relations ``c_0 t + sum c_i b_i == 0 (mod M)``.
    A relation is accepted when ``c_0`` is a unit at every prime, its height is
    at most ``height_bound``, it is significantly shorter than a random lattice
    vector would be, and it holds prime by prime.
    """
    if not basis:
        raise PreconditionViolated("basis must be nonempty")
    windows = [target, *basis]
    for w in basis:
        target._same_shape(w)
    images = [w.crt() for w in windows]
    M = images[0].M
    vals = [im.V for im in images]
    k = len(basis)
    K = M
    rows = [[int(i == j) for j in range(k + 1)] + [K * v] for i, v in enumerate(vals)]
    rows.append([0] * (k + 1) + [K * M])
    reduced = lll_reduce(rows)

    candidates = []
    for row in reduced:
        if row[-1] != 0 or not any(row[:-1]):
            continue
        vec = row[:-1]
        if vec[0] < 0 or (vec[0] == 0 and next(c for c in vec if c) < 0):
            vec = [-c for c in vec]
        candidates.append(tuple(vec))
    candidates.sort(key=lambda v: (max(map(abs, v)), v))
    if not candidates:
        return NoResult(height_bound, None, "no relation vector in the reduced basis")

    det = M // gcd(M, *vals)
    shortest = max(map(abs, candidates[0]))
    accepted = []
    for vec in candidates:
        h = max(map(abs, vec))
        if h > height_bound:
            continue
        if h ** (k + 1) * 10**significance_digits > det:
            continue
        if any(vec[0] % p == 0 for p in target.primes):
            continue
        if _verify_relation(vec, windows):
            accepted.append(vec)
    if not accepted:
        why = (f"shortest relation has height {shortest}" if shortest > height_bound
               else f"no significant relation (window modulus has {len(str(det))} digits)")
        return NoResult(height_bound, shortest, why)
    best = accepted[0]
    coeffs = tuple(Fraction(-c, best[0]) for c in best[1:])
    return RelationResult(coeffs, best, True, tuple(labels), tuple(accepted[1:]))


def fit_coefficient_polynomial(
    per_m: Mapping[int, Fraction | int],
    degree_bound: int,
    vanishes_at_zero: bool = False,
) -> list[Fraction]:
    """Exact polynomial of degree ``<= degree_bound`` through ``per_m``, ascending coefficients.

    With ``vanishes_at_zero`` the point ``(0, 0)`` is added.  Any points beyond
    the ``degree_bound + 1`` used for the fit are checked and raise
    :class:`InconsistentData` on mismatch.  Trailing zero coefficients are
    dropped, so a constant map yields a one-element list.
    """
    pts = {int(m): Fraction(v) for m, v in per_m.items()}
    if vanishes_at_zero:
        if pts.get(0, 0) != 0:
            raise InconsistentData("value at m=0 is nonzero")
        pts[0] = Fraction(0)
    if len(pts) < degree_bound + 1:
        raise PreconditionViolated(
            f"{len(pts)} points cannot determine a degree-{degree_bound} polynomial"
        )
    xs = sorted(pts)
    fit, extra = xs[: degree_bound + 1], xs[degree_bound + 1 :]
    # Newton divided differences over the fitting points
    coef = [pts[x] for x in fit]
    for j in range(1, len(fit)):
        for i in range(len(fit) - 1, j - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) / (fit[i] - fit[i - j])
    out = [Fraction(0)] * len(fit)
    for i in range(len(fit) - 1, -1, -1):
        # out = out * (x - fit[i]) + coef[i]
        shifted = [Fraction(0)] + out[:-1]
        out = [s - fit[i] * o for s, o in zip(shifted, out)]
        out[0] += coef[i]
    while len(out) > 1 and out[-1] == 0:
        out.pop()
    for x in extra:
        value = sum(c * x**i for i, c in enumerate(out))
        if value != pts[x]:
            raise InconsistentData(f"point m={x} gives {pts[x]}, polynomial gives {value}")
    return out


# ---- discovery targets -----------------------------------------------------------


@dataclass(frozen=True)
class Target:
    """A per-prime quantity to explain by Bernoulli monomials.

    ``compute(p, m, mod)`` returns the raw sum modulo ``p^(a + shift)``; the
    window divides out ``p^shift`` per prime.  ``basis_p_power`` multiplies the
    basis windows instead, for quantities compared without normalization.
    """

    name: str
    weight: int
    compute: Callable[[int, int | None, Modulus], Residue]
    description: str
    exponent: int = 1
    shift: int = 0
    basis_p_power: int = 0
    p_min: int = 5
    uses_m: bool = False


def _composition(n: int, fixed_m: int | None = None):
    def compute(p: int, m: int | None, mod: Modulus) -> Residue:
        mult = fixed_m if fixed_m is not None else m
        if mult is None:
            raise PreconditionViolated(f"target needs m")
        if not n > mult >= 1:
            raise PreconditionViolated(f"need n > m >= 1 (n={n}, m={mult})")
        return composition_sum_fast(n, mult * p, p, mod)

    return compute


def _t6_r2(p: int, m: int | None, mod: Modulus) -> Residue:
    return composition_sum_fast(6, p * p, p, mod)


def _build_targets() -> dict[str, Target]:
    t: list[Target] = [
        Target("zhao", 3, _composition(3, 1), "composition sum of p into 3 parts, mod p"),
    ]
    for n in (3, 5, 7, 9):
        t.append(Target(f"zhoucai_odd{n}", n, _composition(n, 1),
                        f"composition sum of p into {n} parts, mod p", p_min=n + 2))
    for n in (2, 4, 6, 8):
        t.append(Target(f"zhoucai_even{n}", n + 1, _composition(n, 1),
                        f"composition sum of p into {n} parts, mod p^2, divided by p",
                        shift=1, p_min=n + 3))
    t += [
        Target("r4", 5, _composition(4), "R_4^(m)(p) mod p^2, divided by p",
               shift=1, p_min=7, uses_m=True),
        Target("r8", 8, _composition(8), "R_8^(m)(p) mod p", p_min=11, uses_m=True),
        Target("r11", 11, _composition(11), "R_11^(m)(p) mod p", p_min=13, uses_m=True),
        Target("r12", 12, _composition(12), "R_12^(m)(p) mod p", p_min=17, uses_m=True),
        Target("t6_r2", 7, _t6_r2,
               "T_6(p,2) mod p^3 against p^2 B_{p-7} mod p^3 (no normalization)",
               exponent=3, basis_p_power=2, p_min=11),
    ]
    return {x.name: x for x in t}


TARGETS: dict[str, Target] = _build_targets()


def target_primes(target: Target, count: int, weight: int | None = None) -> list[int]:
    """The first ``count`` primes usable for ``target`` and monomials of ``weight``."""
    w = target.weight if weight is None else weight
    return first_primes(count, max(target.p_min, w + 2))


def target_value(target: Target, p: int, m: int | None = None) -> Residue:
    """One window entry: the raw sum with ``p^shift`` divided out."""
    raw = target.compute(p, m, Modulus(p, target.exponent + target.shift))
    unit = p**target.shift
    if raw.v % unit:
        raise ValuationError(f"{target.name} at p={p} is not divisible by p^{target.shift}")
    return Residue(raw.v // unit, Modulus(p, target.exponent))


def target_window(
    target: Target,
    primes: Sequence[int],
    m: int | None = None,
    lookup: Callable[[int], Residue | None] | None = None,
) -> PrimeWindow:
    """Window of :func:`target_value`; ``lookup`` may supply cached entries."""
    def entry(p: int) -> Residue:
        hit = lookup(p) if lookup is not None else None
        return hit if hit is not None else target_value(target, p, m)

    return PrimeWindow.build(primes, entry)


@dataclass(frozen=True)
class DiscoveryReport:
    target: str
    m: int | None
    primes: tuple[int, ...]
    labels: tuple[str, ...]
    outcome: RelationResult | NoResult


def discover_target(
    target: Target | str,
    weight: int | None = None,
    count: int = 30,
    m: int | None = None,
    height_bound: int = DEFAULT_HEIGHT_BOUND,
    normalization: str = "B",
    target_entries: PrimeWindow | None = None,
) -> DiscoveryReport:
    """Run the full pipeline for a named target over its first ``count`` primes."""
    if isinstance(target, str):
        target = TARGETS[target]
    w = target.weight if weight is None else weight
    monos = basis_monomials(w)
    if not monos:
        raise PreconditionViolated(f"no Bernoulli monomials of weight {w}")
    primes = target_entries.primes if target_entries is not None else tuple(
        target_primes(target, count, w)
    )
    _check_primes([w], primes)
    window = target_entries or target_window(target, primes, m)
    basis = [
        monomial_window(mono, primes, target.exponent, normalization, target.basis_p_power)
        for mono in monos
    ]
    labels = tuple(mono.label for mono in monos)
    outcome = discover_combination(window, basis, height_bound, labels)
    return DiscoveryReport(target.name, m, tuple(primes), labels, outcome)


def discover_polynomials(
    target: Target | str,
    ms: Sequence[int],
    degree_bound: int,
    weight: int | None = None,
    count: int = 30,
    vanishes_at_zero: bool = True,
) -> dict[str, list[Fraction]]:
    """Recover each basis coefficient as a polynomial in ``m``.

    Discovery runs separately at every ``m`` in ``ms``; points beyond the
    ``degree_bound + 1`` needed for interpolation serve as consistency checks.
    """
    per_label: dict[str, dict[int, Fraction]] = {}
    for m in ms:
        rep = discover_target(target, weight, count, m)
        if not rep.outcome:
            raise InconsistentData(f"no relation found at m={m}: {rep.outcome.reason}")
        for label, c in zip(rep.labels, rep.outcome.coefficients):
            per_label.setdefault(label, {})[m] = c
    return {
        label: fit_coefficient_polynomial(vals, degree_bound, vanishes_at_zero)
        for label, vals in per_label.items()
    }
