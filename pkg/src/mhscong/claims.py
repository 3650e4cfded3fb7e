"""Registry of machine-checkable congruences.

Each :class:`Claim` pairs a left-hand recipe (a harmonic or composition sum)
with a right-hand side, usually a :class:`BernoulliExpression`, and a modulus
``p^(c0 + c1 r)``.  Claim ids are stable: ``family`` or
``family[param=value,...]`` for parametrised families.

Argument order: the sums here are written in the conventional
largest-variable-first order and translated to ascending :class:`Index`
values with :meth:`Index.from_display` in exactly one place, :func:`_H`.
"""

from __future__ import annotations

from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from functools import partial
from math import factorial
from typing import Callable, Iterable, Sequence

from .arith import Modulus, Residue, is_prime, rational_residue, split_p
from .bernoulli import _bernoulli_unbounded, bernoulli_residue
from .errors import BudgetExceeded, MhsError, OutOfDomain, PreconditionViolated, ValuationError
from .mhs import ConstraintSet, Index, constrained_mhs, s_k_x
from .sums import composition_sum_fast, r_nm_fast, sigma_direct, t4_via_sigma, t_n_fast

# --------------------------------------------------------------------------
# Bernoulli expressions


def poly_mul(a: Sequence[Fraction], b: Sequence[Fraction]) -> tuple[Fraction, ...]:
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            out[i + j] += x * y
    return tuple(out)


def poly(*coeffs: int | Fraction) -> tuple[Fraction, ...]:
    """Polynomial in m from ascending coefficients."""
    return tuple(Fraction(c) for c in coeffs)


def binom_poly(shift: int, k: int) -> tuple[Fraction, ...]:
    """C(m + shift, k) as a polynomial in m."""
    out: tuple[Fraction, ...] = (Fraction(1),)
    for i in range(k):
        out = poly_mul(out, (Fraction(shift - i), Fraction(1)))
    return tuple(c / factorial(k) for c in out)


def poly_eval(coeffs: Sequence[Fraction], m: int) -> Fraction:
    acc = Fraction(0)
    for c in reversed(coeffs):
        acc = acc * m + c
    return acc


@dataclass(frozen=True)
class BernoulliTerm:
    """``coeff * m_poly(m) * p^(c0 + c1 r) * prod B_{a p + b} / prod (p - d)``."""

    coeff: Fraction
    bernoulli: tuple[tuple[int, int], ...] = ()
    p_exp: tuple[int, int] = (0, 0)
    m_poly: tuple[Fraction, ...] = (Fraction(1),)
    p_den: tuple[int, ...] = ()

    @property
    def weights(self) -> tuple[int, ...]:
        """Weights w of the factors B_{p-w} (only meaningful for ``a == 1``)."""
        return tuple(-b for a, b in self.bernoulli if a == 1)


def term(
    coeff: int | Fraction,
    weights: Iterable[int] = (),
    p_exp: tuple[int, int] = (0, 0),
    m_poly: Sequence[Fraction] = (Fraction(1),),
    p_den: tuple[int, ...] = (),
    extra: tuple[tuple[int, int], ...] = (),
) -> BernoulliTerm:
    """Shorthand: ``weights`` lists w for each factor B_{p-w}."""
    factors = tuple((1, -w) for w in weights) + extra
    return BernoulliTerm(Fraction(coeff), factors, p_exp, tuple(m_poly), p_den)


@dataclass(frozen=True)
class BernoulliExpression:
    terms: tuple[BernoulliTerm, ...]

    def __call__(self, p: int, r: int | None, m: int | None, mod: Modulus) -> Residue:
        total = Residue(0, mod)
        for t in self.terms:
            total = total + _eval_term(t, p, r, m, mod)
        return total


def _eval_term(t: BernoulliTerm, p: int, r: int | None, m: int | None, mod: Modulus) -> Residue:
    e = mod.a
    c = t.coeff * poly_eval(t.m_poly, 0 if m is None else m)
    for d in t.p_den:
        c /= p - d
    if c == 0:
        return Residue(0, mod)
    c0, c1 = t.p_exp
    if c1 and r is None:
        raise PreconditionViolated("expression depends on r but r is unset")
    E = c0 + c1 * (r or 0)
    vn, un = split_p(c.numerator, p)
    vd, ud = split_p(c.denominator, p)
    indices = [a * p + b for a, b in t.bernoulli]
    if any(k < 0 for k in indices):
        raise ValuationError(f"negative Bernoulli index at p={p}")
    if any(k % 2 and k > 1 for k in indices):
        return Residue(0, mod)
    # von Staudt-Clausen: B_k has valuation exactly -1 when (p-1) | k, k > 0 even
    poles = sum(1 for k in indices if k > 0 and k % (p - 1) == 0)
    base = E + vn - vd - poles
    if base >= e:
        return Residue(0, mod)
    if base < 0:
        raise ValuationError(f"term {t} is not {p}-integral at p={p}")
    prec = Modulus(p, e - base)
    acc = rational_residue(Fraction(un, ud), prec)
    for k in indices:
        if k > 0 and k % (p - 1) == 0:
            acc = acc * rational_residue(_bernoulli_unbounded(k) * p, prec)
        else:
            acc = acc * bernoulli_residue(k, prec)
    return Residue(acc.v * p**base, mod)


# --------------------------------------------------------------------------
# Claims


@dataclass(frozen=True)
class Domain:
    p_min: int
    r_min: int | None = None
    r_max: int | None = None
    r_hint: int = 3
    m_min: int | None = None
    m_max: int | None = None
    m_is_class: bool = False
    condition: Callable[[int, int | None, int | None], bool] | None = None
    condition_text: str = ""

    @property
    def uses_r(self) -> bool:
        return self.r_min is not None

    @property
    def uses_m(self) -> bool:
        return self.m_min is not None or self.m_is_class

    def m_values(self, p: int) -> list[int]:
        if self.m_is_class:
            return list(range(1, p))
        if self.m_min is None:
            return []
        return list(range(self.m_min, (self.m_max or self.m_min) + 1))

    def r_values(self) -> list[int]:
        if self.r_min is None:
            return []
        hi = self.r_max if self.r_max is not None else max(self.r_hint, self.r_min)
        return list(range(self.r_min, hi + 1))

    def violation(self, p: int, r: int | None, m: int | None) -> str | None:
        if not is_prime(p):
            return f"{p} is not prime"
        if p < self.p_min:
            return f"requires p >= {self.p_min}"
        if self.uses_r:
            if r is None:
                return "requires r"
            if r < self.r_min or (self.r_max is not None and r > self.r_max):
                return f"r={r} outside [{self.r_min}, {self.r_max or 'inf'}]"
        elif r is not None:
            return "claim does not take r"
        if self.uses_m:
            if m is None:
                return "requires m"
            if self.m_is_class and not 0 < m < p:
                return f"residue class x={m} outside [1, p-1]"
            if not self.m_is_class and (
                m < self.m_min or (self.m_max is not None and m > self.m_max)
            ):
                return f"m={m} outside [{self.m_min}, {self.m_max or 'inf'}]"
        elif m is not None:
            return "claim does not take m"
        if self.condition is not None and not self.condition(p, r, m):
            return self.condition_text or "side condition fails"
        return None


Side = Callable[[int, "int | None", "int | None", Modulus], Residue]


@dataclass(frozen=True)
class Claim:
    id: str
    family: str
    description: str
    lhs: Side
    rhs: Side
    modulus: tuple[int, int]
    domain: Domain
    params: tuple[tuple[str, int], ...] = ()
    note: str = ""

    def exponent(self, r: int | None) -> int:
        c0, c1 = self.modulus
        return c0 + c1 * (r or 0)


@dataclass(frozen=True)
class VerificationRecord:
    claim: str
    p: int
    r: int | None
    m: int | None
    lhs: Residue | None
    rhs: Residue | None
    status: str
    reason: str = ""

    @property
    def modulus(self) -> str:
        src = self.lhs or self.rhs
        return str(src.modulus) if src is not None else ""

    @property
    def passed(self) -> bool:
        return self.status == "pass"


# ---- left-hand recipes ----------------------------------------------------


def _H(N: int, p: int, mod: Modulus, display: Sequence[int], cs: ConstraintSet) -> Residue:
    """Constrained MHS with arguments given largest-variable-first."""
    return constrained_mhs(N, Index.from_display(*display), cs, p, mod)


def _cs_coprime_13(*congruent: tuple[int, int]) -> ConstraintSet:
    return ConstraintSet.of(3, coprime=(1, 3), congruent=congruent)


def _cs_all_congruent(d: int) -> ConstraintSet:
    return ConstraintSet.of(d, coprime=(1,), congruent=[(i, i + 1) for i in range(1, d)])


def lhs_rnm(n: int, fixed_m: int | None, p, r, m, mod):
    return r_nm_fast(n, fixed_m if fixed_m is not None else m, p, mod)


def lhs_tn(n: int, p, r, m, mod):
    return t_n_fast(n, p, r, mod)


def lhs_composition(n: int, p, r, m, mod):
    """Composition sum of ``p^r`` (``p`` when r is unused) without the ``p > n`` guard."""
    return composition_sum_fast(n, p ** (r or 1), p, mod)


def lhs_h2zero(p, r, m, mod):
    return _H(p**r, p, mod, (1, 1, 1), _cs_coprime_13((2, 0)))


def lhs_h11_111(p, r, m, mod):
    return _H(p**r, p, mod, (1, 1, 1), _cs_coprime_13())


def lhs_h_111(p, r, m, mod):
    return _H(p**r, p, mod, (1, 1, 1), ConstraintSet.all_coprime(3))


def lhs_h2_12_21(p, r, m, mod):
    cs = _cs_all_congruent(2)
    return _H(p**r, p, mod, (1, 2), cs) + _H(p**r, p, mod, (2, 1), cs)


def lhs_h_3(p, r, m, mod):
    return _H(p**r, p, mod, (3,), ConstraintSet.all_coprime(1))


def lhs_h3_111(p, r, m, mod):
    return _H(p**r, p, mod, (1, 1, 1), _cs_all_congruent(3))


def lhs_h13_111(p, r, m, mod):
    # all three variables units; the middle one is then automatically a unit too
    return _H(p**r, p, mod, (1, 1, 1), ConstraintSet.of(3, (1, 2, 3), [(1, 3)]))


def lhs_h13_111_u2free(p, r, m, mod):
    return _H(p**r, p, mod, (1, 1, 1), _cs_coprime_13((1, 3)))


def lhs_h12_h23_111(p, r, m, mod):
    N = p**r
    return _H(N, p, mod, (1, 1, 1), _cs_coprime_13((1, 2))) + _H(
        N, p, mod, (1, 1, 1), _cs_coprime_13((2, 3))
    )


def lhs_stuffle_h3(p, r, m, mod):
    return lhs_h3_111(p, r, m, mod) * 6 + lhs_h2_12_21(p, r, m, mod) * 3 + lhs_h_3(p, r, m, mod)


def rhs_sum_s1_cubed(p, r, m, mod):
    return sum((s_k_x(x, 1, p, r, mod) ** 3 for x in range(1, p)), Residue(0, mod))


def lhs_sigma(p, r, m, mod):
    return sigma_direct(p, r, mod)


def rhs_sigma_reduction(p, r, m, mod):
    return t4_via_sigma(p, r, mod)


def lhs_key_i(k: int, p, r, x, mod):
    return s_k_x(x, k, p, r + 1, mod) - s_k_x(x, k, p, r, mod) * p


def lhs_key_i_powersum(k: int, ell: int, p, r, m, mod):
    total = Residue(0, mod)
    for x in range(1, p):
        total = total + lhs_key_i(k, p, r, x, mod) * pow(x, ell, mod.q)
    return total


def lhs_key_ii(k: int, p, r, x, mod):
    return s_k_x(x, k, p, r, mod)


def lhs_key_iii(k: int, d: int, p, r, x, mod):
    return s_k_x(x, k, p, r + 1, mod) ** d


def rhs_key_iii(k: int, d: int, p, r, x, mod):
    return s_k_x(x, k, p, r, mod) ** d * p**d


def lhs_key_iv(k: int, d: int, p, r, x, mod):
    return s_k_x(x, k, p, r, mod) ** d


def rhs_key_iv(k: int, d: int, p, r, x, mod):
    base = d * (r - 1)
    xr = Residue(x, mod)
    main = xr ** (-d * k) * p**base
    corr = xr ** (-d * k - 1) * Fraction(d * k, 2) * p ** (base + 1)
    return main + corr


def lhs_key_v(k: int, d: int, p, r, m, mod):
    return sum((s_k_x(x, k, p, r, mod) ** d for x in range(1, p)), Residue(0, mod))


def lhs_key_vi(p, r, x, mod):
    return s_k_x(x, 1, p, r + 1, mod) * s_k_x(x, 2, p, r + 1, mod)


def rhs_key_vi(p, r, x, mod):
    return s_k_x(x, 1, p, r, mod) * s_k_x(x, 2, p, r, mod) * (p * p)


def lhs_key_vi_powersum(p, r, m, mod):
    return sum(
        (s_k_x(x, 1, p, r, mod) * s_k_x(x, 2, p, r, mod) for x in range(1, p)),
        Residue(0, mod),
    )


def zero_rhs(p, r, m, mod):
    return Residue(0, mod)


def _negated(t: BernoulliTerm) -> BernoulliTerm:
    return BernoulliTerm(-t.coeff, t.bernoulli, t.p_exp, t.m_poly, t.p_den)


def _expr(*terms: BernoulliTerm) -> BernoulliExpression:
    return BernoulliExpression(tuple(terms))


def _label(family: str, params: dict[str, int]) -> str:
    if not params:
        return family
    return family + "[" + ",".join(f"{k}={v}" for k, v in params.items()) + "]"


def _build_registry() -> list[Claim]:
    F = Fraction
    claims: list[Claim] = []

    def add(family, description, lhs, rhs, modulus, domain, note="", **params):
        claims.append(
            Claim(_label(family, params), family, description, lhs, rhs, modulus, domain,
                  tuple(params.items()), note)
        )

    # prior work on composition sums with m p = p
    add("zhao", "sum_{i+j+k=p} 1/(ijk) == -2 B_{p-3} (mod p)",
        partial(lhs_composition, 3), _expr(term(-2, [3])), (1, 0), Domain(p_min=3))
    for n in (3, 5, 7):
        add("zhoucai_odd", f"sum over {n} parts of p: == -(n-1)! B_(p-n) (mod p)",
            partial(lhs_rnm, n, 1), _expr(term(-factorial(n - 1), [n])), (1, 0),
            Domain(p_min=n + 3), n=n)
    for n in (2, 4, 6):
        c = F(-n * factorial(n), 2 * (n + 1))
        add("zhoucai_even", f"sum over {n} parts of p: == -n n!/(2(n+1)) p B_(p-n-1) (mod p^2)",
            partial(lhs_rnm, n, 1), _expr(term(c, [n + 1], p_exp=(1, 0))), (2, 0),
            Domain(p_min=n + 3), n=n)
    add("xiacai", "sum_{i+j+k=p} 1/(ijk) == -12 B_{p-3}/(p-3) - 3 B_{2p-4}/(p-4) (mod p^2)",
        partial(lhs_rnm, 3, 1),
        _expr(term(-12, [3], p_den=(3,)), term(-3, p_den=(4,), extra=((2, -4),))),
        (2, 0), Domain(p_min=7),
        note="false as written: reduces to 5 B_{p-3} mod p, contradicting zhao")
    add("xiacai_corrected",
        "sum_{i+j+k=p} 1/(ijk) == 12 B_{p-3}/(p-3) - 3 B_{2p-4}/(p-2) (mod p^2)",
        partial(lhs_rnm, 3, 1),
        _expr(term(12, [3], p_den=(3,)), term(-3, p_den=(2,), extra=((2, -4),))),
        (2, 0), Domain(p_min=7),
        note="sign/denominator-corrected form of xiacai; agrees with zhao mod p")
    add("wangcai", "T_3(p,r) == -2 p^(r-1) B_{p-3} (mod p^r)",
        partial(lhs_composition, 3), _expr(term(-2, [3], p_exp=(-1, 1))), (0, 1),
        Domain(p_min=3, r_min=1))

    # the main congruences
    add("main_n2", "T_2(p,r) == -(2/3) p^r B_{p-3} (mod p^(r+1))",
        partial(lhs_tn, 2), _expr(term(F(-2, 3), [3], p_exp=(0, 1))), (1, 1),
        Domain(p_min=5, r_min=1))
    add("main_n4", "T_4(p,r) == -(24/5) p^r B_{p-5} (mod p^(r+1))",
        partial(lhs_tn, 4), _expr(term(F(-24, 5), [5], p_exp=(0, 1))), (1, 1),
        Domain(p_min=7, r_min=2, r_hint=2))
    add("reduction_t4", "T_4(p,r) == 24 sigma(p^r) / p^r (mod p^(2r+1))",
        partial(lhs_tn, 4), rhs_sigma_reduction, (1, 2), Domain(p_min=5, r_min=2, r_hint=2))
    add("sigma_value", "sigma(p^r) == -(1/5) p^(2r) B_{p-5} (mod p^(2r+1))",
        lhs_sigma, _expr(term(F(-1, 5), [5], p_exp=(0, 2))), (1, 2),
        Domain(p_min=7, r_min=2, r_hint=2))

    # sub-sum lemmas, all modulo p^(2r+1)
    sub = dict(modulus=(1, 2), domain=Domain(p_min=7, r_min=2, r_hint=2))
    add("lemma_h2zero", "H^(2=0)(1,1,1) == 0", lhs_h2zero, zero_rhs, **sub)
    two5 = _expr(term(F(-2, 5), [5], p_exp=(0, 2)))
    add("lemma_h111", "H^{1,1}(1,1,1) == -(2/5) B_{p-5} p^(2r)", lhs_h11_111, two5,
        **sub, display=1)
    add("lemma_h111", "H(1,1,1) == -(2/5) B_{p-5} p^(2r)", lhs_h_111, two5, **sub, display=2)
    add("lemma_h12_h21", "H^(2)(1,2) + H^(2)(2,1) == (6/5) B_{p-5} p^(2r)", lhs_h2_12_21,
        _expr(term(F(6, 5), [5], p_exp=(0, 2))), **sub, display=1)
    add("lemma_h12_h21", "H(3) == -(6/5) B_{p-5} p^(2r)", lhs_h_3,
        _expr(term(F(-6, 5), [5], p_exp=(0, 2))), **sub, display=2)
    add("stuffle_h3_111", "6 H^(3)(1,1,1) + 3 (H^(2)(1,2) + H^(2)(2,1)) + H(3) "
        "== sum_x S_1(x,p^r)^3", lhs_stuffle_h3, rhs_sum_s1_cubed, (1, 2),
        Domain(p_min=5, r_min=2, r_hint=2))
    add("cor_h3_111", "H^(3)(1,1,1) == -(2/5) B_{p-5} p^(2r)", lhs_h3_111, two5, **sub)
    three5 = _expr(term(F(-3, 5), [5], p_exp=(0, 2)))
    add("lemma_h13_111", "H^{1,3}(1,1,1) == -(3/5) p^(2r) B_{p-5}, all variables units",
        lhs_h13_111, three5, **sub)
    add("lemma_h13_111_u2free",
        "H^{1,3}(1,1,1) == -(3/5) p^(2r) B_{p-5}, middle variable unrestricted",
        lhs_h13_111_u2free, three5, **sub,
        note="false: the unrestricted middle variable leaves a term of valuation 1")
    add("lemma_h12_h23_111", "H^{1,2}(1,1,1) + H^{2,3}(1,1,1) == -(3/5) p^(2r) B_{p-5}",
        lhs_h12_h23_111, three5, **sub)

    # properties of S_k(x, p^r); the m column carries the residue class x
    per_x = dict(p_min=5, m_is_class=True)
    for k in (1, 2):
        add("lemma_key_i", "S_k(x,p^2) == p S_k(x,p) (mod p^2)",
            partial(lhs_key_i, k), zero_rhs, (2, 0), Domain(r_min=1, r_max=1, **per_x),
            k=k, base=1)
        add("lemma_key_i", "S_k(x,p^(r+1)) == p S_k(x,p^r) (mod p^(r+2))",
            partial(lhs_key_i, k), zero_rhs, (2, 1), Domain(r_min=2, **per_x), k=k)
        for ell in range(4):
            add("lemma_key_i_powersum",
                "sum_x x^l (S_k(x,p^(r+1)) - p S_k(x,p^r)) == 0 (mod p^(r+3))",
                partial(lhs_key_i_powersum, k, ell), zero_rhs, (3, 1),
                Domain(p_min=5, r_min=2), k=k, l=ell,
                note="fails when l == k+1 (mod p-1): then sum_x x^(l-k-1) is p-1, not 0 mod p")
        add("lemma_key_ii", "S_k(x,p^r) == 0 (mod p^(r-1))", partial(lhs_key_ii, k),
            zero_rhs, (-1, 1), Domain(r_min=2, **per_x), k=k)
        for d in (1, 2, 3):
            add("lemma_key_iii", "S_k(x,p^(r+1))^d == p^d S_k(x,p^r)^d (mod p^(dr+2))",
                partial(lhs_key_iii, k, d), partial(rhs_key_iii, k, d), (2, d),
                Domain(r_min=2, **per_x), k=k, d=d)
            add("lemma_key_iv", "S_k(x,p^r)^d == p^(d(r-1)) x^(-dk) "
                "+ (dk/2) p^(d(r-1)+1) x^(-dk-1) (mod p^(d(r-1)+2))",
                partial(lhs_key_iv, k, d), partial(rhs_key_iv, k, d), (2 - d, d),
                Domain(r_min=2, **per_x), k=k, d=d)
            add("lemma_key_v", "sum_x S_k(x,p^r)^d == dk/(dk+1) p^(d(r-1)+1) B_{p-1-dk} "
                "(mod p^(d(r-1)+2))",
                partial(lhs_key_v, k, d),
                _expr(term(F(d * k, d * k + 1), [1 + d * k], p_exp=(1 - d, d))),
                (2 - d, d),
                Domain(p_min=5, r_min=2,
                       condition=lambda p, r, m, dk=d * k: dk < p - 1,
                       condition_text=f"requires dk={d * k} < p-1"),
                k=k, d=d,
                note="fails when dk == p-2, where B_{p-1-dk} = B_1 is nonzero")
    add("lemma_key_vi", "S_1 S_2(x,p^(r+1)) == p^2 S_1 S_2(x,p^r) (mod p^(2r+2))",
        lhs_key_vi, rhs_key_vi, (2, 2), Domain(r_min=2, **per_x))
    add("lemma_key_vi_powersum", "sum_x S_1(x,p^r) S_2(x,p^r) == 0 (mod p^(2r+1))",
        lhs_key_vi_powersum, zero_rhs, (1, 2), Domain(p_min=5, r_min=2),
        note="fails at p = 5, where (p-1) divides the Bernoulli index in the argument")

    # composition sums over m p
    add("r4_formula", "R_4^(m)(p) == -(4!/5) m(m^2+1) p B_{p-5} (mod p^2)",
        partial(lhs_rnm, 4, None),
        _expr(term(F(-24, 5), [5], p_exp=(1, 0), m_poly=poly(0, 1, 0, 1))),
        (2, 0), Domain(p_min=7, m_min=1, m_max=3))
    add("r8_formula", "R_8^(m)(p) == (112/5) m(m^2+16)(m^2-1) B_{p-3} B_{p-5} (mod p)",
        partial(lhs_rnm, 8, None),
        _expr(term(F(112, 5), [3, 5],
                   m_poly=poly_mul(poly(0, 1), poly_mul(poly(16, 0, 1), poly(-1, 0, 1))))),
        (1, 0), Domain(p_min=11, m_min=1, m_max=7))
    r11_terms = (
        term(88 * factorial(5), [3, 3, 5], m_poly=poly_mul(binom_poly(2, 5), poly(33, 0, 1))),
        term(10, [11], m_poly=poly(0, 193248, 0, 152900, 0, 16401, 0, 330, 0, 1)),
    )
    r12_terms = (
        term(F(-55 * factorial(8), 9), [3, 3, 3, 3], m_poly=binom_poly(3, 7)),
        term(F(-22 * factorial(5), 9), [3, 9],
             m_poly=poly_mul(binom_poly(1, 3), poly(32256, 0, 6196, 0, 211, 0, 1))),
        term(F(-66 * factorial(4), 7), [5, 7],
             m_poly=poly_mul(binom_poly(1, 3), poly(31392, 0, 6508, 0, 187, 0, 1))),
    )
    r11_text = ("88*5! C(m+2,5)(m^2+33) B_{p-3}^2 B_{p-5} "
                "+ 10 m(m^8+330m^6+16401m^4+152900m^2+193248) B_{p-11}")
    r12_text = ("-(55*8!/9) C(m+3,7) B_{p-3}^4 "
                "- (22*5!/9) C(m+1,3)(m^6+211m^4+6196m^2+32256) B_{p-3} B_{p-9} "
                "- (66*4!/7) C(m+1,3)(m^6+187m^4+6508m^2+31392) B_{p-5} B_{p-7}")
    add("conj_r11", f"R_11^(m)(p) == {r11_text} (mod p)",
        partial(lhs_rnm, 11, None), _expr(*r11_terms), (1, 0),
        Domain(p_min=13, m_min=1, m_max=10),
        note="false as written: at m=1 it gives +10! B_{p-11}, zhoucai_odd gives -10! B_{p-11}")
    add("conj_r12", f"R_12^(m)(p) == {r12_text} (mod p)",
        partial(lhs_rnm, 12, None), _expr(*r12_terms), (1, 0),
        Domain(p_min=13, m_min=1, m_max=11),
        note="false as written: the left side equals minus the right side")
    add("conj_r11_corrected", f"R_11^(m)(p) == -[{r11_text}] (mod p)",
        partial(lhs_rnm, 11, None), _expr(*(_negated(t) for t in r11_terms)), (1, 0),
        Domain(p_min=13, m_min=1, m_max=10), note="global sign flipped")
    add("conj_r12_corrected", f"R_12^(m)(p) == -[{r12_text}] (mod p)",
        partial(lhs_rnm, 12, None), _expr(*(_negated(t) for t in r12_terms)), (1, 0),
        Domain(p_min=13, m_min=1, m_max=11), note="global sign flipped")
    return claims


_REGISTRY: tuple[Claim, ...] = tuple(_build_registry())
_BY_ID = {c.id: c for c in _REGISTRY}


def list_claims() -> list[Claim]:
    return list(_REGISTRY)


def families() -> list[str]:
    return list(dict.fromkeys(c.family for c in _REGISTRY))


def get_claim(claim_id: str) -> Claim:
    try:
        return _BY_ID[claim_id]
    except KeyError:
        raise KeyError(f"unknown claim id {claim_id!r}") from None


def select_claims(ids: Iterable[str]) -> list[Claim]:
    """Resolve ids or family names to claims, in registry order."""
    wanted = set()
    for name in ids:
        hits = [c.id for c in _REGISTRY if c.id == name or c.family == name]
        if not hits:
            raise KeyError(f"unknown claim id {name!r}")
        wanted.update(hits)
    return [c for c in _REGISTRY if c.id in wanted]


def _check(c: Claim, p: int, r: int | None, m: int | None) -> Modulus:
    reason = c.domain.violation(p, r, m)
    if reason:
        raise OutOfDomain(reason)
    e = c.exponent(r)
    if e < 1:
        raise OutOfDomain(f"modulus exponent {e} < 1")
    return Modulus(p, e)


def evaluate_lhs(c: Claim, p: int, r: int | None = None, m: int | None = None) -> Residue:
    return c.lhs(p, r, m, _check(c, p, r, m))


def evaluate_rhs(c: Claim, p: int, r: int | None = None, m: int | None = None) -> Residue:
    return c.rhs(p, r, m, _check(c, p, r, m))


def verify_claim(
    c: Claim | str,
    p: int,
    r: int | None = None,
    m: int | None = None,
    lhs: Residue | None = None,
) -> VerificationRecord:
    """Evaluate both sides; errors turn into ``skipped``/``fail`` records.

    A precomputed ``lhs`` (e.g. from a cache) skips the left-hand evaluation.
    """
    if isinstance(c, str):
        c = get_claim(c)
    try:
        mod = _check(c, p, r, m)
    except OutOfDomain as exc:
        return VerificationRecord(c.id, p, r, m, None, None, "skipped", str(exc))
    try:
        left = lhs if lhs is not None else c.lhs(p, r, m, mod)
    except BudgetExceeded as exc:
        return VerificationRecord(c.id, p, r, m, None, None, "skipped", str(exc))
    except MhsError as exc:
        return VerificationRecord(c.id, p, r, m, None, None, "fail", f"lhs: {exc}")
    try:
        right = c.rhs(p, r, m, mod)
    except MhsError as exc:
        return VerificationRecord(c.id, p, r, m, left, None, "fail", f"rhs: {exc}")
    status = "pass" if left == right else "fail"
    return VerificationRecord(c.id, p, r, m, left, right, status)


def grid_points(
    c: Claim,
    primes: Iterable[int],
    r_values: Iterable[int] | None = None,
    m_values: Iterable[int] | None = None,
) -> list[tuple[int, int | None, int | None]]:
    """In-domain ``(p, r, m)`` points of a Cartesian grid, in canonical order."""
    dom = c.domain
    rs = list(r_values) if r_values is not None else None
    ms = list(m_values) if m_values is not None else None
    out = []
    for p in sorted(set(primes)):
        if not is_prime(p):
            continue
        r_list: list[int | None] = (rs if rs is not None else dom.r_values()) if dom.uses_r else [None]
        m_list: list[int | None] = (ms if ms is not None else dom.m_values(p)) if dom.uses_m else [None]
        for r in r_list:
            for m in m_list:
                if dom.violation(p, r, m) is None and c.exponent(r) >= 1:
                    out.append((p, r, m))
    return out


def _verify_point(args) -> VerificationRecord:
    claim_id, p, r, m, lhs = args
    return verify_claim(get_claim(claim_id), p, r, m, lhs)


def sweep_claims(
    ids: Iterable[str],
    prime_range: Iterable[int],
    r_range: Iterable[int] | None = None,
    m_range: Iterable[int] | None = None,
    jobs: int = 1,
    cache=None,
) -> list[VerificationRecord]:
    """Verify every in-domain grid point; output order is ``(claim, p, r, m)``.

    ``cache`` (anything with ``get(key)`` / ``put(key, residue)``) supplies
    left-hand values by ``(claim, p, r, m)`` and receives the new ones.  It is
    only touched from the calling process.
    """
    primes = list(prime_range)
    rs = list(r_range) if r_range is not None else None
    ms = list(m_range) if m_range is not None else None
    tasks = []
    for c in select_claims(ids):
        for p, r, m in grid_points(c, primes, rs, ms):
            hit = cache.get((c.id, p, r, m)) if cache is not None else None
            tasks.append((c.id, p, r, m, hit))
    if jobs > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            chunk = max(1, len(tasks) // (4 * jobs))
            records = list(pool.map(_verify_point, tasks, chunksize=chunk))
    else:
        records = [_verify_point(t) for t in tasks]
    if cache is not None:
        for (cid, p, r, m, hit), rec in zip(tasks, records):
            if hit is None and rec.lhs is not None:
                cache.put((cid, p, r, m), rec.lhs)
    return records


def probe_main_n4_p5(r: int) -> VerificationRecord:
    """main_n4 evaluated at p = 5, outside its registered domain.

    At p = 5 the Bernoulli factor is B_0 = 1 and the coefficient 24/5 has a
    pole, so the right side is -24 * 5^(r-1).  The outcome is reported only.
    """
    c = get_claim("main_n4")
    mod = Modulus(5, r + 1)
    left = c.lhs(5, r, None, mod)
    right = Residue(-24 * 5 ** (r - 1), mod)
    return VerificationRecord("main_n4@p=5", 5, r, None, left, right,
                              "pass" if left == right else "fail", "exploratory")
