from fractions import Fraction

import pytest

from mhscong.arith import Modulus, Residue, primes_between
from mhscong.bernoulli import bernoulli_exact
from mhscong.claims import (
    evaluate_lhs,
    evaluate_rhs,
    get_claim,
    list_claims,
    probe_main_n4_p5,
    select_claims,
    sweep_claims,
    verify_claim,
)
from mhscong.errors import OutOfDomain

from conftest import brute_compositions, frac_mod

REQUIRED_FAMILIES = [
    "zhao", "zhoucai_odd", "zhoucai_even", "xiacai", "wangcai", "main_n2", "main_n4",
    "lemma_h2zero", "lemma_h111", "lemma_key_i", "lemma_key_ii", "lemma_key_iii",
    "lemma_key_iv", "lemma_key_v", "lemma_key_vi", "lemma_h12_h21", "cor_h3_111",
    "lemma_h13_111", "lemma_h12_h23_111", "sigma_value", "r4_formula", "r8_formula",
    "conj_r11", "conj_r12",
]


def test_registry_contents():
    families = {c.family for c in list_claims()}
    assert set(REQUIRED_FAMILIES) <= families
    ids = [c.id for c in list_claims()]
    assert len(ids) == len(set(ids))
    assert get_claim("zhao").domain.p_min == 3
    assert get_claim("xiacai").domain.p_min == 7
    assert get_claim("main_n4").domain.r_min == 2


def test_select_by_family_and_unknown():
    assert [c.id for c in select_claims(["zhoucai_odd"])] == [
        "zhoucai_odd[n=3]", "zhoucai_odd[n=5]", "zhoucai_odd[n=7]"
    ]
    with pytest.raises(KeyError):
        select_claims(["nope"])
    with pytest.raises(KeyError):
        get_claim("nope")


def test_evaluate_examples():
    zhao = get_claim("zhao")
    assert evaluate_lhs(zhao, 5) == Residue(3, Modulus(5, 1))
    assert evaluate_rhs(zhao, 5) == Residue(3, Modulus(5, 1))
    assert evaluate_lhs(get_claim("main_n2"), 5, 1) == Residue(5, Modulus(5, 2))
    assert evaluate_lhs(get_claim("lemma_h2zero"), 7, 2) == Residue(0, Modulus(7, 5))
    assert evaluate_rhs(get_claim("main_n4"), 7, 2) == Residue(98, Modulus(7, 3))
    assert evaluate_rhs(get_claim("r8_formula"), 11, None, 1).v == 0
    with pytest.raises(OutOfDomain):
        evaluate_lhs(zhao, 5, 2)


def test_sides_share_modulus():
    for c in list_claims():
        p = max(c.domain.p_min, 13)
        r = c.domain.r_min if c.domain.uses_r else None
        m = (1 if c.domain.m_is_class else c.domain.m_min) if c.domain.uses_m else None
        rec = verify_claim(c, p, r, m)
        assert rec.lhs is not None and rec.rhs is not None, c.id
        assert rec.lhs.modulus == rec.rhs.modulus, c.id


def test_verify_examples():
    rec = verify_claim("zhao", 5)
    assert rec.status == "pass" and rec.lhs.v == rec.rhs.v == 3
    rec = verify_claim("main_n4", 7, 2)
    assert rec.status == "pass" and rec.lhs.v == rec.rhs.v == 98
    rec = verify_claim("zhao", 4)
    assert rec.status == "skipped" and "not prime" in rec.reason
    assert verify_claim("main_n4", 7, 1).status == "skipped"


def test_zhao_lhs_is_the_exact_sum():
    for p in (3, 5, 7, 11):
        assert evaluate_lhs(get_claim("zhao"), p).v == frac_mod(brute_compositions(3, p, p), p)


def test_sweep_examples():
    recs = sweep_claims(["zhao"], range(3, 51))
    assert [r.p for r in recs] == primes_between(3, 50)
    assert all(r.passed for r in recs)
    assert sweep_claims([], range(3, 50)) == []


def test_sweep_is_canonical_and_independent_of_workers():
    ids = ["main_n2", "zhao", "r4_formula"]
    one = sweep_claims(ids, range(5, 30), [1, 2], [1, 2])
    many = sweep_claims(ids, range(5, 30), [1, 2], [1, 2], jobs=3)
    assert one == many
    order = [(get_claim(r.claim), r.p, r.r or 0, r.m or 0) for r in one]
    registry = [c.id for c in list_claims()]
    keys = [(registry.index(c.id), p, r, m) for c, p, r, m in order]
    assert keys == sorted(keys)


def test_main_theorem_small_grid():
    recs = sweep_claims(["main_n2"], range(5, 30), [1, 2, 3])
    assert recs and all(r.passed for r in recs)
    recs = sweep_claims(["main_n4"], [7, 11], [2])
    assert recs and all(r.passed for r in recs)


def test_main_n4_at_five_is_reported_not_asserted():
    for r in (2, 3):
        rec = probe_main_n4_p5(r)
        assert rec.status in ("pass", "fail")
        assert rec.lhs.modulus == rec.rhs.modulus == Modulus(5, r + 1)


# ---- statements that are false as printed ---------------------------------------


def test_xiacai_as_printed_fails_and_corrected_form_holds():
    for p in primes_between(7, 53):
        printed = verify_claim("xiacai", p)
        assert printed.status == "fail"
        b = frac_mod(bernoulli_exact(p - 3), p)
        # modulo p the printed right side collapses to 5 B_{p-3} instead of -2 B_{p-3}
        assert printed.rhs.reduce(1).v == 5 * b % p
        assert printed.lhs.reduce(1).v == -2 * b % p
        assert verify_claim("xiacai_corrected", p).passed


def test_r11_r12_as_printed_have_the_wrong_global_sign():
    for p in primes_between(17, 61):
        for m in (2, 3, 4):
            for name in ("conj_r11", "conj_r12"):
                rec = verify_claim(name, p, None, m)
                assert rec.lhs == -rec.rhs
                if rec.rhs.v:
                    assert rec.status == "fail"
                assert verify_claim(name + "_corrected", p, None, m).passed


def test_r11_at_m1_is_minus_ten_factorial_b_p_minus_11():
    c = get_claim("conj_r11_corrected")
    for p in primes_between(13, 40):
        lhs = evaluate_lhs(c, p, None, 1)
        assert lhs.v == -3628800 * frac_mod(bernoulli_exact(p - 11), p) % p
        assert lhs == evaluate_rhs(c, p, None, 1)
        assert evaluate_rhs(get_claim("conj_r11"), p, None, 1) == -lhs


def test_r12_fails_at_thirteen_for_either_sign():
    rec = verify_claim("conj_r12_corrected", 13, None, 1)
    assert rec.status == "fail"
    assert rec.lhs.v == 6 and rec.rhs.v == 0
    assert verify_claim("conj_r12", 13, None, 1).rhs.v == 0


def test_h13_literal_reading_fails_all_units_reading_holds():
    for p in (7, 11, 13):
        assert verify_claim("lemma_h13_111", p, 2).passed
        assert verify_claim("lemma_h13_111_u2free", p, 2).status == "fail"


def test_known_false_key_lemma_cases():
    assert verify_claim("lemma_key_i_powersum[k=1,l=2]", 7, 2).status == "fail"
    assert verify_claim("lemma_key_i_powersum[k=2,l=3]", 7, 2).status == "fail"
    assert verify_claim("lemma_key_v[k=1,d=3]", 5, 2).status == "fail"
    assert verify_claim("lemma_key_vi_powersum", 5, 2).status == "fail"
    assert verify_claim("lemma_key_vi_powersum", 7, 2).passed


def test_every_registered_note_flags_a_real_failure_or_correction():
    for c in list_claims():
        if c.note.startswith("false"):
            assert c.id in {"xiacai", "conj_r11", "conj_r12", "lemma_h13_111_u2free"}
