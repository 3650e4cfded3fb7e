import io
import json

import pytest

from mhscong.cache import ENGINE_VERSION, ResidueCache, default_cache_path, encode, scan
from mhscong.arith import Modulus, Residue
from mhscong.cli import COLUMNS, main, parse_height, parse_range


def run(*argv):
    out = io.StringIO()
    code = main(list(argv), out)
    return code, out.getvalue()


def test_parse_helpers():
    assert parse_range("1..3") == [1, 2, 3]
    assert parse_range("2,5") == [2, 5]
    assert parse_range("4") == [4]
    assert parse_height("1e12") == 10**12
    assert parse_height("1000") == 1000


def test_verify_exit_codes(capsys):
    code, text = run("verify", "--claim", "zhao", "--p", "5")
    assert code == 0
    header, row = text.strip().split("\n")
    assert header.split("\t") == list(COLUMNS)
    assert row.split("\t") == ["zhao", "5", "-", "-", "3", "3", "5^1", "pass"]

    code, text = run("verify", "--claim", "main_n4", "--p", "7", "--r", "2")
    assert code == 0 and "\t98\t98\t7^3\tpass" in text

    code, text = run("verify", "--claim", "zhao", "--p", "4")
    assert code == 2
    assert "not prime" in capsys.readouterr().err

    code, _ = run("verify", "--claim", "xiacai", "--p", "11")
    assert code == 1
    code, _ = run("verify", "--claim", "nope", "--p", "11")
    assert code == 2


def test_sweep_tsv_and_json_agree():
    code, tsv = run("sweep", "--claims", "zhao", "--pmin", "3", "--pmax", "50")
    assert code == 0
    rows = tsv.strip().split("\n")[1:]
    assert len(rows) == 14 and all(r.endswith("\tpass") for r in rows)
    code, js = run("sweep", "--claims", "zhao", "--pmin", "3", "--pmax", "50", "--format", "json")
    recs = [json.loads(line) for line in js.strip().split("\n")]
    assert [list(r) for r in recs] == [list(COLUMNS)] * 14
    for line, rec in zip(rows, recs):
        assert line.split("\t") == ["-" if rec[k] is None else str(rec[k]) for k in COLUMNS]


def test_sweep_failure_exit_code():
    code, text = run("sweep", "--claims", "xiacai", "--pmin", "7", "--pmax", "20")
    assert code == 1 and "fail" in text


def test_sweep_main_n2():
    code, text = run("sweep", "--claims", "main_n2", "--pmin", "5", "--pmax", "97",
                     "--r", "1..3", "--jobs", "2")
    rows = text.strip().split("\n")[1:]
    assert code == 0 and len(rows) == 23 * 3


def test_warm_cache_is_byte_identical_with_no_recomputation(tmp_path, monkeypatch):
    cache = tmp_path / "c.jsonl"
    args = ["sweep", "--claims", "main_n2,zhao", "--pmin", "5", "--pmax", "40",
            "--r", "1..2", "--cache", str(cache)]
    code1, first = run(*args)
    lines = cache.read_text().splitlines()
    assert code1 == 0 and lines

    import mhscong.claims as claims_mod

    calls = []
    orig = claims_mod.verify_claim

    def spy(c, p, r=None, m=None, lhs=None):
        calls.append(lhs is not None)
        return orig(c, p, r, m, lhs)

    monkeypatch.setattr(claims_mod, "verify_claim", spy)
    code2, second = run(*args)
    assert code2 == 0 and second == first
    assert calls and all(calls)
    assert cache.read_text().splitlines() == lines


def test_reports_do_not_depend_on_worker_count():
    base = ["sweep", "--claims", "r4_formula,main_n2", "--pmin", "7", "--pmax", "31", "--no-cache"]
    assert run(*base)[1] == run(*base, "--jobs", "3")[1]


def test_env_var_selects_cache(isolated_cache):
    assert default_cache_path() == isolated_cache
    run("verify", "--claim", "zhao", "--p", "7")
    assert ("zhao", 7, None, None) in scan(isolated_cache).good


def test_cache_rejects_tampering_and_stale_lines(tmp_path):
    path = tmp_path / "c.jsonl"
    good = encode(("zhao", 5, None, None), Residue(3, Modulus(5, 1)))
    tampered = good.replace('"value":3', '"value":4')
    stale = json.loads(good)
    stale["engine"] = "other"
    path.write_text("\n".join([good, tampered, "{not json", json.dumps(stale)]) + "\n")
    result = scan(path)
    assert list(result.good) == [("zhao", 5, None, None)]
    assert result.corrupted == [2, 3, 4]  # stale line's digest no longer matches
    cache = ResidueCache(path)
    assert cache.get(("zhao", 5, None, None)).v == 3
    assert cache.get(("zhao", 7, None, None)) is None
    assert (cache.hits, cache.misses) == (1, 1)
    assert ENGINE_VERSION == "mhscong-1"


def test_cache_ignores_other_engine_versions(tmp_path):
    import hashlib

    path = tmp_path / "c.jsonl"
    fields = {"claim": "zhao", "p": 5, "r": None, "m": None, "value": 3, "exponent": 1,
              "engine": "mhscong-0"}
    blob = json.dumps(fields, sort_keys=True, separators=(",", ":"))
    fields["digest"] = hashlib.sha256(blob.encode()).hexdigest()
    path.write_text(json.dumps(fields) + "\n")
    result = scan(path)
    assert result.good == {} and result.stale == 1 and result.corrupted == []


def test_discover_cli():
    code, text = run("discover", "--target", "zhao", "--weight", "3", "--primes", "30")
    assert code == 0
    fields = dict(line.split("\t", 1) for line in text.strip().split("\n"))
    assert fields["result"] == "relation" and fields["coefficients"] == "-2"

    code, text = run("discover", "--target", "r8", "--m", "2", "--weight", "8",
                     "--primes", "40", "--format", "json")
    rec = json.loads(text)
    assert code == 0 and rec["coefficients"] == ["2688"]

    code, text = run("discover", "--target", "t6_r2", "--weight", "7", "--primes", "15",
                     "--height-bound", "1e12")
    assert code == 0 and "NoResult" in text

    assert run("discover", "--target", "nope")[0] == 2
    assert run("discover", "--target", "r8", "--primes", "5")[0] == 2  # missing --m


def test_selftest_quick_and_corruption(tmp_path):
    path = tmp_path / "c.jsonl"
    assert run("verify", "--claim", "zhao", "--p", "7", "--cache", str(path))[0] == 0
    code, text = run("selftest", "--quick", "--cache", str(path))
    assert code == 0 and "FAIL" not in text
    line = path.read_text().strip()
    path.write_text(line.replace('"value":', '"value":1') + "\n")
    code, text = run("selftest", "--quick", "--cache", str(path))
    assert code == 1 and "corrupted" in text


def test_selftest_detects_wrong_cached_value(tmp_path):
    path = tmp_path / "c.jsonl"
    path.write_text(encode(("zhao", 7, None, None), Residue(2, Modulus(7, 1))) + "\n")  # true value is 1
    code, text = run("selftest", "--cache", str(path))
    assert code == 1 and "recomputed" in text


def test_list_prints_every_claim():
    code, text = run("list")
    ids = [line.split("\t")[0] for line in text.strip().split("\n")]
    assert code == 0 and "zhao" in ids and "conj_r12" in ids
