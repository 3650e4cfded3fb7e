"""Command-line front end: ``mhscong verify | sweep | discover | selftest | list``.

Exit codes: 0 when everything checked passes, 1 when something fails, 2 for
usage errors and points outside a claim's domain.
"""

from __future__ import annotations

import argparse
import json
import sys
from decimal import Decimal, InvalidOperation
from fractions import Fraction
from pathlib import Path
from typing import Callable, Iterable, Sequence, TextIO

from . import claims as C
from .arith import Modulus, primes_between
from .cache import CACHE_ENV, ResidueCache, default_cache_path, scan
from .discover import (
    DEFAULT_HEIGHT_BOUND,
    TARGETS,
    DiscoveryReport,
    discover_target,
    target_primes,
    target_value,
    target_window,
)
from .errors import MhsError

COLUMNS = ("claim", "p", "r", "m", "lhs", "rhs", "modulus", "status")


# ---- argument helpers -----------------------------------------------------------


def parse_range(text: str) -> list[int]:
    """``"3"``, ``"1..4"`` (inclusive) or comma-separated mixtures of both."""
    out: list[int] = []
    try:
        for part in text.split(","):
            part = part.strip()
            if ".." in part:
                lo, hi = part.split("..", 1)
                out.extend(range(int(lo), int(hi) + 1))
            elif part:
                out.append(int(part))
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use a..b") from None
    if not out:
        raise argparse.ArgumentTypeError(f"empty range {text!r}")
    return out


def parse_height(text: str) -> int:
    """Integers, also written like ``1e12``."""
    try:
        value = Decimal(text)
    except InvalidOperation:
        raise argparse.ArgumentTypeError(f"bad height bound {text!r}") from None
    if value != value.to_integral_value() or value < 1:
        raise argparse.ArgumentTypeError(f"height bound must be a positive integer: {text}")
    return int(value)


def _single(values: list[int] | None, flag: str) -> int | None:
    if values is None:
        return None
    if len(values) != 1:
        raise argparse.ArgumentTypeError(f"{flag} takes a single value here")
    return values[0]


def _open_cache(args: argparse.Namespace) -> ResidueCache | None:
    if getattr(args, "no_cache", False):
        return None
    return ResidueCache(args.cache or default_cache_path())


# ---- report formatting ----------------------------------------------------------


def record_fields(rec: C.VerificationRecord) -> dict:
    status = rec.status if not rec.reason or rec.status == "pass" else f"{rec.status}({rec.reason})"
    return {
        "claim": rec.claim,
        "p": rec.p,
        "r": rec.r,
        "m": rec.m,
        "lhs": rec.lhs.v if rec.lhs is not None else None,
        "rhs": rec.rhs.v if rec.rhs is not None else None,
        "modulus": rec.modulus or None,
        "status": status,
    }


def format_records(records: Iterable[C.VerificationRecord], fmt: str) -> str:
    lines = []
    if fmt == "tsv":
        lines.append("\t".join(COLUMNS))
        for rec in records:
            f = record_fields(rec)
            lines.append("\t".join("-" if f[k] is None else str(f[k]) for k in COLUMNS))
    else:
        for rec in records:
            lines.append(json.dumps(record_fields(rec), separators=(",", ":")))
    return "\n".join(lines) + "\n"


def _frac(x: Fraction) -> str:
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


def format_discovery(rep: DiscoveryReport, fmt: str) -> str:
    out = rep.outcome
    fields: dict = {
        "target": rep.target,
        "m": rep.m,
        "primes": f"{len(rep.primes)} ({rep.primes[0]}..{rep.primes[-1]})",
        "basis": list(rep.labels),
    }
    if out:
        fields.update(
            result="relation",
            coefficients=[_frac(c) for c in out.coefficients],
            relation=list(out.relation_vector),
            verified=out.verified,
        )
        if out.alternatives:
            fields["alternatives"] = [list(v) for v in out.alternatives]
    else:
        fields.update(result="NoResult", height_bound=out.height_bound,
                      shortest_height=out.shortest_height, reason=out.reason)
    if fmt == "json":
        return json.dumps(fields, separators=(",", ":")) + "\n"
    lines = []
    for k, v in fields.items():
        if isinstance(v, list):
            v = " ".join(map(str, v))
        lines.append(f"{k}\t{'-' if v is None else v}")
    return "\n".join(lines) + "\n"


# ---- subcommands -----------------------------------------------------------------


def run_verify(args: argparse.Namespace, out: TextIO) -> int:
    try:
        claim = C.get_claim(args.claim)
        r = _single(args.r, "--r")
        m = _single(args.m, "--m")
    except (KeyError, argparse.ArgumentTypeError) as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    cache = _open_cache(args)
    key = (claim.id, args.p, r, m)
    hit = cache.get(key) if cache is not None else None
    rec = C.verify_claim(claim, args.p, r, m, lhs=hit)
    out.write(format_records([rec], args.format))
    if rec.status == "skipped":
        print(f"error: {rec.reason}", file=sys.stderr)
        return 2
    if cache is not None and hit is None and rec.lhs is not None:
        cache.put(key, rec.lhs)
        cache.flush()
    return 0 if rec.passed else 1


def run_sweep(args: argparse.Namespace, out: TextIO) -> int:
    try:
        ids = [s for s in args.claims.split(",") if s]
        C.select_claims(ids)
    except KeyError as exc:
        print(f"error: {exc.args[0]}", file=sys.stderr)
        return 2
    if args.pmax < args.pmin:
        print("error: --pmax is below --pmin", file=sys.stderr)
        return 2
    cache = _open_cache(args)
    records = C.sweep_claims(ids, primes_between(args.pmin, args.pmax), args.r, args.m,
                             jobs=args.jobs, cache=cache)
    if cache is not None:
        cache.flush()
    text = format_records(records, args.format)
    if args.output:
        Path(args.output).write_text(text, encoding="utf-8")
    else:
        out.write(text)
    failed = [r for r in records if r.status == "fail"]
    print(f"{len(records)} points, {len(failed)} failed", file=sys.stderr)
    return 1 if failed else 0


def run_discover(args: argparse.Namespace, out: TextIO) -> int:
    target = TARGETS.get(args.target)
    if target is None:
        print(f"error: unknown target {args.target!r}; known: {', '.join(TARGETS)}",
              file=sys.stderr)
        return 2
    try:
        m = _single(args.m, "--m")
        if target.uses_m and m is None:
            raise argparse.ArgumentTypeError(f"target {target.name} needs --m")
        if not target.uses_m and m is not None:
            raise argparse.ArgumentTypeError(f"target {target.name} does not take --m")
        cache = _open_cache(args)
        primes = target_primes(target, args.primes, args.weight)
        tag = f"target:{target.name}"

        def lookup(p: int):
            return cache.get((tag, p, None, m)) if cache is not None else None

        window = target_window(target, primes, m, lookup)
        if cache is not None:
            for p in primes:
                cache.put((tag, p, None, m), window[p])
            cache.flush()
        rep = discover_target(target, args.weight, args.primes, m, args.height_bound,
                              args.normalization, target_entries=window)
    except (argparse.ArgumentTypeError, MhsError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    out.write(format_discovery(rep, args.format))
    return 0


# ---- selftest ------------------------------------------------------------------


def _oracle_checks(quick: bool) -> list[tuple[str, Callable[[], list[str]]]]:
    from .bernoulli import kummer_check, power_sum_direct, power_sum_formula
    from .mhs import Index, stuffle_check
    from .sums import r_nm_fast, r_nm_naive, t_n_fast, t_n_naive

    small = [5, 7] if quick else [5, 7, 11]

    def tn() -> list[str]:
        bad = []
        for n in (2, 3, 4):
            for p in small:
                if p <= n:
                    continue
                for r in (1, 2):
                    mod = Modulus(p, r + 2)
                    if t_n_fast(n, p, r, mod) != t_n_naive(n, p, r, mod):
                        bad.append(f"T_{n}({p},{r})")
        return bad

    def rnm() -> list[str]:
        bad = []
        for n in range(2, 7 if not quick else 5):
            for m in range(1, n):
                for p in (small + [13] if not quick else small):
                    if p <= n:
                        continue
                    mod = Modulus(p, 2)
                    if r_nm_fast(n, m, p, mod) != r_nm_naive(n, m, p, mod):
                        bad.append(f"R_{n}^({m})({p})")
        return bad

    def stuffle() -> list[str]:
        bad = []
        idx = [Index((a,)) for a in (1, 2, 3)] + [Index((1, 1)), Index((1, 2)), Index((2, 1))]
        for p in small:
            for s in idx:
                for t in idx:
                    if s.weight + t.weight > 5:
                        continue
                    if not stuffle_check(s, t, p * p, p, Modulus(p, 3)):
                        bad.append(f"{s}*{t} at p={p}")
        return bad

    def powersum() -> list[str]:
        bad = []
        mod = Modulus(10007, 1)
        for m in range(0, 13):
            for n in range(1, 51, 7 if quick else 1):
                exact = power_sum_formula(m, n)
                if exact.denominator != 1 or power_sum_direct(m, n, mod) != exact.numerator:
                    bad.append(f"m={m}, n={n}")
        return bad

    def kummer() -> list[str]:
        bad = []
        for p in (5, 7, 11, 13):
            evens = [k for k in range(2, 25, 2) if k % (p - 1)]
            for i, a in enumerate(evens):
                for b in evens[i + 1 :]:
                    if (a - b) % (p - 1) == 0 and not kummer_check(p, a, b).holds:
                        bad.append(f"p={p}: B_{a}/{a} vs B_{b}/{b}")
        return bad

    return [("t_n fast = naive", tn), ("r_nm fast = naive", rnm), ("stuffle", stuffle),
            ("power sums", powersum), ("kummer", kummer)]


def check_cache(path: Path, recompute: bool) -> list[str]:
    """Digest check of every line; optionally recompute every cached value."""
    result = scan(path)
    bad = [f"line {n}: corrupted entry" for n in result.corrupted]
    if not recompute:
        return bad
    for (claim, p, r, m), value in sorted(result.good.items(), key=lambda kv: str(kv[0])):
        try:
            if claim.startswith("target:"):
                fresh = target_value(TARGETS[claim.split(":", 1)[1]], p, m)
            else:
                fresh = C.evaluate_lhs(C.get_claim(claim), p, r, m)
        except (KeyError, MhsError) as exc:
            bad.append(f"{claim} p={p} r={r} m={m}: cannot recompute ({exc})")
            continue
        if fresh != value:
            bad.append(f"{claim} p={p} r={r} m={m}: cached {value.v}, recomputed {fresh.v}")
    return bad


def run_selftest(args: argparse.Namespace, out: TextIO) -> int:
    failures = 0
    checks = _oracle_checks(args.quick)
    path = Path(args.cache) if args.cache else default_cache_path()
    if path.exists():
        checks.append(("cache " + str(path), lambda: check_cache(path, not args.quick)))
    for name, fn in checks:
        bad = fn()
        if bad:
            failures += 1
            out.write(f"FAIL\t{name}\t{'; '.join(bad[:5])}\n")
        else:
            out.write(f"ok\t{name}\n")
    return 1 if failures else 0


def run_list(args: argparse.Namespace, out: TextIO) -> int:
    for c in C.list_claims():
        dom = c.domain
        extra = []
        if dom.uses_r:
            extra.append(f"r>={dom.r_min}" + (f",r<={dom.r_max}" if dom.r_max else ""))
        if dom.m_is_class:
            extra.append("m=x in 1..p-1")
        elif dom.uses_m:
            extra.append(f"m in {dom.m_min}..{dom.m_max}")
        c0, c1 = c.modulus
        mod = f"p^({c0}+{c1}r)" if c1 else f"p^{c0}"
        out.write("\t".join([c.id, mod, f"p>={dom.p_min}", " ".join(extra) or "-",
                             c.note or "-"]) + "\n")
    return 0


# ---- entry point -----------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="mhscong",
        description="Verify and discover congruences for multiple harmonic and composition sums.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> None:
        p.add_argument("--format", choices=("tsv", "json"), default="tsv")
        p.add_argument("--cache", metavar="PATH",
                       help=f"residue cache file (default ${CACHE_ENV} or ~/.cache/mhscong)")
        p.add_argument("--no-cache", action="store_true", help="do not read or write the cache")

    v = sub.add_parser("verify", help="check one claim at one point")
    v.add_argument("--claim", required=True)
    v.add_argument("--p", type=int, required=True)
    v.add_argument("--r", type=parse_range)
    v.add_argument("--m", type=parse_range, help="m, or the residue class x for per-x claims")
    common(v)

    s = sub.add_parser("sweep", help="check claims over a prime range")
    s.add_argument("--claims", required=True, help="comma-separated claim ids or families")
    s.add_argument("--pmin", type=int, default=3)
    s.add_argument("--pmax", type=int, required=True)
    s.add_argument("--r", type=parse_range, help="e.g. 1..3 (default: each claim's own range)")
    s.add_argument("--m", type=parse_range, help="e.g. 1..4 (default: each claim's own range)")
    s.add_argument("--jobs", type=int, default=1)
    s.add_argument("--output", metavar="FILE")
    common(s)

    d = sub.add_parser("discover", help="find a Bernoulli-monomial relation (PSLQ-style, via LLL)")
    d.add_argument("--target", required=True, help=", ".join(TARGETS))
    d.add_argument("--weight", type=int)
    d.add_argument("--primes", type=int, default=30, help="number of primes in the window")
    d.add_argument("--m", type=parse_range)
    d.add_argument("--height-bound", type=parse_height, default=DEFAULT_HEIGHT_BOUND)
    d.add_argument("--normalization", choices=("B", "beta"), default="B")
    common(d)

    t = sub.add_parser("selftest", help="oracle and invariant checks, plus cache integrity")
    t.add_argument("--quick", action="store_true")
    t.add_argument("--cache", metavar="PATH")

    sub.add_parser("list", help="print the claim registry")
    return parser


def main(argv: Sequence[str] | None = None, out: TextIO | None = None) -> int:
    args = build_parser().parse_args(argv)
    out = out or sys.stdout
    handler = {
        "verify": run_verify,
        "sweep": run_sweep,
        "discover": run_discover,
        "selftest": run_selftest,
        "list": run_list,
    }[args.command]
    return handler(args, out)


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":  # pragma: no cover
    main_entry()
