from fractions import Fraction
from itertools import product

import pytest


@pytest.fixture(autouse=True)
def isolated_cache(tmp_path, monkeypatch):
    """Point the residue cache at a throwaway file for every test."""
    path = tmp_path / "residues.jsonl"
    monkeypatch.setenv("MHSCONG_CACHE", str(path))
    return path


def frac_mod(x: Fraction, q: int) -> int:
    """Independent reduction of a p-integral fraction modulo q."""
    return x.numerator * pow(x.denominator, -1, q) % q


def brute_compositions(n: int, total: int, p: int) -> Fraction:
    """Exact sum of 1/(i_1...i_n) over compositions of ``total`` with parts prime to p."""
    acc = Fraction(0)

    def walk(left: int, rem: int, prod: int) -> None:
        nonlocal acc
        if left == 1:
            if rem % p:
                acc += Fraction(1, prod * rem)
            return
        for i in range(1, rem - left + 2):
            if i % p:
                walk(left - 1, rem - i, prod * i)

    walk(n, total, 1)
    return acc


ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_report():
    """Collects one PASS/FAIL line per acceptance criterion."""

    def report(number: int, title: str, failures: list, detail: str = "") -> None:
        status = "PASS" if not failures else "FAIL"
        line = f"criterion {number:>2}: {status}  {title}"
        if detail:
            line += f"  [{detail}]"
        if failures:
            shown = "; ".join(map(str, failures[:6]))
            more = f" (+{len(failures) - 6} more)" if len(failures) > 6 else ""
            line += f"\n              failing: {shown}{more}"
        ACCEPTANCE_LINES.append(line)
        print(line)

    return report


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES, key=lambda s: int(s.split(":")[0].split()[1])):
            terminalreporter.write_line(line)
