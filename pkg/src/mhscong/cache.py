"""Persistent JSON-lines cache of left-hand residues.

One line per ``(claim, p, r, m)`` key::

    {"claim": "zhao", "p": 5, "r": null, "m": null, "value": 3, "exponent": 1,
     "engine": "mhscong-1", "digest": "..."}

``digest`` is a SHA-256 over the other fields, so a line edited by hand or
truncated by a crash is detected and ignored.  Lines written by another
engine version are ignored too.  Only the process that owns the cache object
writes to the file.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

from .arith import Modulus, Residue

ENGINE_VERSION = "mhscong-1"
CACHE_ENV = "MHSCONG_CACHE"

Key = tuple[str, int, "int | None", "int | None"]


def default_cache_path() -> Path:
    env = os.environ.get(CACHE_ENV)
    if env:
        return Path(env)
    base = os.environ.get("XDG_CACHE_HOME") or Path.home() / ".cache"
    return Path(base) / "mhscong" / "residues.jsonl"


def _digest(fields: dict) -> str:
    blob = json.dumps(fields, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def encode(key: Key, value: Residue) -> str:
    claim, p, r, m = key
    fields = {
        "claim": claim, "p": p, "r": r, "m": m,
        "value": value.v, "exponent": value.modulus.a, "engine": ENGINE_VERSION,
    }
    fields["digest"] = _digest(fields)
    return json.dumps(fields, sort_keys=True, separators=(",", ":"))


@dataclass
class ScanResult:
    good: dict[Key, Residue] = field(default_factory=dict)
    corrupted: list[int] = field(default_factory=list)  # 1-based line numbers
    stale: int = 0


def scan(path: Path) -> ScanResult:
    out = ScanResult()
    if not path.exists():
        return out
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
                digest = rec.pop("digest")
                if _digest(rec) != digest:
                    raise ValueError("digest mismatch")
                if rec["engine"] != ENGINE_VERSION:
                    out.stale += 1
                    continue
                key = (rec["claim"], rec["p"], rec["r"], rec["m"])
                out.good[key] = Residue(rec["value"], Modulus(rec["p"], rec["exponent"]))
            except (ValueError, KeyError, TypeError, AttributeError):
                out.corrupted.append(lineno)
    return out


class ResidueCache:
    """In-memory view of the cache file plus an append-only writer."""

    def __init__(self, path: Path | str | None):
        self.path = Path(path) if path is not None else None
        result = scan(self.path) if self.path is not None else ScanResult()
        self._data = result.good
        self.corrupted = result.corrupted
        self.stale = result.stale
        self._pending: list[str] = []
        self.hits = 0
        self.misses = 0

    def get(self, key: Key) -> Residue | None:
        value = self._data.get(key)
        if value is None:
            self.misses += 1
        else:
            self.hits += 1
        return value

    def put(self, key: Key, value: Residue) -> None:
        if self._data.get(key) == value:
            return
        self._data[key] = value
        if self.path is not None:
            self._pending.append(encode(key, value))

    def flush(self) -> None:
        if self.path is None or not self._pending:
            return
        self.path.parent.mkdir(parents=True, exist_ok=True)
        with self.path.open("a", encoding="utf-8") as fh:
            fh.write("\n".join(self._pending) + "\n")
        self._pending.clear()

    def items(self) -> Iterator[tuple[Key, Residue]]:
        return iter(sorted(self._data.items(), key=lambda kv: _sort_key(kv[0])))

    def __len__(self) -> int:
        return len(self._data)


def _sort_key(key: Key) -> tuple:
    claim, p, r, m = key
    return (claim, p, -1 if r is None else r, -1 if m is None else m)
