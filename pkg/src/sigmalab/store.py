"""Persistence: on-disk factorization cache and report serialization.

Cache file format: UTF-8 text, one entry per line,

    <value> <p1>^<e1> <p2>^<e2> ...

decimal, space-separated, newline-terminated.  Entries are keyed by value
only.  Corrupt lines (parse failure, product mismatch, or a torn final
line with no terminating newline) are skipped on load and reported, never
letting them poison valid entries.

Reports serialize as JSON Lines with canonical field order so identical
runs are byte-comparable; scan tables can also go out as CSV.
"""

import csv
import json
import os
from dataclasses import dataclass
from enum import Enum
from fractions import Fraction

from sigmalab.arith import (
    DEFAULT_BUDGET,
    Budget,
    Factorization,
    PrimePower,
    WorkMeter,
    factor,
    is_prime,
)


class CorruptEntry(ValueError):
    """Cache line failed to parse or failed the product check."""


@dataclass(frozen=True)
class SkippedLine:
    lineno: int
    reason: str


def _parse_line(line: str) -> Factorization:
    fields = line.split()
    if not fields:
        raise CorruptEntry("empty line")
    try:
        value = int(fields[0])
        pairs = []
        for tok in fields[1:]:
            p, _, e = tok.partition("^")
            pairs.append((int(p), int(e)))
    except ValueError as exc:
        raise CorruptEntry(f"unparseable: {exc}") from None
    try:
        f = Factorization(value, tuple(PrimePower(p, e) for p, e in pairs))
    except ValueError as exc:
        raise CorruptEntry(str(exc)) from None
    for p, _ in pairs:
        if not is_prime(p):
            raise CorruptEntry(f"composite part {p}")
    return f


def _format_line(f: Factorization) -> str:
    toks = [str(f.value)]
    toks.extend(f"{pp.prime}^{pp.exponent}" for pp in f.parts)
    return " ".join(toks) + "\n"


class FactorCache:
    """Value-keyed factorization cache with append-on-flush persistence.

    Many readers are fine; writes must stay funneled through one holder
    of the cache object (the CLI parent process in scans).
    """

    def __init__(self, path=None):
        self.path = path
        self._entries = {}
        self._pending = []
        self.skipped = []
        if path is not None and os.path.exists(path):
            self._load()

    def _load(self):
        with open(self.path, "r", encoding="utf-8") as fh:
            raw = fh.read()
        lines = raw.split("\n")
        # A non-empty final chunk means the last write was torn mid-line.
        torn_tail = lines[-1] != ""
        body = lines[:-1]
        for i, line in enumerate(body, start=1):
            if not line.strip():
                continue
            try:
                f = _parse_line(line)
            except CorruptEntry as exc:
                self.skipped.append(SkippedLine(i, str(exc)))
                continue
            self._entries[f.value] = f
        if torn_tail:
            self.skipped.append(SkippedLine(len(lines), "no terminating newline"))

    def __len__(self):
        return len(self._entries)

    def lookup(self, value: int):
        """Stored factorization for value, or None."""
        return self._entries.get(value)

    def insert(self, f: Factorization) -> bool:
        """Add an entry; idempotent.  Returns True when it was new."""
        if f.value in self._entries:
            return False
        self._entries[f.value] = f
        self._pending.append(f)
        return True

    def update(self, other_entries):
        """Merge factorizations gathered elsewhere (e.g. by scan workers)."""
        for f in other_entries:
            self.insert(f)

    def flush(self):
        """Append pending entries to disk; each line lands whole."""
        if self.path is None or not self._pending:
            self._pending.clear()
            return
        with open(self.path, "a", encoding="utf-8") as fh:
            for f in self._pending:
                fh.write(_format_line(f))
            fh.flush()
        self._pending.clear()

    def entries(self):
        return list(self._entries.values())

    def pending_entries(self):
        """Entries inserted since the last flush (or load)."""
        return list(self._pending)


def cached_factor(
    n: int,
    budget: Budget = DEFAULT_BUDGET,
    meter: WorkMeter = None,
    cache: FactorCache = None,
) -> Factorization:
    """factor() with a cache in front; inserts on miss."""
    if cache is not None:
        hit = cache.lookup(n)
        if hit is not None:
            return hit
    f = factor(n, budget=budget, meter=meter)
    if cache is not None:
        cache.insert(f)
    return f


# --- report emission ----------------------------------------------------


def to_jsonable(obj):
    """Recursively convert reports to JSON-ready structures with stable order."""
    if hasattr(obj, "to_json_dict"):
        return to_jsonable(obj.to_json_dict())
    if isinstance(obj, Factorization):
        return {"value": obj.value, "parts": [[p, e] for p, e in obj.pairs()]}
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, dict):
        return {k: to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, Fraction):
        return {"num": obj.numerator, "den": obj.denominator}
    return obj


def emit_record(record, sink):
    """Append one JSON Lines record to a writable text sink."""
    sink.write(json.dumps(to_jsonable(record), separators=(",", ":")) + "\n")


def emit_jsonl(records, sink):
    for rec in records:
        emit_record(rec, sink)


def emit_csv(rows, header, sink):
    """Write a CSV table with '' for missing values; deterministic."""
    writer = csv.writer(sink, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow(["" if v is None else v for v in row])
