"""Append-only hash chain over published document digests.

One file, one canonical JSON document per line, each entry committing to its
predecessor's hash. Verification re-derives every hash and link from the raw
line bytes, so any single-bit change to the file is attributable to the
earliest line it corrupts: a flip that breaks UTF-8 or JSON fails parsing, a
flip inside a field fails hash recomputation, and a flip that survives both
(whitespace, key order) fails the byte-exact canonical-form comparison.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Iterator

from .canonical import canonical_dumps, is_hex_digest, require_hex_digest, sha256_hex
from .errors import ValidationError
from .timestamps import now_utc, parse_rfc3339

GENESIS_PREV_HASH = "0" * 64
_ENTRY_KEYS = frozenset({"index", "prev_hash", "payload_digest", "timestamp", "entry_hash"})

__all__ = [
    "ChainVerification",
    "GENESIS_PREV_HASH",
    "Ledger",
    "LedgerEntry",
    "entry_hash_of",
    "verify_chain",
]


def entry_hash_of(index: int, prev_hash: str, payload_digest: str, timestamp: str) -> str:
    """Hash of one entry's fields in a fixed newline-delimited layout."""
    return sha256_hex(f"{index}\n{prev_hash}\n{payload_digest}\n{timestamp}\n".encode("utf-8"))


@dataclass(frozen=True)
class LedgerEntry:
    index: int
    prev_hash: str
    payload_digest: str
    timestamp: str
    entry_hash: str

    def __post_init__(self) -> None:
        if self.index < 0:
            raise ValidationError(f"index must be >= 0, got {self.index}")
        require_hex_digest(self.payload_digest, "payload_digest")
        if self.index == 0:
            if self.prev_hash != GENESIS_PREV_HASH:
                raise ValidationError("genesis entry must carry the all-zero prev_hash")
        else:
            require_hex_digest(self.prev_hash, "prev_hash")
        parse_rfc3339(self.timestamp)
        expected = entry_hash_of(self.index, self.prev_hash, self.payload_digest, self.timestamp)
        if self.entry_hash != expected:
            raise ValidationError(f"entry_hash does not match fields at index {self.index}")

    def to_doc(self) -> dict:
        return {
            "index": self.index,
            "prev_hash": self.prev_hash,
            "payload_digest": self.payload_digest,
            "timestamp": self.timestamp,
            "entry_hash": self.entry_hash,
        }

    def line(self) -> str:
        return canonical_dumps(self.to_doc())


def _make_entry(index: int, prev_hash: str, payload_digest: str, timestamp: str) -> LedgerEntry:
    return LedgerEntry(
        index=index,
        prev_hash=prev_hash,
        payload_digest=payload_digest,
        timestamp=timestamp,
        entry_hash=entry_hash_of(index, prev_hash, payload_digest, timestamp),
    )


class Ledger:
    """Single-writer file-backed chain; readers can verify independently.

    The owning process serializes appends through one instance; the file is
    only ever extended, never rewritten.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        self._entries: list[LedgerEntry] = []
        if self.path.exists():
            self._entries = list(self._load())

    def _load(self) -> Iterator[LedgerEntry]:
        outcome = verify_chain(self.path)
        if not outcome.ok:
            raise ValidationError(
                f"ledger file {self.path} fails verification at index "
                f"{outcome.first_bad_index}: {outcome.reason}"
            )
        with self.path.open("r", encoding="utf-8") as fh:
            for line in fh:
                doc = json.loads(line)
                yield LedgerEntry(**doc)

    def __len__(self) -> int:
        return len(self._entries)

    def entries(self, start: int = 0, limit: int | None = None) -> tuple[LedgerEntry, ...]:
        if start < 0:
            raise ValidationError(f"start must be >= 0, got {start}")
        end = None if limit is None else start + limit
        return tuple(self._entries[start:end])

    def head(self) -> LedgerEntry | None:
        return self._entries[-1] if self._entries else None

    def append(self, payload_digest: str, *, timestamp: str | None = None) -> LedgerEntry:
        """Chain a new payload digest onto the head and persist it durably."""
        require_hex_digest(payload_digest, "payload_digest")
        head = self.head()
        entry = _make_entry(
            index=len(self._entries),
            prev_hash=head.entry_hash if head else GENESIS_PREV_HASH,
            payload_digest=payload_digest,
            timestamp=timestamp if timestamp is not None else now_utc(),
        )
        data = (entry.line() + "\n").encode("utf-8")
        with self.path.open("ab") as fh:
            fh.write(data)
            fh.flush()
            os.fsync(fh.fileno())
        self._entries.append(entry)
        return entry

    def append_report(self, report, *, timestamp: str | None = None) -> LedgerEntry:
        """Append a report-like object (anything exposing ``digest()``)."""
        return self.append(report.digest(), timestamp=timestamp)


@dataclass(frozen=True)
class ChainVerification:
    ok: bool
    length: int
    head_hash: str | None
    first_bad_index: int | None = None
    reason: str | None = None

    def to_doc(self) -> dict:
        return {
            "ok": self.ok,
            "length": self.length,
            "head_hash": self.head_hash,
            "first_bad_index": self.first_bad_index,
            "reason": self.reason,
        }


def _bad(index: int, reason: str, verified: int, head: str | None) -> ChainVerification:
    return ChainVerification(
        ok=False, length=verified, head_hash=head, first_bad_index=index, reason=reason
    )


def verify_chain(source: "Ledger | str | Path") -> ChainVerification:
    """Re-derive every hash and link from raw file bytes.

    Corruption is a return value, never an exception: the result carries the
    earliest offending line index and a reason. ``length`` counts the entries
    verified before the first failure.
    """
    path = source.path if isinstance(source, Ledger) else Path(source)
    if not path.exists():
        return ChainVerification(ok=True, length=0, head_hash=None)
    raw = path.read_bytes()
    if raw == b"":
        return ChainVerification(ok=True, length=0, head_hash=None)

    lines = raw.split(b"\n")
    if lines[-1] != b"":
        return _bad(len(lines) - 1, "file does not end with a newline", len(lines) - 1, None)
    lines = lines[:-1]

    prev_hash = GENESIS_PREV_HASH
    head: str | None = None
    for i, line in enumerate(lines):
        try:
            text = line.decode("utf-8")
        except UnicodeDecodeError:
            return _bad(i, "line is not valid UTF-8", i, head)
        try:
            doc = json.loads(text)
        except ValueError:
            return _bad(i, "line is not valid JSON", i, head)
        if not isinstance(doc, dict) or set(doc) != _ENTRY_KEYS:
            return _bad(i, "line does not carry exactly the entry fields", i, head)
        if doc["index"] is True or doc["index"] is False or doc["index"] != i:
            return _bad(i, f"index field is {doc['index']!r}, expected {i}", i, head)
        if doc["prev_hash"] != prev_hash:
            return _bad(i, "prev_hash does not match predecessor's entry_hash", i, head)
        if not is_hex_digest(doc["payload_digest"]):
            return _bad(i, "payload_digest is not a lowercase hex digest", i, head)
        try:
            parse_rfc3339(doc["timestamp"])
        except ValidationError:
            return _bad(i, "timestamp is not RFC 3339 UTC", i, head)
        expected = entry_hash_of(i, doc["prev_hash"], doc["payload_digest"], doc["timestamp"])
        if doc["entry_hash"] != expected:
            return _bad(i, "entry_hash does not match recomputation", i, head)
        # Byte-exact canonical form: catches mutations JSON parsing ignores.
        if text != canonical_dumps(doc):
            return _bad(i, "line bytes are not in canonical form", i, head)
        prev_hash = doc["entry_hash"]
        head = doc["entry_hash"]
    return ChainVerification(ok=True, length=len(lines), head_hash=head)
