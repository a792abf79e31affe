import json

import pytest

from fairlens import canonical_digest
from fairlens.errors import CanonicalizationError, ValidationError
from fairlens.ledger import (
    GENESIS_PREV_HASH,
    ChainVerification,
    Ledger,
    LedgerEntry,
    entry_hash_of,
    verify_chain,
)


def digest_of(n: int) -> str:
    return canonical_digest({"n": n})


def build_ledger(path, count=3) -> Ledger:
    ledger = Ledger(path)
    for i in range(count):
        ledger.append(digest_of(i), timestamp=f"2026-01-01T00:{i:02d}:00Z")
    return ledger


def test_append_links_the_chain(tmp_path):
    ledger = build_ledger(tmp_path / "l.ndjson")
    entries = ledger.entries()
    assert [e.index for e in entries] == [0, 1, 2]
    assert entries[0].prev_hash == GENESIS_PREV_HASH
    assert entries[1].prev_hash == entries[0].entry_hash
    assert entries[2].prev_hash == entries[1].entry_hash
    assert ledger.head() == entries[2]


def test_entry_hash_layout():
    h = entry_hash_of(0, GENESIS_PREV_HASH, digest_of(0), "2026-01-01T00:00:00Z")
    entry = LedgerEntry(
        index=0,
        prev_hash=GENESIS_PREV_HASH,
        payload_digest=digest_of(0),
        timestamp="2026-01-01T00:00:00Z",
        entry_hash=h,
    )
    assert entry.entry_hash == h
    with pytest.raises(ValidationError):
        LedgerEntry(
            index=0,
            prev_hash=GENESIS_PREV_HASH,
            payload_digest=digest_of(0),
            timestamp="2026-01-01T00:00:00Z",
            entry_hash="0" * 64,
        )


def test_verify_ok(tmp_path):
    ledger = build_ledger(tmp_path / "l.ndjson", count=5)
    outcome = verify_chain(ledger)
    assert outcome == ChainVerification(ok=True, length=5, head_hash=ledger.head().entry_hash)


def test_missing_and_empty_files_verify_empty(tmp_path):
    assert verify_chain(tmp_path / "absent.ndjson") == ChainVerification(
        ok=True, length=0, head_hash=None
    )
    empty = tmp_path / "empty.ndjson"
    empty.write_bytes(b"")
    assert verify_chain(empty).ok is True


def test_reload_from_disk(tmp_path):
    path = tmp_path / "l.ndjson"
    original = build_ledger(path, count=4)
    reloaded = Ledger(path)
    assert reloaded.entries() == original.entries()
    # Appends continue the chain after a reload.
    entry = reloaded.append(digest_of(99), timestamp="2026-01-01T01:00:00Z")
    assert entry.index == 4
    assert entry.prev_hash == original.head().entry_hash


def test_loading_corrupt_file_raises(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path)
    raw = bytearray(path.read_bytes())
    raw[10] ^= 0x01
    path.write_bytes(bytes(raw))
    with pytest.raises(ValidationError):
        Ledger(path)


def test_entries_pagination(tmp_path):
    ledger = build_ledger(tmp_path / "l.ndjson", count=5)
    assert [e.index for e in ledger.entries(1, 2)] == [1, 2]
    assert [e.index for e in ledger.entries(4)] == [4]
    assert ledger.entries(9) == ()
    with pytest.raises(ValidationError):
        ledger.entries(-1)


def test_append_validates_inputs(tmp_path):
    ledger = Ledger(tmp_path / "l.ndjson")
    with pytest.raises(CanonicalizationError):
        ledger.append("not a digest")
    with pytest.raises(ValidationError):
        ledger.append(digest_of(0), timestamp="January 2026")


def test_missing_trailing_newline_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path)
    path.write_bytes(path.read_bytes()[:-1])
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert "newline" in outcome.reason


def test_truncation_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=3)
    lines = path.read_bytes().splitlines(keepends=True)
    # Dropping the last line leaves a valid shorter chain: undetectable from
    # the file alone, which is why the registry re-checks expected length.
    path.write_bytes(b"".join(lines[:2]))
    assert verify_chain(path).ok is True
    assert verify_chain(path).length == 2
    # Dropping an interior line breaks the links immediately.
    path.write_bytes(lines[0] + lines[2])
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert outcome.first_bad_index == 1


def test_reordering_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=3)
    lines = path.read_bytes().splitlines(keepends=True)
    path.write_bytes(lines[0] + lines[2] + lines[1])
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert outcome.first_bad_index == 1


def test_duplicate_line_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=2)
    lines = path.read_bytes().splitlines(keepends=True)
    path.write_bytes(lines[0] + lines[1] + lines[1])
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert outcome.first_bad_index == 2


def test_non_canonical_bytes_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=1)
    doc = json.loads(path.read_text().strip())
    # Same JSON value, different bytes: extra spaces survive parsing and
    # hashing of fields, only the canonical-form check can reject it.
    spaced = json.dumps(doc, sort_keys=True, separators=(", ", ": "))
    path.write_text(spaced + "\n")
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert outcome.first_bad_index == 0
    assert "canonical" in outcome.reason


def test_extra_field_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=1)
    doc = json.loads(path.read_text().strip())
    doc["note"] = "injected"
    from fairlens import canonical_dumps

    path.write_text(canonical_dumps(doc) + "\n")
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert "entry fields" in outcome.reason


def test_payload_swap_detected(tmp_path):
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=3)
    lines = path.read_text().splitlines()
    doc = json.loads(lines[1])
    doc["payload_digest"] = digest_of(99)
    from fairlens import canonical_dumps

    lines[1] = canonical_dumps(doc)
    path.write_text("\n".join(lines) + "\n")
    outcome = verify_chain(path)
    assert outcome.ok is False
    assert outcome.first_bad_index == 1
    assert "entry_hash" in outcome.reason


def test_every_single_bit_flip_detected_small(tmp_path):
    """Exhaustive bit-flip sweep on a 2-entry ledger (larger sweep in the
    acceptance suite)."""
    path = tmp_path / "l.ndjson"
    build_ledger(path, count=2)
    pristine = path.read_bytes()
    assert verify_chain(path).ok is True
    line_starts = []
    offset = 0
    for line in pristine.split(b"\n")[:-1]:
        line_starts.append(offset)
        offset += len(line) + 1
    for byte_index in range(len(pristine)):
        for bit in range(8):
            mutated = bytearray(pristine)
            mutated[byte_index] ^= 1 << bit
            path.write_bytes(bytes(mutated))
            outcome = verify_chain(path)
            assert outcome.ok is False, f"flip at byte {byte_index} bit {bit} undetected"
            # The failure is attributed to exactly the line holding the
            # flipped byte (a flipped newline merges into its own line).
            expected_line = max(i for i, s in enumerate(line_starts) if s <= byte_index)
            assert outcome.first_bad_index == expected_line
    path.write_bytes(pristine)
    assert verify_chain(path).ok is True
