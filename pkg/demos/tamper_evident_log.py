"""Append-only hash chain: build one, break one, catch it.

    python3 demos/tamper_evident_log.py
"""

import tempfile
from pathlib import Path

from fairlens import Ledger, canonical_digest, verify_chain

workdir = Path(tempfile.mkdtemp(prefix="ledger-demo-"))
path = workdir / "ledger.ndjson"

# Each entry binds its payload digest to the previous entry's hash, so the
# file can only grow at the end. Timestamps here are fixed for a stable demo.
ledger = Ledger(path)
for i in range(5):
    payload = {"report": f"service-v{i}", "n": i}
    entry = ledger.append(
        canonical_digest(payload), timestamp=f"2026-03-01T00:0{i}:00Z"
    )
    print(f"appended index {entry.index}  entry_hash {entry.entry_hash[:16]}…")

outcome = verify_chain(path)
print(f"\nverify: ok={outcome.ok} length={outcome.length}")

# Now play adversary: flip one bit somewhere in the middle of the file.
pristine = path.read_bytes()
raw = bytearray(pristine)
target = len(raw) // 2
raw[target] ^= 0x01
path.write_bytes(bytes(raw))
print(f"\nflipped one bit at byte offset {target}")

outcome = verify_chain(path)
print(f"verify: ok={outcome.ok} first_bad_index={outcome.first_bad_index}")
print(f"reason: {outcome.reason}")

# Putting the original bytes back heals the chain completely.
path.write_bytes(pristine)
print(f"\nrestored: ok={verify_chain(path).ok}")

# The one edit a hash chain cannot see is truncation from the tail: chop the
# last line and what remains is a shorter chain that still verifies.
lines = pristine.splitlines(keepends=True)
path.write_bytes(b"".join(lines[:-1]))
outcome = verify_chain(path)
print(f"after dropping the last line: ok={outcome.ok} length={outcome.length}")
print("that is why the registry also publishes the current head hash;")
print(f"a reader holding head {ledger.head().entry_hash[:16]}… rejects the short file.")
