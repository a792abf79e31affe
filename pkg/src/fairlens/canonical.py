"""Deterministic JSON canonicalization for content-addressed documents.

Canonical form:
- UTF-8 bytes, object keys sorted lexicographically by code point,
- no insignificant whitespace,
- numbers rendered as the shortest round-trip decimal (CPython float repr),
- negative zero normalized to zero,
- undefined values rendered as ``null``.

Non-finite floats are never emitted. A legitimate infinity (KL divergence on
disjoint support, an unbounded similarity ratio) must be converted to the
string sentinel :data:`INF` by the result builder before serialization; the
sentinel orders greater than any finite value via :func:`sentinel_to_float`.
"""

from __future__ import annotations

import hashlib
import json
import math
from typing import Any

from .errors import CanonicalizationError

INF = "inf"
DIGEST_HEX_LENGTH = 64

__all__ = [
    "DIGEST_HEX_LENGTH",
    "INF",
    "canonical_bytes",
    "canonical_digest",
    "canonical_dumps",
    "is_hex_digest",
    "require_hex_digest",
    "sentinel_to_float",
    "sha256_hex",
]


def _scrub(obj: Any, path: str) -> Any:
    """Validate types and normalize floats ahead of json.dumps."""
    if obj is None or isinstance(obj, (bool, int, str)):
        return obj
    if isinstance(obj, float):
        if not math.isfinite(obj):
            raise CanonicalizationError(f"non-finite number at {path or '$'}: {obj!r}")
        return 0.0 if obj == 0.0 else obj
    if isinstance(obj, dict):
        for key in obj:
            if not isinstance(key, str):
                raise CanonicalizationError(f"non-string key at {path or '$'}: {key!r}")
        return {k: _scrub(v, f"{path}.{k}") for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_scrub(v, f"{path}[{i}]") for i, v in enumerate(obj)]
    raise CanonicalizationError(f"unserializable value at {path or '$'}: {type(obj).__name__}")


def canonical_dumps(obj: Any) -> str:
    """Render *obj* as a canonical JSON string."""
    return json.dumps(
        _scrub(obj, ""),
        sort_keys=True,
        separators=(",", ":"),
        ensure_ascii=False,
        allow_nan=False,
    )


def canonical_bytes(obj: Any) -> bytes:
    """Render *obj* as canonical UTF-8 bytes."""
    return canonical_dumps(obj).encode("utf-8")


def sha256_hex(data: bytes) -> str:
    """Lowercase hex SHA-256 of *data*."""
    return hashlib.sha256(data).hexdigest()


def canonical_digest(obj: Any) -> str:
    """SHA-256 hex digest of the canonical bytes of *obj*."""
    return sha256_hex(canonical_bytes(obj))


def sentinel_to_float(value: Any) -> Any:
    """Map the ``"inf"`` sentinel back to ``math.inf`` for comparisons."""
    return math.inf if value == INF else value


def is_hex_digest(value: Any) -> bool:
    """True when *value* is a 64-character lowercase-hex SHA-256 string."""
    return (
        isinstance(value, str)
        and len(value) == DIGEST_HEX_LENGTH
        and all(c in "0123456789abcdef" for c in value)
    )


def require_hex_digest(value: Any, name: str) -> str:
    if not is_hex_digest(value):
        raise CanonicalizationError(f"{name} must be a 64-char lowercase hex digest, got {value!r}")
    return value
