"""RFC 3339 UTC timestamps, seconds precision.

Stored timestamp strings are never reformatted: digests and signatures cover
the exact string, so parsing is for validation and arithmetic only.
"""

from __future__ import annotations

from datetime import datetime, timezone

from .errors import ValidationError

__all__ = ["format_utc", "now_utc", "parse_rfc3339"]


def format_utc(dt: datetime) -> str:
    """Format an aware datetime as ``YYYY-MM-DDTHH:MM:SSZ``."""
    if dt.tzinfo is None:
        raise ValidationError("naive datetime cannot be formatted as UTC")
    return dt.astimezone(timezone.utc).strftime("%Y-%m-%dT%H:%M:%SZ")


def now_utc() -> str:
    return format_utc(datetime.now(timezone.utc))


def parse_rfc3339(value: str) -> datetime:
    """Parse an RFC 3339 instant; reject naive or malformed values."""
    if not isinstance(value, str) or not value:
        raise ValidationError(f"timestamp must be a non-empty string, got {value!r}")
    text = value[:-1] + "+00:00" if value.endswith("Z") else value
    try:
        parsed = datetime.fromisoformat(text)
    except ValueError as exc:
        raise ValidationError(f"malformed RFC 3339 timestamp {value!r}") from exc
    if parsed.tzinfo is None:
        raise ValidationError(f"timestamp {value!r} lacks a UTC offset")
    return parsed.astimezone(timezone.utc)
