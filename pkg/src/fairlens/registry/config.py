"""Registry configuration and time sources.

One JSON config file carries everything operational: listen address, data
directory, the bearer-token table, and issuer public keys. The environment
variables FAIRLENS_DATA_DIR and FAIRLENS_LISTEN override their file
counterparts so deployments can relocate state without editing config.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, field
from datetime import datetime, timedelta, timezone
from pathlib import Path

from ..errors import ConfigurationError

DATA_DIR_ENV = "FAIRLENS_DATA_DIR"
LISTEN_ENV = "FAIRLENS_LISTEN"
DEFAULT_FREQUENCY_DAYS = 365.0

__all__ = [
    "DATA_DIR_ENV",
    "DEFAULT_FREQUENCY_DAYS",
    "LISTEN_ENV",
    "ManualClock",
    "RegistryConfig",
    "SystemClock",
    "TokenIdentity",
    "load_config",
]


class SystemClock:
    def now(self) -> datetime:
        return datetime.now(timezone.utc)


class ManualClock:
    """Settable clock so staleness rules are testable without waiting a year."""

    def __init__(self, start: datetime):
        if start.tzinfo is None:
            raise ConfigurationError("manual clock needs an aware datetime")
        self._now = start.astimezone(timezone.utc)

    def now(self) -> datetime:
        return self._now

    def advance(self, seconds: float) -> None:
        self._now += timedelta(seconds=seconds)

    def set(self, instant: datetime) -> None:
        if instant.tzinfo is None:
            raise ConfigurationError("manual clock needs an aware datetime")
        self._now = instant.astimezone(timezone.utc)


@dataclass(frozen=True)
class TokenIdentity:
    """What one bearer token is allowed to do."""

    role: str
    vendor_id: str | None = None
    auditor_id: str | None = None

    def __post_init__(self) -> None:
        if self.role not in ("vendor", "auditor"):
            raise ConfigurationError(f"token role must be vendor or auditor, got {self.role!r}")
        if self.role == "vendor" and not self.vendor_id:
            raise ConfigurationError("vendor token needs a vendor_id")
        if self.role == "auditor" and not self.auditor_id:
            raise ConfigurationError("auditor token needs an auditor_id")


@dataclass(frozen=True)
class RegistryConfig:
    data_dir: Path
    listen_host: str = "127.0.0.1"
    listen_port: int = 8310
    tokens: dict[str, TokenIdentity] = field(default_factory=dict)
    issuer_keys: dict[str, str] = field(default_factory=dict)
    default_frequency_days: float = DEFAULT_FREQUENCY_DAYS

    def __post_init__(self) -> None:
        if not 0 < self.listen_port < 65536:
            raise ConfigurationError(f"listen_port out of range: {self.listen_port}")
        if self.default_frequency_days <= 0:
            raise ConfigurationError("default_frequency_days must be > 0")


def _parse_listen(value: str) -> tuple[str, int]:
    host, sep, port = value.rpartition(":")
    if not sep or not host:
        raise ConfigurationError(f"listen address must be host:port, got {value!r}")
    try:
        return host, int(port)
    except ValueError:
        raise ConfigurationError(f"listen port must be an integer, got {port!r}") from None


def load_config(path: str | Path | None = None, env: dict | None = None) -> RegistryConfig:
    """Read the config file, then apply environment overrides.

    A missing path yields a default config (useful for throwaway instances);
    the data directory must then come from the environment.
    """
    env = os.environ if env is None else env
    doc: dict = {}
    if path is not None:
        try:
            doc = json.loads(Path(path).read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise ConfigurationError(f"config file not found: {path}") from None
        except ValueError as exc:
            raise ConfigurationError(f"config file {path} is not valid JSON: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigurationError("config file must contain a JSON object")

    data_dir = env.get(DATA_DIR_ENV) or doc.get("data_dir")
    if not data_dir:
        raise ConfigurationError(
            f"no data directory: set data_dir in config or {DATA_DIR_ENV} in the environment"
        )
    listen = env.get(LISTEN_ENV) or doc.get("listen", "127.0.0.1:8310")
    host, port = _parse_listen(listen)

    tokens: dict[str, TokenIdentity] = {}
    raw_tokens = doc.get("tokens", {})
    if not isinstance(raw_tokens, dict):
        raise ConfigurationError("tokens must map token strings to identity objects")
    for token, ident in raw_tokens.items():
        if not isinstance(ident, dict):
            raise ConfigurationError(f"token entry for {token!r} must be an object")
        tokens[token] = TokenIdentity(
            role=ident.get("role", ""),
            vendor_id=ident.get("vendor_id"),
            auditor_id=ident.get("auditor_id"),
        )

    issuer_keys = doc.get("issuer_keys", {})
    if not isinstance(issuer_keys, dict) or not all(
        isinstance(k, str) and isinstance(v, str) for k, v in issuer_keys.items()
    ):
        raise ConfigurationError("issuer_keys must map issuer ids to hex public keys")

    return RegistryConfig(
        data_dir=Path(data_dir),
        listen_host=host,
        listen_port=port,
        tokens=tokens,
        issuer_keys=dict(issuer_keys),
        default_frequency_days=float(doc.get("default_frequency_days", DEFAULT_FREQUENCY_DAYS)),
    )
