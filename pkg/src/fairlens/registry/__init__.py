"""Public registry service: report submission, audit trail, badges, ledger."""

from .config import ManualClock, RegistryConfig, SystemClock, load_config
from .service import create_app
from .store import RegistryStore

__all__ = [
    "ManualClock",
    "RegistryConfig",
    "RegistryStore",
    "SystemClock",
    "create_app",
    "load_config",
]
