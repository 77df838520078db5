"""Database module for the steady-state cache and run log."""

from .init import init_database, get_connection
from .queries import (
    config_key,
    store_steady_state,
    get_cached_steady_state,
    log_run,
    get_recent_runs,
)

__all__ = [
    "init_database",
    "get_connection",
    "config_key",
    "store_steady_state",
    "get_cached_steady_state",
    "log_run",
    "get_recent_runs",
]
