"""Database initialization and connection management."""

import logging
import sqlite3
from pathlib import Path
import sys
from typing import Optional, Union

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from config import DATABASE_PATH

logger = logging.getLogger(__name__)


def get_connection(db_path: Optional[Union[str, Path]] = None) -> sqlite3.Connection:
    """Get a database connection (default: DATABASE_PATH)."""
    path = Path(db_path) if db_path is not None else DATABASE_PATH
    path.parent.mkdir(parents=True, exist_ok=True)
    conn = sqlite3.connect(path)
    conn.row_factory = sqlite3.Row
    return conn


def init_database(db_path: Optional[Union[str, Path]] = None):
    """Initialize the database schema."""
    conn = get_connection(db_path)
    cursor = conn.cursor()

    # Runs table - one row per CLI invocation
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS runs (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            command TEXT NOT NULL,
            config TEXT NOT NULL,
            status TEXT NOT NULL,
            started_at TIMESTAMP NOT NULL,
            completed_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    """)

    # Steady states - cached results keyed by the resolved configuration
    cursor.execute("""
        CREATE TABLE IF NOT EXISTS steady_states (
            id INTEGER PRIMARY KEY AUTOINCREMENT,
            cache_key TEXT UNIQUE NOT NULL,
            m INTEGER NOT NULL,
            coupling TEXT NOT NULL,
            mu_hyd REAL NOT NULL,
            mu_dist REAL NOT NULL,
            method TEXT NOT NULL,
            distribution TEXT NOT NULL,
            converged INTEGER NOT NULL,
            distance REAL,
            time REAL,
            n_hyd REAL,
            n_dist REAL,
            min_eig REAL,
            created_at TIMESTAMP DEFAULT CURRENT_TIMESTAMP
        )
    """)

    cursor.execute("CREATE INDEX IF NOT EXISTS idx_steady_model ON steady_states(m, coupling)")
    cursor.execute("CREATE INDEX IF NOT EXISTS idx_runs_command ON runs(command)")

    conn.commit()
    conn.close()
    logger.info("database initialized at %s", db_path or DATABASE_PATH)


if __name__ == "__main__":
    init_database()
    print(f"Database initialized at {DATABASE_PATH}")
