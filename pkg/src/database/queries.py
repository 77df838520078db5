"""Database query functions."""

import hashlib
import json
from datetime import datetime
from pathlib import Path
from typing import Dict, List, Optional, Union

import numpy as np

from src.dynamics.evolution import SteadyStateResult
from src.model import SimulationConfig, config_to_dict
from .init import get_connection, init_database

DbPath = Optional[Union[str, Path]]


def config_key(config: SimulationConfig, method: str = "evolve") -> str:
    """SHA-256 of the canonical resolved configuration plus the solve method."""
    payload = json.dumps({"config": config_to_dict(config), "method": method}, sort_keys=True)
    return hashlib.sha256(payload.encode()).hexdigest()


def store_steady_state(config: SimulationConfig, result: SteadyStateResult,
                       method: str = "evolve", db_path: DbPath = None) -> str:
    """
    Store a steady-state result in the cache.

    Args:
        config: Configuration the result was computed for
        result: SteadyStateResult to store
        method: Requested solve method (part of the cache key)
        db_path: Database file (default DATABASE_PATH)

    Returns:
        The cache key
    """
    init_database(db_path)
    key = config_key(config, method)
    conn = get_connection(db_path)
    cursor = conn.cursor()
    cursor.execute("""
        INSERT INTO steady_states
            (cache_key, m, coupling, mu_hyd, mu_dist, method, distribution,
             converged, distance, time, n_hyd, n_dist, min_eig)
        VALUES (?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?, ?)
        ON CONFLICT(cache_key) DO UPDATE SET
            distribution = excluded.distribution,
            converged = excluded.converged,
            distance = excluded.distance,
            time = excluded.time,
            method = excluded.method,
            n_hyd = excluded.n_hyd,
            n_dist = excluded.n_dist,
            min_eig = excluded.min_eig
    """, (
        key,
        config.m,
        config.spec.coupling.value,
        config.rates.mu_hyd,
        config.rates.mu_dist,
        result.method,
        json.dumps([float(p) for p in result.distribution]),
        int(result.converged),
        float(result.distance),
        result.time,
        result.n_hyd,
        result.n_dist,
        result.min_eig,
    ))
    conn.commit()
    conn.close()
    return key


def get_cached_steady_state(config: SimulationConfig, method: str = "evolve",
                            db_path: DbPath = None) -> Optional[SteadyStateResult]:
    """Cached result for this configuration and method, or None."""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()
    cursor.execute("SELECT * FROM steady_states WHERE cache_key = ?", (config_key(config, method),))
    row = cursor.fetchone()
    conn.close()
    if row is None:
        return None
    return SteadyStateResult(
        distribution=np.array(json.loads(row["distribution"])),
        converged=bool(row["converged"]),
        distance=row["distance"],
        time=row["time"],
        method=row["method"],
        n_hyd=row["n_hyd"],
        n_dist=row["n_dist"],
        min_eig=row["min_eig"],
    )


def log_run(command: str, config: Dict, status: str, started_at: datetime,
            db_path: DbPath = None) -> int:
    """Record one CLI run; returns its id."""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()
    cursor.execute("""
        INSERT INTO runs (command, config, status, started_at, completed_at)
        VALUES (?, ?, ?, ?, ?)
    """, (command, json.dumps(config, sort_keys=True), status, started_at, datetime.now()))
    run_id = cursor.lastrowid
    conn.commit()
    conn.close()
    return run_id


def get_recent_runs(limit: int = 20, command: Optional[str] = None, db_path: DbPath = None) -> List[Dict]:
    """Most recent runs first."""
    init_database(db_path)
    conn = get_connection(db_path)
    cursor = conn.cursor()

    query = "SELECT id, command, config, status, started_at, completed_at FROM runs"
    params: list = []
    if command:
        query += " WHERE command = ?"
        params.append(command)
    query += " ORDER BY id DESC LIMIT ?"
    params.append(limit)

    cursor.execute(query, params)
    results = []
    for row in cursor.fetchall():
        run = dict(row)
        run["config"] = json.loads(run["config"])
        results.append(run)
    conn.close()
    return results
