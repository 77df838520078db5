"""Steady-state cache and run log."""

from datetime import datetime

import numpy as np

from src.database import (
    config_key,
    get_cached_steady_state,
    get_connection,
    get_recent_runs,
    init_database,
    log_run,
    store_steady_state,
)
from src.dynamics import SteadyStateResult


def _result(distribution=(0.25, 0.5, 0.25), converged=True):
    return SteadyStateResult(
        distribution=np.array(distribution),
        converged=converged,
        distance=3.5e-9,
        time=1230.0,
        method="evolve",
        n_hyd=0.0,
        n_dist=0.0,
        min_eig=-1e-15,
    )


class TestSchema:
    def test_tables_created(self, db_path):
        init_database(db_path)
        conn = get_connection(db_path)
        names = {row["name"] for row in conn.execute("SELECT name FROM sqlite_master WHERE type = 'table'")}
        conn.close()
        assert {"runs", "steady_states"} <= names


class TestSteadyStateCache:
    def test_store_and_fetch(self, config_factory, db_path):
        config = config_factory(m=2)
        store_steady_state(config, _result(), db_path=db_path)
        cached = get_cached_steady_state(config, db_path=db_path)
        assert np.array_equal(cached.distribution, [0.25, 0.5, 0.25])
        assert cached.converged
        assert cached.distance == 3.5e-9
        assert cached.method == "evolve"
        assert cached.state is None

    def test_miss_returns_none(self, config_factory, db_path):
        assert get_cached_steady_state(config_factory(m=2), db_path=db_path) is None

    def test_key_depends_on_method_and_rates(self, config_factory):
        config = config_factory(m=1)
        assert config_key(config, "evolve") != config_key(config, "direct")
        assert config_key(config) != config_key(config_factory(m=1, mu_dist=0.1))
        assert config_key(config) == config_key(config_factory(m=1))

    def test_overwrite_keeps_one_row(self, config_factory, db_path):
        config = config_factory(m=2)
        store_steady_state(config, _result(converged=False), db_path=db_path)
        store_steady_state(config, _result(), db_path=db_path)
        conn = get_connection(db_path)
        count = conn.execute("SELECT COUNT(*) FROM steady_states").fetchone()[0]
        conn.close()
        assert count == 1
        assert get_cached_steady_state(config, db_path=db_path).converged


class TestRunLog:
    def test_recent_runs_newest_first(self, db_path):
        started = datetime.now()
        first = log_run("steady", {"model": {"m": 1}}, "ok", started, db_path=db_path)
        second = log_run("sweep", {"model": {"m": 2}}, "error", started, db_path=db_path)
        runs = get_recent_runs(db_path=db_path)
        assert [run["id"] for run in runs] == [second, first]
        assert runs[1]["config"] == {"model": {"m": 1}}

    def test_filter_by_command(self, db_path):
        started = datetime.now()
        log_run("steady", {}, "ok", started, db_path=db_path)
        log_run("sweep", {}, "ok", started, db_path=db_path)
        runs = get_recent_runs(command="sweep", db_path=db_path)
        assert len(runs) == 1
        assert runs[0]["status"] == "ok"
