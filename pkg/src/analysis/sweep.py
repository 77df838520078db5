"""Steady-state sweeps over the phonon inflow ratios."""

import logging
import sys
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
from tqdm import tqdm

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from config import DEFAULT_GRID, DEFAULT_MU_MAX
from src.basis.states import ClosureMode
from src.database import get_cached_steady_state, store_steady_state
from src.dynamics import ClusterSystem, SteadyStateResult, build_system, steady_state
from src.errors import ValidationError
from src.model import SimulationConfig, resolve_workers

logger = logging.getLogger(__name__)

CachePath = Optional[Union[str, Path]]


@dataclass
class HeatmapData:
    """
    Steady-state distributions over the (mu_hyd, mu_dist) plane.

    `values[j, i, k]` is P_k at mu_dist[j], mu_hyd[i].
    """

    m: int
    coupling: str
    mu_hyd: np.ndarray
    mu_dist: np.ndarray
    values: np.ndarray
    converged: np.ndarray
    distance: np.ndarray
    target: int = 1

    @property
    def shape(self) -> Tuple[int, int]:
        return len(self.mu_dist), len(self.mu_hyd)

    @property
    def all_converged(self) -> bool:
        return bool(self.converged.all())

    def grid(self, k: Optional[int] = None) -> np.ndarray:
        """P_k over the plane, rows along mu_dist."""
        return self.values[:, :, self.target if k is None else k]

    def to_frame(self) -> pd.DataFrame:
        hyd, dist = np.meshgrid(self.mu_hyd, self.mu_dist)
        frame = pd.DataFrame({"mu_hyd": hyd.ravel(), "mu_dist": dist.ravel()})
        flat = self.values.reshape(-1, self.m + 1)
        for k in range(self.m + 1):
            frame[f"P{k}"] = flat[:, k]
        frame["converged"] = self.converged.ravel().astype(int)
        return frame


@dataclass
class InflowCurve:
    """Steady distribution against one inflow ratio, the other held at zero."""

    m: int
    mode: str
    mu: np.ndarray
    values: np.ndarray  # (len(mu), m + 1)
    converged: np.ndarray

    def probability(self, k: int) -> np.ndarray:
        return self.values[:, k]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.values, columns=[f"P{k}" for k in range(self.m + 1)])
        frame.insert(0, f"mu_{self.mode}", self.mu)
        frame["converged"] = self.converged.astype(int)
        return frame


def inflow_axis(grid: int = DEFAULT_GRID, mu_max: float = DEFAULT_MU_MAX) -> np.ndarray:
    """Evenly spaced inflow ratios on [0, mu_max]."""
    problems = []
    if not isinstance(grid, (int, np.integer)) or grid < 2:
        problems.append(("GRID_TOO_SMALL", f"grid must be an integer >= 2, got {grid!r}"))
    if not 0 < mu_max < 1:
        problems.append(("MU_OUT_OF_RANGE", f"mu_max must satisfy 0 < mu_max < 1, got {mu_max}"))
    if problems:
        raise ValidationError(problems)
    return np.linspace(0.0, mu_max, grid)


def _check_sweep(config: SimulationConfig, target: int) -> None:
    problems = []
    if not config.rates.has_dissipation:
        problems.append(("NO_DISSIPATION", "an inflow sweep needs at least one gamma > 0"))
    if not 0 <= target <= config.m:
        problems.append(("TARGET_OUT_OF_RANGE", f"target must be in 0..{config.m}, got {target}"))
    if problems:
        raise ValidationError(problems)


def _solve_cells(system: ClusterSystem, cells: List[Tuple[float, float]], method: str,
                 workers: Optional[int], cache: CachePath, progress: bool,
                 desc: str) -> List[SteadyStateResult]:
    """
    Steady state of every (mu_hyd, mu_dist) cell on one pumped system.

    Cache reads and writes stay on the calling thread; only the solves
    go to the pool. Results come back in cell order.
    """
    base = system.config
    configs = [base.with_rates(base.rates.with_inflow(mu_h, mu_d)) for mu_h, mu_d in cells]
    results: List[Optional[SteadyStateResult]] = [None] * len(cells)
    if cache is not None:
        for n, cell_config in enumerate(configs):
            results[n] = get_cached_steady_state(cell_config, method, db_path=cache)
    pending = [n for n, result in enumerate(results) if result is None]
    logger.info("%d of %d cells cached, solving %d", len(cells) - len(pending), len(cells), len(pending))

    def solve(n: int) -> SteadyStateResult:
        cell_system = system.with_rates(configs[n].rates)
        return steady_state(configs[n], method=method, strict=False, system=cell_system, workers=1)

    workers = resolve_workers(workers)
    system.hamiltonian.group_propagators(system.layout, base.evolve.dt)
    with tqdm(total=len(pending), desc=desc, unit="cell", disable=not progress) as bar:
        if workers == 1:
            for n in pending:
                results[n] = solve(n)
                bar.update(1)
        else:
            with ThreadPoolExecutor(max_workers=workers) as executor:
                futures = {executor.submit(solve, n): n for n in pending}
                for future in as_completed(futures):
                    results[futures[future]] = future.result()
                    bar.update(1)

    if cache is not None:
        for n in pending:
            store_steady_state(configs[n], results[n], method, db_path=cache)
    for n, result in enumerate(results):
        if not result.converged:
            logger.warning("cell mu_hyd=%g mu_dist=%g: NOT_CONVERGED (distance %.3e)",
                           cells[n][0], cells[n][1], result.distance)
    return results


def sweep_inflow(config: SimulationConfig, grid: int = DEFAULT_GRID, mu_max: float = DEFAULT_MU_MAX,
                 target: int = 1, workers: Optional[int] = None, cache: CachePath = None,
                 progress: bool = False, method: str = "auto") -> HeatmapData:
    """
    Steady-state distribution on a grid x grid lattice of inflow ratios.

    The pumped state space, blocks and Hamiltonian are built once; each
    cell only swaps the rates into the dissipator. Cells that do not
    converge are flagged and the sweep carries on.

    Args:
        config: Validated base configuration (its mu values are ignored)
        grid: Points per axis
        mu_max: Largest inflow ratio on both axes
        target: Default k for grid() and the contour extraction
        workers: Cells solved concurrently (default from environment)
        cache: SQLite file for cached cells, or None
        progress: Show a tqdm progress bar
        method: Steady-state method passed to steady_state

    Returns:
        HeatmapData assembled by grid index
    """
    _check_sweep(config, target)
    axis = inflow_axis(grid, mu_max)
    system = build_system(config, ClosureMode.PUMP)

    cells = [(mu_h, mu_d) for mu_d in axis for mu_h in axis]
    results = _solve_cells(system, cells, method, workers, cache, progress, "Sweeping")

    n = len(axis)
    values = np.array([r.distribution for r in results]).reshape(n, n, config.m + 1)
    converged = np.array([r.converged for r in results]).reshape(n, n)
    distance = np.array([r.distance for r in results], dtype=float).reshape(n, n)
    logger.info("sweep m=%d %s: %d/%d cells converged", config.m, config.spec.coupling.value,
                int(converged.sum()), converged.size)
    return HeatmapData(
        m=config.m,
        coupling=config.spec.coupling.value,
        mu_hyd=axis.copy(),
        mu_dist=axis.copy(),
        values=values,
        converged=converged,
        distance=distance,
        target=target,
    )


def sweep_single_inflow(config: SimulationConfig, mode: str = "dist", grid: int = DEFAULT_GRID,
                        mu_max: float = DEFAULT_MU_MAX, workers: Optional[int] = None,
                        cache: CachePath = None, progress: bool = False,
                        method: str = "auto") -> InflowCurve:
    """Steady distribution as one inflow ratio grows with the other at zero."""
    if mode not in ("hyd", "dist"):
        raise ValidationError([("UNKNOWN_MODE", f"mode must be 'hyd' or 'dist', got {mode!r}")])
    _check_sweep(config, 0)
    axis = inflow_axis(grid, mu_max)
    system = build_system(config, ClosureMode.PUMP)

    cells = [(mu, 0.0) if mode == "hyd" else (0.0, mu) for mu in axis]
    results = _solve_cells(system, cells, method, workers, cache, progress, f"Sweeping mu_{mode}")
    return InflowCurve(
        m=config.m,
        mode=mode,
        mu=axis.copy(),
        values=np.array([r.distribution for r in results]),
        converged=np.array([r.converged for r in results]),
    )


def heatmap_summary(heatmap: HeatmapData) -> Dict:
    """Corner values and convergence counts for console reports."""
    grid = heatmap.grid()
    return {
        "m": heatmap.m,
        "coupling": heatmap.coupling,
        "target": heatmap.target,
        "cells": int(heatmap.converged.size),
        "converged": int(heatmap.converged.sum()),
        "min": float(grid.min()),
        "max": float(grid.max()),
        "corners": {
            "(0,0)": float(grid[0, 0]),
            "(max,0)": float(grid[0, -1]),
            "(0,max)": float(grid[-1, 0]),
            "(max,max)": float(grid[-1, -1]),
        },
    }
