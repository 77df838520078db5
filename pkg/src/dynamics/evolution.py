"""
Time integration of the block-diagonal master equation.

Every step applies the exact block propagator U rho U^dag and then one
explicit Euler step of the dissipator, which also routes population
between blocks.
"""

import logging
import math
import warnings
from concurrent.futures import ThreadPoolExecutor
from contextlib import contextmanager
from dataclasses import dataclass, field
from typing import Dict, Iterator, List, Optional, Tuple

import numpy as np
import pandas as pd
import scipy.sparse as sp
import scipy.sparse.linalg as spla
from tqdm import tqdm

from src.dynamics.observables import hb_distribution, phonon_expectations, trace_distance
from src.dynamics.state import BlockDensityMatrix, initial_state
from src.dynamics.system import ClusterSystem, build_system
from src.errors import ConvergenceError, PositivityError, ValidationError
from src.model import SimulationConfig, resolve_workers
from src.operators.hamiltonian import HamiltonianBlocks
from src.operators.jumps import MODES

logger = logging.getLogger(__name__)

STEADY_METHODS = ("evolve", "direct", "auto")
DIRECT_RESIDUAL_TOL = 1e-8


@contextmanager
def worker_pool(workers: Optional[int] = None) -> Iterator[Optional[ThreadPoolExecutor]]:
    """Thread pool for per-group work, or None when running on one worker."""
    workers = resolve_workers(workers)
    if workers == 1:
        yield None
        return
    with ThreadPoolExecutor(max_workers=workers) as executor:
        yield executor


def unitary_step(rho: BlockDensityMatrix, hamiltonian: HamiltonianBlocks, dt: float,
                 executor: Optional[ThreadPoolExecutor] = None) -> BlockDensityMatrix:
    """
    rho -> U rho U^dag block by block, in place.

    Groups of equal-size blocks are independent and write disjoint slices,
    so the result does not depend on the executor.
    """
    layout = rho.layout
    stacks = hamiltonian.group_propagators(layout, dt)

    def apply(item):
        group, stack = item
        if stack is None:
            return
        u, u_dag = stack
        x = layout.group_view(rho.data, group)
        x[...] = u @ x @ u_dag

    items = list(zip(layout.groups, stacks))
    if executor is None:
        for item in items:
            apply(item)
    else:
        list(executor.map(apply, items))
    return rho


def dissipative_step(rho: BlockDensityMatrix, dissipator: sp.spmatrix, dt: float,
                     hbar: float = 1.0) -> BlockDensityMatrix:
    """One explicit Euler step rho += (dt / hbar) D rho, in place."""
    rho.data += (dt / hbar) * (dissipator @ rho.data)
    return rho


def propagate(system: ClusterSystem, rho: BlockDensityMatrix, n_steps: int, dt: float,
              executor: Optional[ThreadPoolExecutor] = None, progress: bool = False) -> BlockDensityMatrix:
    """Advance rho by n_steps two-step iterations, in place."""
    t0 = rho.time
    has_dissipation = system.dissipator.nnz > 0
    for k in tqdm(range(n_steps), desc="Evolving", unit="step", disable=not progress, leave=False):
        unitary_step(rho, system.hamiltonian, dt, executor)
        if has_dissipation:
            dissipative_step(rho, system.dissipator, dt, system.hbar)
        rho.time = t0 + (k + 1) * dt
    return rho


@dataclass
class TimeSeries:
    """Sampled observables of one evolution."""

    m: int
    times: np.ndarray
    distribution: np.ndarray  # (samples, m + 1)
    n_hyd: np.ndarray
    n_dist: np.ndarray
    trace: np.ndarray
    min_eig: np.ndarray

    @classmethod
    def empty(cls, m: int) -> "TimeSeries":
        zeros = np.zeros(0)
        return cls(m, zeros, np.zeros((0, m + 1)), zeros, zeros, zeros, zeros)

    def __len__(self) -> int:
        return len(self.times)

    @property
    def columns(self) -> List[str]:
        return ["t"] + [f"P{k}" for k in range(self.m + 1)] + ["n_hyd", "n_dist", "trace", "min_eig"]

    def probability(self, k: int) -> np.ndarray:
        return self.distribution[:, k]

    @property
    def final_distribution(self) -> np.ndarray:
        return self.distribution[-1]

    def to_frame(self) -> pd.DataFrame:
        frame = pd.DataFrame(self.distribution, columns=[f"P{k}" for k in range(self.m + 1)])
        frame.insert(0, "t", self.times)
        frame["n_hyd"] = self.n_hyd
        frame["n_dist"] = self.n_dist
        frame["trace"] = self.trace
        frame["min_eig"] = self.min_eig
        return frame


def _sample(rho: BlockDensityMatrix, system: ClusterSystem) -> Tuple:
    n_hyd, n_dist = phonon_expectations(rho, system.space)
    return (rho.time, hb_distribution(rho, system.space), n_hyd, n_dist,
            rho.trace(), rho.min_eigenvalue())


def _check_positivity(sample: Tuple, tol: float) -> None:
    t, min_eig = sample[0], sample[-1]
    if min_eig < -tol:
        raise PositivityError(
            f"minimum eigenvalue {min_eig:.3e} at t={t:g} is below -{tol:g}; reduce dt",
            time=t,
            min_eig=min_eig,
        )


def evolve(config: SimulationConfig, system: Optional[ClusterSystem] = None,
           workers: Optional[int] = None, progress: bool = False) -> TimeSeries:
    """
    Evolve the all-excited initial state to t_max.

    Args:
        config: Validated configuration
        system: Prebuilt system for this configuration (built when None)
        workers: Threads for the unitary step (default from environment)
        progress: Show a tqdm progress bar

    Returns:
        TimeSeries sampled every probe_interval

    Raises:
        PositivityError if the state leaves the positivity tolerance
    """
    system = system or build_system(config)
    evo = config.evolve
    rho = initial_state(system.layout)

    total = evo.steps(evo.t_max)
    stride = evo.probe_steps
    samples = [_sample(rho, system)]
    done = 0
    with worker_pool(workers) as executor:
        with tqdm(total=total, desc="Evolving", unit="step", disable=not progress) as bar:
            while done < total:
                chunk = min(stride, total - done)
                propagate(system, rho, chunk, evo.dt, executor)
                done += chunk
                bar.update(chunk)
                sample = _sample(rho, system)
                _check_positivity(sample, evo.positivity_tol)
                samples.append(sample)

    times, dists, n_hyd, n_dist, traces, min_eigs = zip(*samples)
    series = TimeSeries(
        m=config.m,
        times=np.array(times),
        distribution=np.vstack(dists),
        n_hyd=np.array(n_hyd),
        n_dist=np.array(n_dist),
        trace=np.array(traces),
        min_eig=np.array(min_eigs),
    )
    logger.info("evolved m=%d to t=%g in %d steps", config.m, rho.time, total)
    return series


@dataclass
class SteadyStateResult:
    distribution: np.ndarray
    converged: bool
    distance: float
    time: Optional[float]
    method: str
    n_hyd: float
    n_dist: float
    min_eig: float
    state: Optional[BlockDensityMatrix] = field(default=None, repr=False)

    @property
    def m(self) -> int:
        return len(self.distribution) - 1

    def to_dict(self) -> Dict:
        return {
            "distribution": [float(p) for p in self.distribution],
            "converged": bool(self.converged),
            "distance": float(self.distance),
            "time": self.time,
            "method": self.method,
            "n_hyd": self.n_hyd,
            "n_dist": self.n_dist,
            "min_eig": self.min_eig,
        }


def liouvillian(system: ClusterSystem) -> sp.csr_matrix:
    """Full generator G, d(rho)/dt = G rho on the flat block vector."""
    pieces = []
    for group in system.layout.groups:
        for b in group.block_ids:
            h = sp.csr_matrix(system.hamiltonian.blocks[b])
            eye = sp.identity(h.shape[0], format="csr")
            pieces.append(sp.kron(h, eye) - sp.kron(eye, h.T))
    commutator = sp.block_diag(pieces, format="csr")
    return ((-1j / system.hbar) * commutator + system.dissipator / system.hbar).tocsr()


def direct_applicable(config: SimulationConfig) -> bool:
    """
    True when every phonon mode leaks and at least one has inflow.

    Without inflow the zero-phonon ground states (and dark states) are all
    stationary and the steady state depends on the initial state.
    """
    rates = config.rates
    leaks = all(getattr(rates, f"gamma_{mode}") > 0 for mode in MODES)
    return leaks and rates.has_inflow


def _solve_direct(system: ClusterSystem) -> Optional[Tuple[BlockDensityMatrix, float]]:
    """Null vector of G with one equation replaced by tr(rho) = 1."""
    layout = system.layout
    generator = liouvillian(system)
    size = layout.size
    row = int(layout.diag_positions[0])

    keep = np.ones(size)
    keep[row] = 0.0
    trace_row = sp.csr_matrix(
        (np.ones(len(layout.diag_positions)), (np.full(len(layout.diag_positions), row), layout.diag_positions)),
        shape=(size, size),
    )
    system_matrix = (sp.diags(keep) @ generator + trace_row).tocsc()
    rhs = np.zeros(size, dtype=np.complex128)
    rhs[row] = 1.0

    with warnings.catch_warnings():
        warnings.simplefilter("error", spla.MatrixRankWarning)
        try:
            solution = spla.spsolve(system_matrix, rhs)
        except (spla.MatrixRankWarning, RuntimeError) as e:
            logger.warning("direct steady-state solve failed: %s", e)
            return None
    if not np.all(np.isfinite(solution)):
        return None

    rho = BlockDensityMatrix(layout, np.asarray(solution, dtype=np.complex128))
    for group in layout.groups:
        x = layout.group_view(rho.data, group)
        x[...] = 0.5 * (x + np.conj(np.transpose(x, (0, 2, 1))))
    rho.data /= rho.trace()

    residual = float(np.max(np.abs(generator @ rho.data)))
    if residual > DIRECT_RESIDUAL_TOL:
        logger.warning("direct steady state rejected: residual %.3e", residual)
        return None
    if rho.min_eigenvalue() < -system.config.evolve.positivity_tol:
        logger.warning("direct steady state rejected: negative eigenvalue %.3e", rho.min_eigenvalue())
        return None
    return rho, residual


def _evolve_to_steady(system: ClusterSystem, executor, progress: bool) -> Tuple[BlockDensityMatrix, bool, float]:
    evo = system.config.evolve
    rho = initial_state(system.layout)
    previous = rho.copy()
    stride = evo.probe_steps
    n_probes = max(1, evo.steps(evo.steady_t_max) // stride)

    distance = math.inf
    for _ in tqdm(range(n_probes), desc="Steady state", unit="probe", disable=not progress, leave=False):
        propagate(system, rho, stride, evo.dt, executor)
        distance = trace_distance(rho, previous)
        if distance < evo.steady_tol:
            return rho, True, distance
        previous.data[:] = rho.data
    return rho, False, distance


def steady_state(config: SimulationConfig, method: str = "evolve", strict: bool = True,
                 system: Optional[ClusterSystem] = None, workers: Optional[int] = None,
                 progress: bool = False) -> SteadyStateResult:
    """
    Long-time hydrogen-bond distribution.

    Args:
        config: Validated configuration with at least one gamma > 0
        method: "evolve" (probe-to-probe trace distance), "direct" (sparse
            solve, requires leakage on every mode and some inflow) or "auto"
        strict: Raise ConvergenceError instead of returning an
            unconverged result
        system: Prebuilt system for this configuration
        workers: Threads for the unitary step
        progress: Show a tqdm progress bar

    Returns:
        SteadyStateResult with the final distribution and convergence report
    """
    if not config.rates.has_dissipation:
        raise ValidationError([("NO_DISSIPATION", "steady state needs at least one gamma > 0")])
    if method not in STEADY_METHODS:
        raise ValidationError([("UNKNOWN_METHOD", f"method must be one of {STEADY_METHODS}, got {method!r}")])
    applicable = direct_applicable(config)
    if method == "direct" and not applicable:
        raise ValidationError([("DIRECT_REQUIRES_INFLOW",
                                "the direct solve needs gamma > 0 on every mode and some mu > 0")])
    if method == "auto":
        method = "direct" if applicable else "evolve"

    system = system or build_system(config)
    solved = _solve_direct(system) if method == "direct" else None
    if solved is not None:
        rho, distance = solved
        converged, time = True, None
    else:
        if method == "direct":
            logger.warning("falling back to time evolution for the steady state")
            method = "evolve"
        with worker_pool(workers) as executor:
            rho, converged, distance = _evolve_to_steady(system, executor, progress)
        time = rho.time

    n_hyd, n_dist = phonon_expectations(rho, system.space)
    result = SteadyStateResult(
        distribution=hb_distribution(rho, system.space),
        converged=converged,
        distance=distance,
        time=time,
        method=method,
        n_hyd=n_hyd,
        n_dist=n_dist,
        min_eig=rho.min_eigenvalue(),
        state=rho,
    )
    if not converged:
        message = (f"probe distance {distance:.3e} above {config.evolve.steady_tol:g} "
                   f"after t={time:g}")
        if strict:
            raise ConvergenceError(message, result=result)
        logger.warning("steady state not converged: %s", message)
    else:
        logger.debug("steady state (%s) reached, distance %.3e", method, distance)
    return result


# finer-step change allowed, in units of the dt^2 prediction
TIMESTEP_SLACK = 4.0


@dataclass
class TimestepCheck:
    horizon: float
    dts: Tuple[float, ...]
    distributions: List[np.ndarray]
    differences: Tuple[float, float]
    predicted: float
    order: float
    passed: bool


def second_order_prediction(coarse_change: float, dt: float, finer_dt: float) -> float:
    """Change expected at `finer_dt` if it scales as dt^2 from `coarse_change` at `dt`."""
    return coarse_change * (finer_dt / dt) ** 2


def within_timestep_bound(coarse_change: float, fine_change: float, dt: float, finer_dt: float,
                          slack: float = TIMESTEP_SLACK) -> bool:
    return fine_change <= slack * second_order_prediction(coarse_change, dt, finer_dt) + 1e-12


def timestep_convergence(config: SimulationConfig, horizon: float = 50.0,
                         system: Optional[ClusterSystem] = None) -> TimestepCheck:
    """
    Repeat the evolution with dt, dt/2 and dt/4 up to a common horizon.

    The change between dt and dt/2 fixes the constant of a dt^2 error law;
    the change between dt/2 and dt/4 must stay within TIMESTEP_SLACK times
    what that law predicts. The observed order is log2 of the ratio of the
    two changes.
    """
    system = system or build_system(config)
    dt = config.evolve.dt
    dts = (dt, dt / 2, dt / 4)
    distributions = []
    for step in dts:
        rho = initial_state(system.layout)
        propagate(system, rho, int(round(horizon / step)), step)
        distributions.append(hb_distribution(rho, system.space))

    d1 = float(np.max(np.abs(distributions[0] - distributions[1])))
    d2 = float(np.max(np.abs(distributions[1] - distributions[2])))
    order = math.log2(d1 / d2) if d1 > 0 and d2 > 0 else math.inf
    predicted = second_order_prediction(d1, dts[0], dts[1])
    passed = within_timestep_bound(d1, d2, dts[0], dts[1])
    if not passed:
        logger.warning("dt halving changed P by %.3e, dt^2 law predicts %.3e", d2, predicted)
    return TimestepCheck(horizon, dts, distributions, (d1, d2), predicted, order, passed)
