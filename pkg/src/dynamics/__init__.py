"""Block-diagonal density-matrix dynamics, observables and steady states."""

from .state import BlockDensityMatrix, BlockGroup, BlockLayout, initial_state
from .dissipator import build_dissipator
from .system import ClusterSystem, build_system, default_closure
from .observables import dark_population, hb_distribution, phonon_expectations, trace_distance
from .evolution import (
    SteadyStateResult,
    TimeSeries,
    TimestepCheck,
    direct_applicable,
    dissipative_step,
    evolve,
    liouvillian,
    propagate,
    second_order_prediction,
    steady_state,
    timestep_convergence,
    unitary_step,
    within_timestep_bound,
    worker_pool,
)
from .reference import DenseEvolution

__all__ = [
    "BlockDensityMatrix",
    "BlockGroup",
    "BlockLayout",
    "initial_state",
    "build_dissipator",
    "ClusterSystem",
    "build_system",
    "default_closure",
    "dark_population",
    "hb_distribution",
    "phonon_expectations",
    "trace_distance",
    "SteadyStateResult",
    "TimeSeries",
    "TimestepCheck",
    "direct_applicable",
    "dissipative_step",
    "evolve",
    "liouvillian",
    "propagate",
    "second_order_prediction",
    "steady_state",
    "timestep_convergence",
    "unitary_step",
    "within_timestep_bound",
    "worker_pool",
    "DenseEvolution",
]
