"""Assembled cluster model: space, blocks, operators and dissipator."""

import logging
from dataclasses import dataclass, replace
from typing import List, Optional

import scipy.sparse as sp

from src.basis.blocks import BlockPartition, partition_blocks
from src.basis.states import ClosureMode, StateSpace, enumerate_states
from src.dynamics.dissipator import build_dissipator
from src.dynamics.state import BlockLayout
from src.model import RateConfig, SimulationConfig
from src.operators.hamiltonian import HamiltonianBlocks, build_hamiltonian, hamiltonian_matrix
from src.operators.jumps import JumpOperator, build_jump_operators, check_inflow_closure, with_rates

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class ClusterSystem:
    """Everything the integrator needs for one configuration."""

    config: SimulationConfig
    space: StateSpace
    partition: BlockPartition
    hamiltonian: HamiltonianBlocks
    operators: List[JumpOperator]
    layout: BlockLayout
    dissipator: sp.csr_matrix

    @property
    def m(self) -> int:
        return self.config.m

    @property
    def hbar(self) -> float:
        return self.config.params.hbar

    def with_rates(self, rates: RateConfig) -> "ClusterSystem":
        """
        Same space and Hamiltonian with new rates; only the dissipator is rebuilt.

        Raises:
            RoutingError (BLOCK_ROUTING_MISS) if the new inflow leaves the space
        """
        operators = with_rates(self.operators, rates)
        check_inflow_closure(self.space, operators)
        return replace(
            self,
            config=self.config.with_rates(rates),
            operators=operators,
            dissipator=build_dissipator(self.layout, operators),
        )


def default_closure(config: SimulationConfig) -> ClosureMode:
    return ClosureMode.PUMP if config.rates.has_inflow else ClosureMode.DECAY


def build_system(config: SimulationConfig, closure: Optional[ClosureMode] = None) -> ClusterSystem:
    """
    Enumerate, partition and build all operators for a validated configuration.

    Args:
        config: Validated SimulationConfig
        closure: Basis closure; PUMP whenever any inflow ratio is positive
            unless given explicitly

    Returns:
        ClusterSystem ready for evolution
    """
    closure = ClosureMode(closure) if closure is not None else default_closure(config)
    space = enumerate_states(config.spec, closure)
    operators = build_jump_operators(space, config.rates)
    partition = partition_blocks(space, hamiltonian_matrix(space, config.params), operators)
    hamiltonian = build_hamiltonian(space, config.params, partition)
    layout = BlockLayout(partition)
    dissipator = build_dissipator(layout, operators)
    logger.info(
        "m=%d %s (%s closure): %d states, %d blocks, %d stored entries",
        config.m, config.spec.coupling.value, closure.value,
        len(space), partition.num_blocks, layout.size,
    )
    return ClusterSystem(config, space, partition, hamiltonian, operators, layout, dissipator)
