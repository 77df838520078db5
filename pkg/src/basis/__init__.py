"""State-space enumeration and block partition."""

from .states import (
    LEVEL_BONDED,
    LEVEL_EXCITED,
    LEVEL_STRETCHED,
    BasisState,
    ClosureMode,
    StateSpace,
    enumerate_states,
    expected_coherent_dimension,
    initial_basis_state,
    ket_label,
    parse_ket,
    sector_charge,
)
from .blocks import BlockPartition, block_energies, operator_routing, partition_blocks

__all__ = [
    "LEVEL_BONDED",
    "LEVEL_EXCITED",
    "LEVEL_STRETCHED",
    "BasisState",
    "ClosureMode",
    "StateSpace",
    "enumerate_states",
    "expected_coherent_dimension",
    "initial_basis_state",
    "ket_label",
    "parse_ket",
    "sector_charge",
    "BlockPartition",
    "block_energies",
    "operator_routing",
    "partition_blocks",
]
