"""Hamiltonian and phonon jump operators on an enumerated state space."""

from .hamiltonian import (
    HamiltonianBlocks,
    build_hamiltonian,
    diagonal_energies,
    block_entries,
    hamiltonian_matrix,
)
from .jumps import MODES, JumpOperator, build_jump_operators, check_inflow_closure, with_rates

__all__ = [
    "HamiltonianBlocks",
    "build_hamiltonian",
    "diagonal_energies",
    "block_entries",
    "hamiltonian_matrix",
    "MODES",
    "JumpOperator",
    "build_jump_operators",
    "check_inflow_closure",
    "with_rates",
]
