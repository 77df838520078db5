"""Hamiltonian construction: sparse full-space matrix and cached blocks."""

import logging
from typing import Dict, List, Optional, Tuple, Union

import numpy as np
import pandas as pd
import scipy.sparse as sp

from src.basis.blocks import partition_blocks
from src.basis.states import LEVEL_BONDED, LEVEL_EXCITED, LEVEL_STRETCHED, StateSpace
from src.model import ModelParams

logger = logging.getLogger(__name__)


def diagonal_energies(space: StateSpace, params: ModelParams) -> np.ndarray:
    """Free energy of every basis state: phonons plus l=1 and d=1 registers."""
    levels = np.array([state.levels for state in space.states], dtype=np.int64)
    n_l1 = np.count_nonzero(levels != LEVEL_BONDED, axis=1)      # a in {1, 2}
    n_d1 = np.count_nonzero(levels != LEVEL_STRETCHED, axis=1)   # a in {0, 2}
    hyd = space.phonon_counts("hyd") + n_l1
    dist = space.phonon_counts("dist") + n_d1
    return params.hbar * (params.omega_hyd * hyd + params.omega_dist * dist)


def _exchange_entries(space: StateSpace, params: ModelParams):
    """RWA exchange terms g (a^dag sigma + a sigma^dag), upper half only."""
    shared = space.spec.is_coherent
    rows, cols, values = [], [], []
    for s, state in enumerate(space.states):
        for i, level in enumerate(state.levels):
            if level != LEVEL_EXCITED:
                continue
            j = 0 if shared else i
            for attr, lower, g in (("p_hyd", LEVEL_BONDED, params.g_hyd),
                                   ("p_dist", LEVEL_STRETCHED, params.g_dist)):
                if g == 0:
                    continue
                occupation = getattr(state, attr)
                raised = occupation[:j] + (occupation[j] + 1,) + occupation[j + 1:]
                target = state._replace(**{attr: raised},
                                        levels=state.levels[:i] + (lower,) + state.levels[i + 1:])
                t = space.index.get(target)
                if t is not None:
                    rows.append(t)
                    cols.append(s)
                    values.append(g * np.sqrt(occupation[j] + 1))
    return rows, cols, values


def hamiltonian_matrix(space: StateSpace, params: ModelParams) -> sp.csr_matrix:
    """Real symmetric Hamiltonian on the whole enumerated space."""
    n = len(space)
    rows, cols, values = _exchange_entries(space, params)
    exchange = sp.coo_matrix((values, (rows, cols)), shape=(n, n))
    return (sp.diags(diagonal_energies(space, params)) + exchange + exchange.T).tocsr()


class HamiltonianBlocks:
    """
    Per-block Hamiltonian matrices with a precomputed eigendecomposition.

    Propagators exp(-i H dt / hbar) are built from the spectral
    decomposition and cached per time step.
    """

    def __init__(self, partition, blocks: List[np.ndarray], hbar: float = 1.0):
        self.partition = partition
        self.blocks = blocks
        self.hbar = hbar
        self.energies: List[np.ndarray] = []
        self.transforms: List[np.ndarray] = []
        for block in blocks:
            energies, transform = np.linalg.eigh(block)
            self.energies.append(energies)
            self.transforms.append(transform)
        self._propagators: Dict[Tuple[int, float], np.ndarray] = {}
        self._group_cache: Dict[Tuple, List] = {}

    def __len__(self) -> int:
        return len(self.blocks)

    def propagator(self, block_id: int, dt: float) -> np.ndarray:
        key = (block_id, dt)
        if key not in self._propagators:
            v = self.transforms[block_id]
            phases = np.exp(-1j * self.energies[block_id] * dt / self.hbar)
            self._propagators[key] = (v * phases) @ v.conj().T
        return self._propagators[key]

    def group_propagators(self, layout, dt: float) -> List[Optional[Tuple[np.ndarray, np.ndarray]]]:
        """Stacked (U, U^dagger) per layout group; None for 1x1 groups."""
        key = (layout.signature, dt)
        if key not in self._group_cache:
            stacks = []
            for group in layout.groups:
                if group.dim == 1:
                    stacks.append(None)
                    continue
                u = np.stack([self.propagator(b, dt) for b in group.block_ids])
                stacks.append((u, np.conj(np.transpose(u, (0, 2, 1)))))
            self._group_cache[key] = stacks
        return self._group_cache[key]

    def hermiticity_error(self) -> float:
        return max((float(np.max(np.abs(h - h.conj().T))) for h in self.blocks), default=0.0)

    def reconstruction_error(self) -> float:
        errors = [
            float(np.max(np.abs((v * e) @ v.conj().T - h)))
            for h, e, v in zip(self.blocks, self.energies, self.transforms)
        ]
        return max(errors, default=0.0)

    def diagonal_spread(self, block_id: int) -> float:
        """Largest difference between diagonal energies inside one block."""
        diag = np.diag(self.blocks[block_id]).real
        return float(diag.max() - diag.min())


def build_hamiltonian(space: StateSpace, params: ModelParams, partition=None) -> HamiltonianBlocks:
    """
    Build the block Hamiltonian.

    Args:
        space: Enumerated state space
        params: Hamiltonian constants
        partition: BlockPartition of the same space; when None the blocks
            are the charge sectors of H alone

    Returns:
        HamiltonianBlocks with cached eigendecompositions
    """
    full = hamiltonian_matrix(space, params)
    if partition is None:
        partition = partition_blocks(space, full, [])
    blocks = [full[idx][:, idx].toarray() for idx in partition.blocks]
    logger.debug("built %d Hamiltonian blocks, largest %d", len(blocks), partition.max_block_dim)
    return HamiltonianBlocks(partition, blocks, hbar=params.hbar)


def block_entries(matrix: Union[np.ndarray, sp.spmatrix]) -> pd.DataFrame:
    """Non-zero entries of a matrix as (row, col, re, im) rows."""
    coo = sp.coo_matrix(matrix)
    return pd.DataFrame({
        "row": coo.row,
        "col": coo.col,
        "re": np.real(coo.data),
        "im": np.imag(coo.data),
    }).sort_values(["row", "col"], ignore_index=True)
