"""Block partition of the state space (unitary-invariant sectors)."""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from scipy.sparse.csgraph import connected_components

from src.basis.states import StateSpace, sector_charge
from src.errors import RoutingError

logger = logging.getLogger(__name__)

# (block id, jump operator id) -> target block, None when the operator
# annihilates the whole block
Routing = Dict[Tuple[int, int], Optional[int]]


@dataclass
class BlockPartition:
    """
    Charge sectors of the Hamiltonian plus jump-operator routing.

    Blocks are sorted index arrays, ordered by their smallest member.
    """

    space: StateSpace
    blocks: List[np.ndarray]
    block_of: np.ndarray
    labels: List
    routing: Routing = field(default_factory=dict)
    inflow_routing: Routing = field(default_factory=dict)

    @property
    def org_dim(self) -> int:
        return len(self.block_of)

    @property
    def num_blocks(self) -> int:
        return len(self.blocks)

    @property
    def dims(self) -> np.ndarray:
        return np.array([len(b) for b in self.blocks], dtype=np.int64)

    @property
    def max_block_dim(self) -> int:
        return int(self.dims.max())

    @property
    def memory_ratio(self) -> float:
        """Stored entries of the block-diagonal form over the full matrix."""
        dims = self.dims.astype(float)
        return float(np.sum(dims ** 2) / float(self.org_dim) ** 2)

    def block_with_label(self, label) -> List[int]:
        return [b for b, lab in enumerate(self.labels) if lab == label]

    def summary(self) -> Dict:
        return {
            "org_dim": self.org_dim,
            "num_bls": self.num_blocks,
            "max_dim_bl": self.max_block_dim,
            "memory_ratio": self.memory_ratio,
        }


def _components(adjacency: sp.spmatrix) -> List[np.ndarray]:
    graph = sp.csr_matrix(adjacency, copy=True)
    graph.setdiag(0)
    graph.eliminate_zeros()
    n_comp, comp = connected_components(graph, directed=False)
    blocks = [np.flatnonzero(comp == c) for c in range(n_comp)]
    blocks.sort(key=lambda members: members[0])
    return blocks


def _merge_by_label(space: StateSpace, components: List[np.ndarray]) -> Tuple[List[np.ndarray], List]:
    """
    Coarsen H-components into sectors, one block per conserved charge.

    Zero-phonon kets without Hamiltonian partners (coherent |0;0;01>,
    |0;0;10>, ...) are their own components but share a charge; shared-mode
    leakage reaches all of them from one block, so they belong together.
    """
    grouped: Dict = {}
    for b, members in enumerate(components):
        charges = {sector_charge(space.states[i], space.spec) for i in members}
        if len(charges) != 1:
            raise RoutingError(
                f"block {b} mixes sector charges {sorted(charges)}",
                code="SECTOR_MISMATCH",
                block=b,
            )
        grouped.setdefault(charges.pop(), []).append(members)

    merged = [(np.sort(np.concatenate(parts)), label) for label, parts in grouped.items()]
    merged.sort(key=lambda item: item[0][0])
    if len(merged) < len(components):
        logger.debug("merged %d H-components into %d sectors", len(components), len(merged))
    return [members for members, _ in merged], [label for _, label in merged]


def _route(block_of: np.ndarray, sources: np.ndarray, targets: np.ndarray,
           n_blocks: int, op_id: int, what: str) -> Routing:
    routing: Routing = {(b, op_id): None for b in range(n_blocks)}
    if len(sources) == 0:
        return routing
    pairs = np.unique(np.stack([block_of[sources], block_of[targets]]), axis=1)
    for src, tgt in pairs.T:
        key = (int(src), op_id)
        if routing[key] is not None and routing[key] != int(tgt):
            raise RoutingError(
                f"{what} of operator {op_id} maps block {src} into blocks "
                f"{routing[key]} and {tgt}",
                code="ROUTING_AMBIGUOUS",
                block=int(src),
                op_id=op_id,
            )
        routing[key] = int(tgt)
    return routing


def partition_blocks(space: StateSpace, adjacency: sp.spmatrix, jumps: Sequence = ()) -> BlockPartition:
    """
    Split the space into connected components of the Hamiltonian graph,
    then join the components that carry the same sector charge.

    Args:
        space: Enumerated state space
        adjacency: Hamiltonian (or any matrix with its sparsity pattern)
        jumps: JumpOperators of the same space; their routing is attached

    Returns:
        BlockPartition with sector labels, routing and summary statistics

    Raises:
        RoutingError: ROUTING_AMBIGUOUS if a jump operator (or an active
            inflow) splits one block over two, SECTOR_MISMATCH if a block
            mixes conserved charges
    """
    blocks, labels = _merge_by_label(space, _components(adjacency))
    block_of = np.empty(len(space), dtype=np.int64)
    for b, members in enumerate(blocks):
        block_of[members] = b

    partition = BlockPartition(space, blocks, block_of, labels)
    for op in jumps:
        partition.routing.update(operator_routing(partition, op))
        if op.inflow_rate > 0:
            partition.inflow_routing.update(operator_routing(partition, op, inflow=True))

    logger.debug("partition: %d states in %d blocks (largest %d, memory %.3f%%)",
                 partition.org_dim, partition.num_blocks, partition.max_block_dim,
                 100 * partition.memory_ratio)
    return partition


def block_energies(partition: BlockPartition, diagonal: np.ndarray) -> List[Tuple[float, float]]:
    """(min, max) of the Hamiltonian diagonal inside every block."""
    return [(float(diagonal[idx].min()), float(diagonal[idx].max())) for idx in partition.blocks]


def operator_routing(partition: BlockPartition, op, inflow: bool = False) -> Routing:
    """Block-to-block map of A (or of A^dagger when `inflow`)."""
    coo = op.matrix.tocoo()
    sources, targets = (coo.row, coo.col) if inflow else (coo.col, coo.row)
    what = "inflow" if inflow else "leakage"
    return _route(partition.block_of, sources, targets, partition.num_blocks, op.op_id, what)
