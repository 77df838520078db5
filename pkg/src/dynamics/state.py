"""Block-diagonal density matrices stored as one flat complex vector."""

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from src.basis.blocks import BlockPartition
from src.basis.states import StateSpace


@dataclass(frozen=True)
class BlockGroup:
    """Blocks of equal dimension stored contiguously, reshapeable to (n, d, d)."""

    dim: int
    block_ids: np.ndarray
    start: int
    stop: int

    @property
    def count(self) -> int:
        return len(self.block_ids)


class BlockLayout:
    """
    Position of every block of a partition inside the flat state vector.

    Blocks are grouped by dimension so that each group is one contiguous
    segment; inside a block the d x d matrix is stored row-major.
    """

    def __init__(self, partition: BlockPartition):
        self.partition = partition
        dims = partition.dims
        self.offsets = np.empty(partition.num_blocks, dtype=np.int64)
        self.groups: List[BlockGroup] = []

        position = 0
        for dim in np.unique(dims):
            ids = np.flatnonzero(dims == dim)
            start = position
            for b in ids:
                self.offsets[b] = position
                position += int(dim) ** 2
            self.groups.append(BlockGroup(int(dim), ids, start, position))
        self.size = position

        # local index of every state inside its block
        self.local = np.empty(partition.org_dim, dtype=np.int64)
        for members in partition.blocks:
            self.local[members] = np.arange(len(members))

        block_dims = dims[partition.block_of]
        self.diag_positions = (
            self.offsets[partition.block_of] + self.local * (block_dims + 1)
        )
        self.signature: Tuple = tuple((g.dim, tuple(g.block_ids.tolist())) for g in self.groups)
        self._entries: Optional[Tuple[np.ndarray, np.ndarray]] = None

    @property
    def space(self) -> StateSpace:
        return self.partition.space

    def position(self, row: int, col: int) -> int:
        """Flat position of the full-space entry (row, col); both in one block."""
        b = self.partition.block_of[row]
        if self.partition.block_of[col] != b:
            raise IndexError(f"states {row} and {col} lie in different blocks")
        d = len(self.partition.blocks[b])
        return int(self.offsets[b] + self.local[row] * d + self.local[col])

    def entry_states(self) -> Tuple[np.ndarray, np.ndarray]:
        """Full-space (row, col) state index of every flat entry."""
        if self._entries is None:
            rows = np.empty(self.size, dtype=np.int64)
            cols = np.empty(self.size, dtype=np.int64)
            for b, members in enumerate(self.partition.blocks):
                d = len(members)
                start = self.offsets[b]
                rows[start:start + d * d] = np.repeat(members, d)
                cols[start:start + d * d] = np.tile(members, d)
            self._entries = (rows, cols)
        return self._entries

    def group_view(self, data: np.ndarray, group: BlockGroup) -> np.ndarray:
        return data[group.start:group.stop].reshape(group.count, group.dim, group.dim)

    def block_view(self, data: np.ndarray, block_id: int) -> np.ndarray:
        d = len(self.partition.blocks[block_id])
        start = self.offsets[block_id]
        return data[start:start + d * d].reshape(d, d)


class BlockDensityMatrix:
    """Density operator restricted to the blocks of a partition."""

    def __init__(self, layout: BlockLayout, data: np.ndarray, time: float = 0.0):
        if data.shape != (layout.size,):
            raise ValueError(f"expected {layout.size} entries, got {data.shape}")
        self.layout = layout
        self.data = data
        self.time = time

    @classmethod
    def zeros(cls, layout: BlockLayout) -> "BlockDensityMatrix":
        return cls(layout, np.zeros(layout.size, dtype=np.complex128))

    @classmethod
    def from_pure(cls, layout: BlockLayout, index: int) -> "BlockDensityMatrix":
        """|s><s| for the basis state with the given index."""
        rho = cls.zeros(layout)
        rho.data[layout.diag_positions[index]] = 1.0
        return rho

    @classmethod
    def from_vector(cls, layout: BlockLayout, vector: np.ndarray, normalize: bool = True) -> "BlockDensityMatrix":
        """
        Block-diagonal part of |v><v|.

        Coherences between different blocks are dropped; a vector inside a
        single block gives the exact projector.
        """
        vector = np.asarray(vector, dtype=np.complex128)
        norm = float(np.vdot(vector, vector).real)
        if norm == 0:
            raise ValueError("zero vector")
        rho = cls.zeros(layout)
        for b, members in enumerate(layout.partition.blocks):
            part = vector[members]
            if np.any(part):
                layout.block_view(rho.data, b)[...] = np.outer(part, part.conj())
        if normalize:
            rho.data /= norm
        return rho

    def copy(self) -> "BlockDensityMatrix":
        return BlockDensityMatrix(self.layout, self.data.copy(), self.time)

    def block(self, block_id: int) -> np.ndarray:
        return self.layout.block_view(self.data, block_id)

    def populations(self) -> np.ndarray:
        """Diagonal of rho in state order."""
        return self.data[self.layout.diag_positions].real

    def trace(self) -> float:
        return float(self.populations().sum())

    def block_traces(self) -> np.ndarray:
        return np.bincount(self.layout.partition.block_of, weights=self.populations(),
                           minlength=self.layout.partition.num_blocks)

    def hermiticity_error(self) -> float:
        worst = 0.0
        for group in self.layout.groups:
            x = self.layout.group_view(self.data, group)
            worst = max(worst, float(np.max(np.abs(x - np.conj(np.transpose(x, (0, 2, 1)))))))
        return worst

    def eigenvalues(self) -> np.ndarray:
        """All eigenvalues, block by block in layout order."""
        values = []
        for group in self.layout.groups:
            x = self.layout.group_view(self.data, group)
            if group.dim == 1:
                values.append(x.real.ravel())
            else:
                values.append(np.linalg.eigvalsh(x).ravel())
        return np.concatenate(values) if values else np.zeros(0)

    def min_eigenvalue(self) -> float:
        return float(self.eigenvalues().min())

    def purity(self) -> float:
        """tr(rho^2) for Hermitian rho."""
        return float(np.vdot(self.data, self.data).real)

    def to_dense(self) -> np.ndarray:
        n = self.layout.partition.org_dim
        rows, cols = self.layout.entry_states()
        dense = np.zeros((n, n), dtype=np.complex128)
        dense[rows, cols] = self.data
        return dense


def initial_state(layout: BlockLayout) -> BlockDensityMatrix:
    """Pure all-excited state with no phonons."""
    return BlockDensityMatrix.from_pure(layout, layout.space.initial_index)
