"""Lindblad dissipator as a sparse superoperator on the flat block vector."""

import logging
from typing import Sequence

import numpy as np
import scipy.sparse as sp

from src.basis.blocks import operator_routing
from src.dynamics.state import BlockLayout
from src.operators.jumps import JumpOperator

logger = logging.getLogger(__name__)


def _routed_entries(layout: BlockLayout, sources: np.ndarray, targets: np.ndarray,
                    values: np.ndarray, routing, op_id: int):
    """
    Flat (row, col, value) triples of X -> B X B^T for a block-routed map B
    with entries B[targets, sources] = values.
    """
    partition = layout.partition
    local = layout.local
    source_blocks = partition.block_of[sources]
    order = np.argsort(source_blocks, kind="stable")
    sources, targets, values = sources[order], targets[order], values[order]
    source_blocks = source_blocks[order]

    rows, cols, vals = [], [], []
    splits = np.flatnonzero(np.diff(source_blocks)) + 1
    for chunk in np.split(np.arange(len(sources)), splits):
        if len(chunk) == 0:
            continue
        b = int(source_blocks[chunk[0]])
        target = routing[(b, op_id)]
        d = len(partition.blocks[b])
        d_t = len(partition.blocks[target])
        s_loc, t_loc, v = local[sources[chunk]], local[targets[chunk]], values[chunk]
        # pairs (e1, e2) of entries: rho[s1, s2] feeds target[t1, t2]
        e1, e2 = np.meshgrid(np.arange(len(chunk)), np.arange(len(chunk)), indexing="ij")
        e1, e2 = e1.ravel(), e2.ravel()
        rows.append(layout.offsets[target] + t_loc[e1] * d_t + t_loc[e2])
        cols.append(layout.offsets[b] + s_loc[e1] * d + s_loc[e2])
        vals.append(v[e1] * v[e2])
    if not rows:
        return np.zeros(0, np.int64), np.zeros(0, np.int64), np.zeros(0)
    return np.concatenate(rows), np.concatenate(cols), np.concatenate(vals)


def build_dissipator(layout: BlockLayout, operators: Sequence[JumpOperator]) -> sp.csr_matrix:
    """
    Sparse matrix D with d(rho)/dt = D rho / hbar for the dissipative part.

    Leakage contributes gamma (A rho A^dag - 1/2 {A^dag A, rho}) and inflow
    mu gamma (A^dag rho A - 1/2 {A A^dag, rho}). A^dag A and A A^dag are
    diagonal in the basis, so the anticommutators only rescale entries.

    Raises:
        RoutingError (ROUTING_AMBIGUOUS) if an active channel splits a block
    """
    n = layout.partition.org_dim
    loss = np.zeros(n)
    rows, cols, vals = [], [], []

    for op in operators:
        if op.gamma == 0:
            continue
        coo = op.matrix.tocoo()
        amplitudes = coo.data.astype(float)

        routing = operator_routing(layout.partition, op)
        r, c, v = _routed_entries(layout, coo.col, coo.row, amplitudes, routing, op.op_id)
        rows.append(r)
        cols.append(c)
        vals.append(op.gamma * v)
        loss += op.gamma * op.number_diagonal()

        if op.inflow_rate > 0:
            routing = operator_routing(layout.partition, op, inflow=True)
            r, c, v = _routed_entries(layout, coo.row, coo.col, amplitudes, routing, op.op_id)
            rows.append(r)
            cols.append(c)
            vals.append(op.inflow_rate * v)
            loss += op.inflow_rate * op.fill_diagonal()

    entry_rows, entry_cols = layout.entry_states()
    diagonal = -0.5 * (loss[entry_rows] + loss[entry_cols])

    size = layout.size
    jumps = sp.coo_matrix(
        (np.concatenate(vals) if vals else np.zeros(0),
         (np.concatenate(rows) if rows else np.zeros(0, np.int64),
          np.concatenate(cols) if cols else np.zeros(0, np.int64))),
        shape=(size, size),
    )
    dissipator = (jumps + sp.diags(diagonal)).tocsr()
    logger.debug("dissipator: %d x %d, %d non-zeros", size, size, dissipator.nnz)
    return dissipator
