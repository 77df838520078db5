"""Observables of block-diagonal density matrices."""

from typing import Tuple

import numpy as np

from src.basis.states import StateSpace
from src.dynamics.state import BlockDensityMatrix


def hb_distribution(rho: BlockDensityMatrix, space: StateSpace) -> np.ndarray:
    """
    Probability of exactly k hydrogen bonds, k = 0..m.

    P_k sums the diagonal of rho over basis states with k units in the
    bonded level.
    """
    return np.bincount(space.bond_counts(), weights=rho.populations(), minlength=space.m + 1)


def phonon_expectations(rho: BlockDensityMatrix, space: StateSpace) -> Tuple[float, float]:
    """Mean total number of hyd and dist phonons."""
    pops = rho.populations()
    return (float(pops @ space.phonon_counts("hyd")), float(pops @ space.phonon_counts("dist")))


def trace_distance(a: BlockDensityMatrix, b: BlockDensityMatrix) -> float:
    """1/2 of the trace norm of a - b, computed block by block."""
    diff = a.data - b.data
    total = 0.0
    for group in a.layout.groups:
        x = a.layout.group_view(diff, group)
        if group.dim == 1:
            total += float(np.abs(x.real).sum())
        else:
            total += float(np.abs(np.linalg.eigvalsh(x)).sum())
    return 0.5 * total


def dark_population(rho: BlockDensityMatrix, vector: np.ndarray) -> float:
    """<v|rho|v> / <v|v> for a full-space vector v."""
    vector = np.asarray(vector, dtype=np.complex128)
    total = 0.0
    for b, members in enumerate(rho.layout.partition.blocks):
        part = vector[members]
        if np.any(part):
            total += float(np.vdot(part, rho.block(b) @ part).real)
    return total / float(np.vdot(vector, vector).real)
