"""Exact dark states of the coherent cluster."""

from .kernel import (
    DarkBasis,
    DarkReport,
    DarkSector,
    DarkVector,
    collective_lowering,
    dark_basis,
    in_span,
    register_index,
    verify_dark,
)
from .catalog import embed_triad, four_unit_catalog, known_dark_vectors, triad_vector

__all__ = [
    "DarkBasis",
    "DarkReport",
    "DarkSector",
    "DarkVector",
    "collective_lowering",
    "dark_basis",
    "in_span",
    "register_index",
    "verify_dark",
    "embed_triad",
    "four_unit_catalog",
    "known_dark_vectors",
    "triad_vector",
]
