"""Phonon leakage (jump) and inflow operators."""

from dataclasses import dataclass
from typing import List, Optional

import numpy as np
import scipy.sparse as sp

from src.basis.states import StateSpace
from src.errors import RoutingError
from src.model import RateConfig

MODES = ("hyd", "dist")


@dataclass(frozen=True)
class JumpOperator:
    """
    Annihilation operator of one phonon mode restricted to the state space.

    Leakage acts as A with rate gamma, inflow as A^dagger with rate
    mu * gamma. `matrix[t, s]` is the bosonic amplitude sqrt(p) from
    state s to state t.
    """

    op_id: int
    mode: str
    unit: Optional[int]  # None for a mode shared by the whole cluster
    gamma: float
    mu: float
    matrix: sp.csr_matrix

    @property
    def name(self) -> str:
        where = "shared" if self.unit is None else f"unit{self.unit + 1}"
        return f"a_{self.mode}[{where}]"

    @property
    def inflow_rate(self) -> float:
        return self.mu * self.gamma

    @property
    def creation(self) -> sp.csr_matrix:
        return self.matrix.T.tocsr()

    def number_diagonal(self) -> np.ndarray:
        """Diagonal of A^dagger A."""
        return np.asarray(self.matrix.multiply(self.matrix).sum(axis=0)).ravel()

    def fill_diagonal(self) -> np.ndarray:
        """Diagonal of A A^dagger."""
        return np.asarray(self.matrix.multiply(self.matrix).sum(axis=1)).ravel()

    def with_rates(self, gamma: float, mu: float) -> "JumpOperator":
        return JumpOperator(self.op_id, self.mode, self.unit, gamma, mu, self.matrix)


def _annihilation(space: StateSpace, mode: str, j: int) -> sp.csr_matrix:
    attr = "p_hyd" if mode == "hyd" else "p_dist"
    n = len(space)
    rows, cols, values = [], [], []
    for s, state in enumerate(space.states):
        occupation = getattr(state, attr)
        p = occupation[j]
        if p > 0:
            lowered = state._replace(**{attr: occupation[:j] + (p - 1,) + occupation[j + 1:]})
            t = space.index.get(lowered)
            if t is None:
                raise RoutingError(
                    f"leakage of {mode} mode {j} from {state.label()} leaves the enumerated space",
                    code="BLOCK_ROUTING_MISS",
                )
            rows.append(t)
            cols.append(s)
            values.append(np.sqrt(p))
    return sp.csr_matrix((values, (rows, cols)), shape=(n, n))


def build_jump_operators(space: StateSpace, rates: RateConfig) -> List[JumpOperator]:
    """
    One operator per phonon mode: per unit when incoherent, per shared mode
    when coherent. Ordered (hyd, dist) for each mode index.

    Raises:
        RoutingError (BLOCK_ROUTING_MISS) if leakage or a non-zero inflow
        leads to a state outside the space
    """
    operators = []
    for j in range(space.spec.n_modes):
        unit = None if space.spec.is_coherent else j
        for mode in MODES:
            gamma = getattr(rates, f"gamma_{mode}")
            mu = getattr(rates, f"mu_{mode}")
            matrix = _annihilation(space, mode, j)
            operators.append(JumpOperator(len(operators), mode, unit, gamma, mu, matrix))
    check_inflow_closure(space, operators)
    return operators


def check_inflow_closure(space: StateSpace, operators: List[JumpOperator]) -> None:
    """
    Every active inflow must stay inside the space below the phonon caps;
    a missing target means the space was enumerated without the pump closure.
    """
    for op in operators:
        if op.inflow_rate == 0:
            continue
        attr = "p_hyd" if op.mode == "hyd" else "p_dist"
        cap = space.spec.phonon_cap_hyd if op.mode == "hyd" else space.spec.phonon_cap_dist
        j = 0 if op.unit is None else op.unit
        for state in space.states:
            occupation = getattr(state, attr)
            if occupation[j] >= cap:
                continue
            raised = state._replace(**{attr: occupation[:j] + (occupation[j] + 1,) + occupation[j + 1:]})
            if raised not in space.index:
                raise RoutingError(
                    f"inflow through {op.name} from {state.label()} leaves the enumerated space; "
                    "enumerate with the pump closure when mu > 0",
                    code="BLOCK_ROUTING_MISS",
                )


def with_rates(operators: List[JumpOperator], rates: RateConfig) -> List[JumpOperator]:
    """Same operator matrices with new rates (the space is not re-enumerated)."""
    return [
        op.with_rates(getattr(rates, f"gamma_{op.mode}"), getattr(rates, f"mu_{op.mode}"))
        for op in operators
    ]
