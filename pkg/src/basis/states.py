"""Reachable Hilbert-space enumeration for hydrogen-bonded clusters."""

from collections import deque
from math import factorial
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, Iterator, NamedTuple, Tuple

import numpy as np

from src.model import ClusterSpec

# Internal level of one unit in the combined proton + distance encoding.
# a=0 is the hydrogen-bonded level.
LEVEL_BONDED = 0    # l=0, d=1
LEVEL_STRETCHED = 1  # l=1, d=0
LEVEL_EXCITED = 2   # l=1, d=1

RAW_TO_LEVEL = {(0, 1): LEVEL_BONDED, (1, 0): LEVEL_STRETCHED, (1, 1): LEVEL_EXCITED}
LEVEL_TO_RAW = {level: raw for raw, level in RAW_TO_LEVEL.items()}


class ClosureMode(str, Enum):
    DECAY = "decay"  # Hamiltonian + phonon leakage
    PUMP = "pump"    # additionally phonon inflow up to the caps


class BasisState(NamedTuple):
    """
    One basis ket. Phonon occupations are per unit when incoherent and a
    single shared entry when coherent.
    """

    p_hyd: Tuple[int, ...]
    p_dist: Tuple[int, ...]
    levels: Tuple[int, ...]

    @property
    def bonds(self) -> int:
        """Number of units in the hydrogen-bonded level."""
        return self.levels.count(LEVEL_BONDED)

    def label(self) -> str:
        hyd = ",".join(map(str, self.p_hyd))
        dist = ",".join(map(str, self.p_dist))
        return f"|{hyd};{dist};{''.join(map(str, self.levels))}>"


# Raw register form: (p_hyd, p_dist, l, d), each a tuple
RawState = Tuple[Tuple[int, ...], Tuple[int, ...], Tuple[int, ...], Tuple[int, ...]]


@dataclass(frozen=True)
class StateSpace:
    spec: ClusterSpec
    states: Tuple[BasisState, ...]
    closure_mode: ClosureMode
    index: Dict[BasisState, int] = field(repr=False, compare=False, default_factory=dict)

    def __post_init__(self):
        if not self.index:
            self.index.update({state: i for i, state in enumerate(self.states)})

    def __len__(self) -> int:
        return len(self.states)

    def __iter__(self) -> Iterator[BasisState]:
        return iter(self.states)

    @property
    def m(self) -> int:
        return self.spec.m

    @property
    def initial_index(self) -> int:
        return self.index[initial_basis_state(self.spec)]

    def bond_counts(self) -> np.ndarray:
        return np.array([state.bonds for state in self.states], dtype=np.int64)

    def phonon_counts(self, mode: str) -> np.ndarray:
        """Total phonon number of the given kind ("hyd" or "dist") per state."""
        attr = "p_hyd" if mode == "hyd" else "p_dist"
        return np.array([sum(getattr(state, attr)) for state in self.states], dtype=np.int64)


def initial_basis_state(spec: ClusterSpec) -> BasisState:
    """All phonons empty, every unit in the excited level."""
    zeros = (0,) * spec.n_modes
    return BasisState(zeros, zeros, (LEVEL_EXCITED,) * spec.m)


def _replace(values: Tuple[int, ...], position: int, value: int) -> Tuple[int, ...]:
    return values[:position] + (value,) + values[position + 1:]


def _raw_neighbours(raw: RawState, spec: ClusterSpec, closure: ClosureMode) -> Iterator[RawState]:
    """Raw states connected to `raw` by H, by leakage and (PUMP) by inflow."""
    p_hyd, p_dist, l, d = raw
    cap_hyd, cap_dist = spec.phonon_cap_hyd, spec.phonon_cap_dist

    for i in range(spec.m):
        j = 0 if spec.is_coherent else i
        # lambda system: the proton relaxes only at short distance (d=1),
        # the distance relaxes only while the proton is excited (l=1)
        if d[i] == 1:
            if l[i] == 1 and p_hyd[j] < cap_hyd:
                yield (_replace(p_hyd, j, p_hyd[j] + 1), p_dist, _replace(l, i, 0), d)
            if l[i] == 0 and p_hyd[j] > 0:
                yield (_replace(p_hyd, j, p_hyd[j] - 1), p_dist, _replace(l, i, 1), d)
        if l[i] == 1:
            if d[i] == 1 and p_dist[j] < cap_dist:
                yield (p_hyd, _replace(p_dist, j, p_dist[j] + 1), l, _replace(d, i, 0))
            if d[i] == 0 and p_dist[j] > 0:
                yield (p_hyd, _replace(p_dist, j, p_dist[j] - 1), l, _replace(d, i, 1))

    for j in range(spec.n_modes):
        if p_hyd[j] > 0:
            yield (_replace(p_hyd, j, p_hyd[j] - 1), p_dist, l, d)
        if p_dist[j] > 0:
            yield (p_hyd, _replace(p_dist, j, p_dist[j] - 1), l, d)
        if closure is ClosureMode.PUMP:
            if p_hyd[j] < cap_hyd:
                yield (_replace(p_hyd, j, p_hyd[j] + 1), p_dist, l, d)
            if p_dist[j] < cap_dist:
                yield (p_hyd, _replace(p_dist, j, p_dist[j] + 1), l, d)


def _compress(raw: RawState) -> BasisState:
    p_hyd, p_dist, l, d = raw
    try:
        levels = tuple(RAW_TO_LEVEL[(li, di)] for li, di in zip(l, d))
    except KeyError:
        # (l=0, d=0) is never reachable from the excited state
        raise AssertionError(f"unreachable internal configuration in {raw}")
    return BasisState(p_hyd, p_dist, levels)


def enumerate_states(spec: ClusterSpec, closure: ClosureMode = ClosureMode.DECAY) -> StateSpace:
    """
    Breadth-first closure from the all-excited state.

    Args:
        spec: Validated cluster specification (caps filled in)
        closure: DECAY (H + leakage) or PUMP (H + leakage + inflow)

    Returns:
        StateSpace in canonical order, lexicographic on (p_hyd, p_dist, levels)
    """
    closure = ClosureMode(closure)
    start = initial_basis_state(spec)
    l0, d0 = LEVEL_TO_RAW[LEVEL_EXCITED]
    start_raw: RawState = (start.p_hyd, start.p_dist, (l0,) * spec.m, (d0,) * spec.m)

    seen = {start_raw}
    queue = deque([start_raw])
    while queue:
        raw = queue.popleft()
        for nxt in _raw_neighbours(raw, spec, closure):
            if nxt not in seen:
                seen.add(nxt)
                queue.append(nxt)

    states = tuple(sorted(_compress(raw) for raw in seen))
    return StateSpace(spec=spec, states=states, closure_mode=closure)


def sector_charge(state: BasisState, spec: ClusterSpec):
    """
    Conserved charge of a basis state under the Hamiltonian.

    Coherent: (d1, d2) = (n0 - p_hyd, n1 - p_dist), the number of hyd and
    dist phonons already lost to the environment. Incoherent: the tuple of
    per-unit charges, which identifies the connected component of every unit.
    """
    if spec.is_coherent:
        n0 = state.levels.count(LEVEL_BONDED)
        n1 = state.levels.count(LEVEL_STRETCHED)
        return (n0 - state.p_hyd[0], n1 - state.p_dist[0])
    return tuple(
        (int(level == LEVEL_BONDED) - p_h, int(level == LEVEL_STRETCHED) - p_d)
        for p_h, p_d, level in zip(state.p_hyd, state.p_dist, state.levels)
    )


def expected_coherent_dimension(m: int) -> int:
    """Closed-form size of the coherent DECAY space."""
    total = 0
    for n0 in range(m + 1):
        for n1 in range(m + 1 - n0):
            n2 = m - n0 - n1
            total += factorial(m) // (factorial(n0) * factorial(n1) * factorial(n2)) * (n0 + 1) * (n1 + 1)
    return total


def ket_label(levels: Tuple[int, ...]) -> str:
    """Compact label of a zero-phonon ket, unit 1 first ("120")."""
    return "".join(str(level) for level in levels)


def parse_ket(label: str) -> Tuple[int, ...]:
    return tuple(int(ch) for ch in label)
