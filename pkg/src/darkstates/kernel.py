"""Exact dark-state kernels of the coherent cluster."""

import logging
from dataclasses import dataclass, field
from functools import reduce
from itertools import product
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import scipy.sparse as sp
from sympy import Matrix, igcd, ilcm
from sympy.utilities.iterables import multiset_permutations

from src.basis.states import LEVEL_BONDED, LEVEL_EXCITED, LEVEL_STRETCHED, BasisState, ket_label
from src.dynamics.system import ClusterSystem
from src.operators.hamiltonian import diagonal_energies, hamiltonian_matrix

logger = logging.getLogger(__name__)

Levels = Tuple[int, ...]

# a=2 relaxes to a=0 by emitting a hyd phonon and to a=1 by emitting a dist phonon
LOWERED = {"hyd": LEVEL_BONDED, "dist": LEVEL_STRETCHED}
DARK_TOL = 1e-12


@dataclass(frozen=True)
class DarkVector:
    """Integer combination of zero-phonon kets."""

    coefficients: Tuple[Tuple[Levels, int], ...]
    name: str = ""

    @classmethod
    def from_mapping(cls, mapping: Dict[Levels, int], name: str = "") -> "DarkVector":
        items = tuple(sorted((levels, int(c)) for levels, c in mapping.items() if c != 0))
        return cls(items, name)

    @classmethod
    def from_labels(cls, mapping: Dict[str, int], name: str = "") -> "DarkVector":
        return cls.from_mapping({tuple(int(ch) for ch in label): c for label, c in mapping.items()}, name)

    @property
    def m(self) -> int:
        return len(self.coefficients[0][0])

    @property
    def n2(self) -> Optional[int]:
        """Number of excited units, None when the kets disagree."""
        counts = {levels.count(LEVEL_EXCITED) for levels, _ in self.coefficients}
        return counts.pop() if len(counts) == 1 else None

    def as_dict(self) -> Dict[Levels, int]:
        return dict(self.coefficients)

    def kets(self) -> List[Tuple[str, int]]:
        return [(ket_label(levels), c) for levels, c in self.coefficients]

    def register_vector(self) -> np.ndarray:
        """Integer coefficients on the 3^m qutrit register."""
        vec = np.zeros(3 ** self.m, dtype=np.int64)
        for levels, c in self.coefficients:
            vec[register_index(levels)] = c
        return vec

    def space_vector(self, system: ClusterSystem) -> Tuple[np.ndarray, List[Levels]]:
        """Coefficients on the system's basis plus any kets missing from it."""
        space = system.space
        zeros = (0,) * space.spec.n_modes
        vec = np.zeros(len(space))
        missing = []
        for levels, c in self.coefficients:
            i = space.index.get(BasisState(zeros, zeros, levels))
            if i is None:
                missing.append(levels)
            else:
                vec[i] = c
        return vec, missing


@dataclass
class DarkSector:
    n2: int
    vectors: List[DarkVector] = field(default_factory=list)

    @property
    def dimension(self) -> int:
        return len(self.vectors)


@dataclass
class DarkBasis:
    m: int
    sectors: List[DarkSector]

    @property
    def vectors(self) -> List[DarkVector]:
        return [v for sector in self.sectors for v in sector.vectors]

    @property
    def dimension(self) -> int:
        return sum(sector.dimension for sector in self.sectors)

    def dimensions(self) -> Dict[int, int]:
        return {sector.n2: sector.dimension for sector in self.sectors}


def register_index(levels: Levels) -> int:
    """Position of a ket in the lexicographic qutrit register."""
    return reduce(lambda acc, a: 3 * acc + a, levels, 0)


def collective_lowering(m: int, mode: str) -> sp.csr_matrix:
    """
    Sum over units of the relaxation operator of one mode, on the
    zero-phonon qutrit register (3^m kets, lexicographic order).

    Entries are 0/1 integers; mode "sum" gives hyd + dist.
    """
    if mode == "sum":
        return (collective_lowering(m, "hyd") + collective_lowering(m, "dist")).tocsr()
    lowered = LOWERED[mode]
    rows, cols = [], []
    for levels in product(range(3), repeat=m):
        source = register_index(levels)
        for i, level in enumerate(levels):
            if level == LEVEL_EXCITED:
                rows.append(register_index(levels[:i] + (lowered,) + levels[i + 1:]))
                cols.append(source)
    size = 3 ** m
    return sp.csr_matrix((np.ones(len(rows), dtype=np.int64), (rows, cols)), shape=(size, size))


def _sector_kets(m: int, n0: int, n1: int) -> List[Levels]:
    n2 = m - n0 - n1
    return [tuple(p) for p in multiset_permutations([0] * n0 + [1] * n1 + [2] * n2)]


def _integer_row(row) -> List[int]:
    denominators = [x.q for x in row]
    scale = reduce(ilcm, denominators, 1)
    values = [int(x * scale) for x in row]
    divisor = reduce(igcd, values, 0) or 1
    return [v // divisor for v in values]


def _sector_kernel(m: int, n0: int, n1: int) -> List[DarkVector]:
    """Kernel of both collective lowerings on kets with n0 zeros and n1 ones."""
    columns = _sector_kets(m, n0, n1)
    col_of = {levels: j for j, levels in enumerate(columns)}
    targets = {mode: {levels: i for i, levels in enumerate(_sector_kets(m, n0 + (mode == "hyd"), n1 + (mode == "dist")))}
               for mode in LOWERED}
    offset = {"hyd": 0, "dist": len(targets["hyd"])}

    stacked = Matrix.zeros(len(targets["hyd"]) + len(targets["dist"]), len(columns))
    for levels, j in col_of.items():
        for i, level in enumerate(levels):
            if level != LEVEL_EXCITED:
                continue
            for mode, lowered in LOWERED.items():
                target = levels[:i] + (lowered,) + levels[i + 1:]
                stacked[offset[mode] + targets[mode][target], j] += 1

    null = stacked.nullspace()
    if not null:
        return []
    basis, _ = Matrix.hstack(*null).T.rref()
    vectors = []
    for r in range(basis.rows):
        row = _integer_row(basis.row(r))
        vectors.append(DarkVector.from_mapping({columns[j]: c for j, c in enumerate(row) if c}))
    return vectors


def dark_basis(m: int) -> DarkBasis:
    """
    Exact dark subspace of the coherent m-unit cluster, by excitation number.

    The kernel of the stacked collective lowerings splits over (n0, n1)
    sub-sectors, so each is reduced separately; within an n2 sector the
    vectors are ordered by pivot ket. Sectors with n2 = 0 only hold
    ground-state combinations and are left out.
    """
    if not 2 <= m <= 6:
        raise ValueError(f"dark_basis supports 2 <= m <= 6, got {m}")
    sectors = []
    for n2 in range(1, m + 1):
        vectors = []
        for n0 in range(m - n2 + 1):
            vectors.extend(_sector_kernel(m, n0, m - n2 - n0))
        vectors.sort(key=lambda v: v.coefficients[0][0])
        named = [DarkVector(v.coefficients, f"n2={n2}#{k + 1}") for k, v in enumerate(vectors)]
        sectors.append(DarkSector(n2, named))
        logger.debug("m=%d n2=%d: dark dimension %d", m, n2, len(named))
    return DarkBasis(m, sectors)


def in_span(vector: DarkVector, basis: Sequence[DarkVector]) -> bool:
    """Exact rational membership of `vector` in the span of `basis`."""
    kets = sorted({levels for v in [vector, *basis] for levels, _ in v.coefficients})
    col = {levels: j for j, levels in enumerate(kets)}

    def as_row(v: DarkVector) -> List[int]:
        row = [0] * len(kets)
        for levels, c in v.coefficients:
            row[col[levels]] = c
        return row

    if not basis:
        return not vector.coefficients
    spanned = Matrix([as_row(v) for v in basis])
    return Matrix.vstack(spanned, Matrix([as_row(vector)])).rank() == spanned.rank()


@dataclass
class DarkReport:
    name: str
    hyd_residual: int
    dist_residual: int
    sum_residual: int
    nontrivial: bool
    energy_spread: float
    interaction_residual: float
    lindblad_residual: float
    missing_kets: List[str] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return (
            not self.missing_kets
            and self.nontrivial
            and self.hyd_residual == 0
            and self.dist_residual == 0
            and self.energy_spread <= DARK_TOL
            and self.interaction_residual <= DARK_TOL
            and self.lindblad_residual <= DARK_TOL
        )

    def to_dict(self) -> Dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "hyd_residual": self.hyd_residual,
            "dist_residual": self.dist_residual,
            "sum_residual": self.sum_residual,
            "nontrivial": self.nontrivial,
            "energy_spread": self.energy_spread,
            "interaction_residual": self.interaction_residual,
            "lindblad_residual": self.lindblad_residual,
            "missing_kets": self.missing_kets,
        }


def _lindblad_residual(system: ClusterSystem, v: np.ndarray) -> float:
    """max |L(|v><v|)| for unit-norm v, using only the rows v can reach."""
    h = hamiltonian_matrix(system.space, system.config.params)
    hbar = system.hbar
    hv = h @ v
    terms = []  # (coefficient, left vector, right vector) of outer products
    terms.append((-1j / hbar, hv, v))
    terms.append((1j / hbar, v, hv))
    for op in system.operators:
        a = op.matrix
        for rate, jump in ((op.gamma, a), (op.inflow_rate, a.T.tocsr())):
            if rate == 0:
                continue
            jv = jump @ v
            njv = jump.T @ jv
            terms.append((rate / hbar, jv, jv))
            terms.append((-0.5 * rate / hbar, njv, v))
            terms.append((-0.5 * rate / hbar, v, njv))

    reached = [np.flatnonzero(vec) for _, left, right in terms for vec in (left, right)]
    support = np.unique(np.concatenate(reached))
    out = np.zeros((len(support), len(support)), dtype=np.complex128)
    for coef, left, right in terms:
        out += coef * np.outer(left[support], np.conj(right[support]))
    return float(np.max(np.abs(out))) if out.size else 0.0


def verify_dark(vector: DarkVector, system: ClusterSystem) -> DarkReport:
    """
    Check a candidate dark vector; never raises for a failing candidate.

    Annihilation residuals are exact integers; energy, interaction and
    Lindbladian residuals are floating point on the normalized vector.
    """
    register = vector.register_vector()
    residual = {
        mode: int(np.max(np.abs(collective_lowering(vector.m, mode) @ register), initial=0))
        for mode in ("hyd", "dist", "sum")
    }
    nontrivial = any(levels.count(LEVEL_EXCITED) > 0 for levels, _ in vector.coefficients)

    v, missing = vector.space_vector(system)
    report = DarkReport(
        name=vector.name,
        hyd_residual=residual["hyd"],
        dist_residual=residual["dist"],
        sum_residual=residual["sum"],
        nontrivial=nontrivial,
        energy_spread=float("nan"),
        interaction_residual=float("nan"),
        lindblad_residual=float("nan"),
        missing_kets=[ket_label(levels) for levels in missing],
    )
    if missing or not np.any(v):
        return report

    v = v / np.linalg.norm(v)
    support = np.flatnonzero(v)
    energies = diagonal_energies(system.space, system.config.params)[support]
    report.energy_spread = float(energies.max() - energies.min())
    h = hamiltonian_matrix(system.space, system.config.params)
    report.interaction_residual = float(np.max(np.abs(h @ v - energies[0] * v)))
    report.lindblad_residual = _lindblad_residual(system, v)
    return report
