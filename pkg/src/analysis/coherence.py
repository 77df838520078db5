"""Shared (coherent) versus private (incoherent) phonon modes."""

import logging
from dataclasses import dataclass, replace
from typing import Dict, List, Optional, Tuple

import numpy as np

from src.analysis.sweep import HeatmapData
from src.dynamics import SteadyStateResult, steady_state
from src.errors import ValidationError
from src.model import Coupling, SimulationConfig

logger = logging.getLogger(__name__)

# |P_coh - P_incoh| at or below this counts as no difference
SIGN_THRESHOLD = 1e-4


@dataclass
class CoherenceComparison:
    m: int
    incoherent: SteadyStateResult
    coherent: SteadyStateResult
    threshold: float = SIGN_THRESHOLD

    @property
    def differences(self) -> np.ndarray:
        """P_k(coherent) - P_k(incoherent) for k = 0..m."""
        return self.coherent.distribution - self.incoherent.distribution

    def signs(self) -> List[str]:
        return ["0" if abs(d) <= self.threshold else ("+" if d > 0 else "-") for d in self.differences]

    @property
    def converged(self) -> bool:
        return self.incoherent.converged and self.coherent.converged

    def to_dict(self) -> Dict:
        return {
            "m": self.m,
            "threshold": self.threshold,
            "incoherent": self.incoherent.to_dict(),
            "coherent": self.coherent.to_dict(),
            "differences": [float(d) for d in self.differences],
            "signs": self.signs(),
        }


def coupling_variants(config: SimulationConfig) -> Tuple[SimulationConfig, SimulationConfig]:
    """(incoherent, coherent) copies of a configuration with default phonon caps."""
    if config.m < 2:
        raise ValidationError([("COHERENT_REQUIRES_M_GE_2",
                                f"comparing couplings needs m >= 2, got m={config.m}")])
    return (
        config.with_spec(replace(config.spec, coupling=Coupling.INCOHERENT)),
        config.with_spec(replace(config.spec, coupling=Coupling.COHERENT)),
    )


def compare_coherence(config: SimulationConfig, method: str = "auto", strict: bool = False,
                      workers: Optional[int] = None, progress: bool = False,
                      threshold: float = SIGN_THRESHOLD) -> CoherenceComparison:
    """
    Steady states of the same cluster with private and with shared modes.

    Args:
        config: Validated configuration; its coupling is ignored
        method: Steady-state method for both runs
        strict: Raise ConvergenceError when either run does not converge
        workers: Threads for the unitary step
        progress: Show tqdm progress bars
        threshold: Differences at or below this get the sign "0"

    Returns:
        CoherenceComparison with the signed differences per k
    """
    incoherent, coherent = coupling_variants(config)
    results = [
        steady_state(variant, method=method, strict=strict, workers=workers, progress=progress)
        for variant in (incoherent, coherent)
    ]
    comparison = CoherenceComparison(config.m, results[0], results[1], threshold)
    logger.info("m=%d coherent - incoherent: %s", config.m, " ".join(comparison.signs()))
    return comparison


@dataclass
class CoherenceEffect:
    k: int
    max_difference: float
    max_step_variation: float

    @property
    def insignificant(self) -> bool:
        """Coupling changes P_k less than one grid step in mu does."""
        return self.max_difference < self.max_step_variation

    def to_dict(self) -> Dict:
        return {
            "k": self.k,
            "max_difference": self.max_difference,
            "max_step_variation": self.max_step_variation,
            "insignificant": self.insignificant,
        }


def _max_step(grid: np.ndarray) -> float:
    return float(max(np.abs(np.diff(grid, axis=0)).max(), np.abs(np.diff(grid, axis=1)).max()))


def coherence_effect(incoherent: HeatmapData, coherent: HeatmapData, k: Optional[int] = None) -> CoherenceEffect:
    """
    Size of the coupling effect on P_k against the inflow effect.

    Compares the largest pointwise |P_k(coh) - P_k(incoh)| with the largest
    change of P_k across one grid step of either heatmap.
    """
    if incoherent.shape != coherent.shape or not (
        np.array_equal(incoherent.mu_hyd, coherent.mu_hyd) and np.array_equal(incoherent.mu_dist, coherent.mu_dist)
    ):
        raise ValidationError([("GRID_MISMATCH", "heatmaps must share the same inflow axes")])
    k = incoherent.target if k is None else k
    a, b = incoherent.grid(k), coherent.grid(k)
    return CoherenceEffect(
        k=k,
        max_difference=float(np.max(np.abs(b - a))),
        max_step_variation=max(_max_step(a), _max_step(b)),
    )
