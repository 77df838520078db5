"""Physical model parameters and their validation."""

import math
import sys
import warnings
from dataclasses import dataclass, field, replace
from enum import Enum
from pathlib import Path
from typing import List, Optional, Tuple

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from config import (
    DEFAULT_DT,
    DEFAULT_G,
    DEFAULT_GAMMA,
    DEFAULT_HBAR,
    DEFAULT_MU,
    DEFAULT_OMEGA,
    DEFAULT_POSITIVITY_TOL,
    DEFAULT_PROBE_INTERVAL,
    DEFAULT_STEADY_T_MAX,
    DEFAULT_STEADY_TOL,
    DEFAULT_T_MAX,
    EULER_STABILITY_LIMIT,
    RWA_RATIO_LIMIT,
)
from src.errors import ConfigWarning, ValidationError


class Coupling(str, Enum):
    """How the hydrogen-bonded units share phonon modes."""

    INCOHERENT = "incoherent"  # private modes per unit
    COHERENT = "coherent"      # two modes shared by the whole cluster


@dataclass(frozen=True)
class ClusterSpec:
    m: int
    coupling: Coupling = Coupling.INCOHERENT
    phonon_cap_hyd: Optional[int] = None
    phonon_cap_dist: Optional[int] = None

    @property
    def is_coherent(self) -> bool:
        return self.coupling is Coupling.COHERENT

    @property
    def n_modes(self) -> int:
        """Number of phonon modes of each kind."""
        return 1 if self.is_coherent else self.m

    def default_cap(self) -> int:
        return self.m if self.is_coherent else 1


@dataclass(frozen=True)
class ModelParams:
    hbar: float = DEFAULT_HBAR
    omega_hyd: float = DEFAULT_OMEGA
    omega_dist: float = DEFAULT_OMEGA
    g_hyd: float = DEFAULT_G
    g_dist: float = DEFAULT_G


@dataclass(frozen=True)
class RateConfig:
    gamma_hyd: float = DEFAULT_GAMMA
    gamma_dist: float = DEFAULT_GAMMA
    mu_hyd: float = DEFAULT_MU
    mu_dist: float = DEFAULT_MU

    @property
    def max_gamma(self) -> float:
        return max(self.gamma_hyd, self.gamma_dist)

    @property
    def has_inflow(self) -> bool:
        return self.mu_hyd > 0 or self.mu_dist > 0

    @property
    def has_dissipation(self) -> bool:
        return self.max_gamma > 0

    def with_inflow(self, mu_hyd: float, mu_dist: float) -> "RateConfig":
        return replace(self, mu_hyd=mu_hyd, mu_dist=mu_dist)


@dataclass(frozen=True)
class EvolutionConfig:
    dt: float = DEFAULT_DT
    t_max: float = DEFAULT_T_MAX
    steady_tol: float = DEFAULT_STEADY_TOL
    probe_interval: float = DEFAULT_PROBE_INTERVAL
    positivity_tol: float = DEFAULT_POSITIVITY_TOL
    steady_t_max: float = DEFAULT_STEADY_T_MAX

    def steps(self, horizon: float) -> int:
        return int(round(horizon / self.dt))

    @property
    def probe_steps(self) -> int:
        return max(1, int(round(self.probe_interval / self.dt)))


@dataclass(frozen=True)
class SimulationConfig:
    """A validated, fully defaulted configuration."""

    spec: ClusterSpec
    params: ModelParams = field(default_factory=ModelParams)
    rates: RateConfig = field(default_factory=RateConfig)
    evolve: EvolutionConfig = field(default_factory=EvolutionConfig)

    @property
    def m(self) -> int:
        return self.spec.m

    def with_rates(self, rates: RateConfig) -> "SimulationConfig":
        return replace(self, rates=rates)

    def with_spec(self, spec: ClusterSpec) -> "SimulationConfig":
        return validate(replace(spec, phonon_cap_hyd=None, phonon_cap_dist=None),
                        self.params, self.rates, self.evolve)

    def with_evolution(self, **changes) -> "SimulationConfig":
        return replace(self, evolve=replace(self.evolve, **changes))


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _check_spec(spec: ClusterSpec, problems: List[Tuple[str, str]]) -> ClusterSpec:
    if not _is_int(spec.m):
        problems.append(("M_NOT_INTEGER", f"m must be an integer, got {spec.m!r}"))
        return spec
    if spec.m < 1:
        problems.append(("M_NOT_POSITIVE", f"m must be a positive integer, got {spec.m!r}"))
        return spec
    try:
        coupling = Coupling(spec.coupling)
    except ValueError:
        problems.append(("UNKNOWN_COUPLING", f"coupling must be 'incoherent' or 'coherent', got {spec.coupling!r}"))
        return spec
    if coupling is Coupling.COHERENT and spec.m < 2:
        problems.append(("COHERENT_REQUIRES_M_GE_2", f"coherent clusters need m >= 2, got m={spec.m}"))

    spec = replace(spec, coupling=coupling)
    caps = {}
    for name in ("phonon_cap_hyd", "phonon_cap_dist"):
        cap = getattr(spec, name)
        if cap is None:
            cap = spec.default_cap()
        elif not _is_int(cap):
            problems.append(("CAP_NOT_INTEGER", f"{name} must be an integer, got {cap!r}"))
        elif cap < 0:
            problems.append(("CAP_NEGATIVE", f"{name} must be a non-negative integer, got {cap!r}"))
        elif cap > spec.m:
            problems.append(("CAP_TOO_LARGE", f"{name}={cap} exceeds m={spec.m}"))
        caps[name] = cap
    return replace(spec, **caps)


def _check_params(params: ModelParams, problems: List[Tuple[str, str]]) -> None:
    if not params.hbar > 0:
        problems.append(("HBAR_NOT_POSITIVE", f"hbar must be positive, got {params.hbar}"))
    for mode in ("hyd", "dist"):
        omega = getattr(params, f"omega_{mode}")
        g = getattr(params, f"g_{mode}")
        if not (omega > 0 and math.isfinite(omega)):
            problems.append(("OMEGA_NOT_POSITIVE", f"omega_{mode} must be positive, got {omega}"))
            continue
        if not (g >= 0 and math.isfinite(g)):
            problems.append(("COUPLING_NEGATIVE", f"g_{mode} must be non-negative, got {g}"))
        elif params.hbar > 0 and g > RWA_RATIO_LIMIT * params.hbar * omega:
            warnings.warn(
                f"g_{mode}={g} exceeds {RWA_RATIO_LIMIT} * hbar * omega_{mode}; "
                "the rotating-wave approximation is questionable",
                ConfigWarning,
                stacklevel=3,
            )


def _check_rates(rates: RateConfig, problems: List[Tuple[str, str]]) -> None:
    for mode in ("hyd", "dist"):
        gamma = getattr(rates, f"gamma_{mode}")
        mu = getattr(rates, f"mu_{mode}")
        if not (gamma >= 0 and math.isfinite(gamma)):
            problems.append(("GAMMA_NEGATIVE", f"gamma_{mode} must be non-negative, got {gamma}"))
        if not 0 <= mu < 1:
            problems.append(("MU_OUT_OF_RANGE", f"mu_{mode} must satisfy 0 <= mu < 1, got {mu}"))


def _check_evolution(evo: EvolutionConfig, rates: RateConfig, problems: List[Tuple[str, str]]) -> None:
    if not evo.dt > 0:
        problems.append(("DT_NOT_POSITIVE", f"dt must be positive, got {evo.dt}"))
        return
    if not evo.t_max > 0:
        problems.append(("T_MAX_NOT_POSITIVE", f"t_max must be positive, got {evo.t_max}"))
    if not evo.steady_t_max > 0:
        problems.append(("T_MAX_NOT_POSITIVE", f"steady_t_max must be positive, got {evo.steady_t_max}"))
    if not evo.steady_tol > 0:
        problems.append(("STEADY_TOL_NOT_POSITIVE", f"steady_tol must be positive, got {evo.steady_tol}"))
    if not evo.probe_interval >= evo.dt:
        problems.append(("PROBE_INTERVAL_INVALID",
                         f"probe_interval ({evo.probe_interval}) must be at least dt ({evo.dt})"))
    if not evo.positivity_tol >= 0:
        problems.append(("POSITIVITY_TOL_NEGATIVE", f"positivity_tol must be non-negative, got {evo.positivity_tol}"))
    if evo.dt * rates.max_gamma > EULER_STABILITY_LIMIT:
        warnings.warn(
            f"dt * max(gamma) = {evo.dt * rates.max_gamma:.3g} exceeds {EULER_STABILITY_LIMIT}; "
            "the explicit dissipative step may lose accuracy",
            ConfigWarning,
            stacklevel=3,
        )


def validate(
    spec: ClusterSpec,
    params: Optional[ModelParams] = None,
    rates: Optional[RateConfig] = None,
    evo: Optional[EvolutionConfig] = None,
) -> SimulationConfig:
    """
    Check every configuration invariant and fill in defaults.

    Args:
        spec: Cluster size, coupling type and optional phonon caps
        params: Hamiltonian constants (defaults if None)
        rates: Emission rates and inflow ratios (defaults if None)
        evo: Time-stepping settings (defaults if None)

    Returns:
        SimulationConfig with phonon caps filled in

    Raises:
        ValidationError listing every violated invariant
    """
    params = params or ModelParams()
    rates = rates or RateConfig()
    evo = evo or EvolutionConfig()

    problems: List[Tuple[str, str]] = []
    spec = _check_spec(spec, problems)
    _check_params(params, problems)
    _check_rates(rates, problems)
    _check_evolution(evo, rates, problems)

    if problems:
        raise ValidationError(problems)
    return SimulationConfig(spec=spec, params=params, rates=rates, evolve=evo)


def default_config(m: int, coupling: Coupling = Coupling.INCOHERENT, **rates) -> SimulationConfig:
    """Validated configuration with default constants, for quick use."""
    return validate(ClusterSpec(m=m, coupling=Coupling(coupling)), rates=RateConfig(**rates))
