"""Domain types for the cluster model and configuration handling."""

from .params import (
    ClusterSpec,
    Coupling,
    EvolutionConfig,
    ModelParams,
    RateConfig,
    SimulationConfig,
    default_config,
    validate,
)
from .loader import apply_overrides, build_config, config_to_dict, load_config, resolve_workers

__all__ = [
    "ClusterSpec",
    "Coupling",
    "EvolutionConfig",
    "ModelParams",
    "RateConfig",
    "SimulationConfig",
    "default_config",
    "validate",
    "apply_overrides",
    "build_config",
    "config_to_dict",
    "load_config",
    "resolve_workers",
]
