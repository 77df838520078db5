"""Load JSON configuration files and apply command-line overrides."""

import copy
import json
import os
import sys
from dataclasses import asdict, fields
from pathlib import Path
from typing import Dict, Iterable, Optional, Union

# Add parent to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent.parent))
from config import DEFAULT_WORKERS, WORKERS_ENV
from src.errors import ValidationError
from src.model.params import (
    ClusterSpec,
    Coupling,
    EvolutionConfig,
    ModelParams,
    RateConfig,
    SimulationConfig,
    validate,
)

# JSON section -> keys accepted in that section
SECTIONS = {
    "model": {"m", "coupling", "phonon_cap_hyd", "phonon_cap_dist",
              "hbar", "omega_hyd", "omega_dist", "g_hyd", "g_dist"},
    "rates": {f.name for f in fields(RateConfig)},
    "evolve": {f.name for f in fields(EvolutionConfig)},
}

_INT_KEYS = {"m", "phonon_cap_hyd", "phonon_cap_dist"}


def empty_config() -> Dict[str, Dict]:
    return {section: {} for section in SECTIONS}


def load_config(path: Optional[Union[str, Path]] = None) -> Dict[str, Dict]:
    """
    Read a JSON configuration file into a raw nested mapping.

    Missing sections and keys are left out; defaults are applied by
    build_config.
    """
    raw = empty_config()
    if path is None:
        return raw
    try:
        data = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as e:
        raise ValidationError([("CONFIG_UNREADABLE", f"cannot read {path}: {e}")])
    if not isinstance(data, dict):
        raise ValidationError([("CONFIG_UNREADABLE", f"{path} must contain a JSON object")])
    for section, values in data.items():
        if section not in SECTIONS or not isinstance(values, dict):
            raise ValidationError([("UNKNOWN_CONFIG_KEY", f"unknown section {section!r}")])
        for key, value in values.items():
            _set(raw, section, key, value)
    return raw


def _coerce(key: str, value):
    if isinstance(value, str):
        if key == "coupling":
            return value.lower()
        try:
            return int(value) if key in _INT_KEYS else float(value)
        except ValueError:
            raise ValidationError([("BAD_OVERRIDE", f"{key}={value!r} is not a number")])
    return value


def _set(raw: Dict[str, Dict], section: str, key: str, value) -> None:
    allowed = SECTIONS[section]
    if key not in allowed:
        raise ValidationError([("UNKNOWN_CONFIG_KEY", f"unknown key {section}.{key}")])
    raw[section][key] = _coerce(key, value)


def _locate(key: str) -> str:
    """Find the section a bare key belongs to."""
    for section, allowed in SECTIONS.items():
        if key in allowed:
            return section
    raise ValidationError([("UNKNOWN_CONFIG_KEY", f"unknown key {key}")])


def apply_overrides(raw: Dict[str, Dict], overrides: Iterable[str]) -> Dict[str, Dict]:
    """
    Apply "key=value" overrides to a raw configuration.

    Keys may be qualified ("rates.mu_hyd=0.3") or bare ("mu_hyd=0.3").
    Returns a new mapping; the input is not modified.
    """
    result = copy.deepcopy(raw)
    for item in overrides:
        if "=" not in item:
            raise ValidationError([("BAD_OVERRIDE", f"override {item!r} is not key=value")])
        key, value = item.split("=", 1)
        key = key.strip().replace("-", "_")
        if "." in key:
            section, key = key.split(".", 1)
            if section not in SECTIONS:
                raise ValidationError([("UNKNOWN_CONFIG_KEY", f"unknown section {section!r}")])
        else:
            section = _locate(key)
        _set(result, section, key, value.strip())
    return result


def _number(section: str, key: str, value) -> float:
    # JSON null, lists, objects and booleans are not numbers
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValidationError([("BAD_CONFIG_VALUE", f"{section}.{key} must be a number, got {value!r}")])
    return float(value)


def _numbers(raw: Dict[str, Dict], section: str, skip=()) -> Dict[str, float]:
    return {k: _number(section, k, v) for k, v in raw.get(section, {}).items() if k not in skip}


def build_config(raw: Dict[str, Dict]) -> SimulationConfig:
    """Turn a raw mapping into a validated SimulationConfig."""
    model = dict(raw.get("model", {}))
    spec_keys = {"m", "coupling", "phonon_cap_hyd", "phonon_cap_dist"}
    spec_values = {k: v for k, v in model.items() if k in spec_keys}
    spec_values.setdefault("m", 1)
    coupling = spec_values.get("coupling", Coupling.INCOHERENT.value)
    try:
        spec_values["coupling"] = Coupling(coupling)
    except (ValueError, TypeError):
        raise ValidationError([("UNKNOWN_COUPLING", f"coupling must be 'incoherent' or 'coherent', got {coupling!r}")])

    params = ModelParams(**_numbers(raw, "model", skip=spec_keys))
    rates = RateConfig(**_numbers(raw, "rates"))
    evo = EvolutionConfig(**_numbers(raw, "evolve"))
    return validate(ClusterSpec(**spec_values), params, rates, evo)


def config_to_dict(config: SimulationConfig) -> Dict[str, Dict]:
    """Fully resolved configuration in the JSON file schema."""
    spec = asdict(config.spec)
    spec["coupling"] = config.spec.coupling.value
    return {
        "model": {**spec, **asdict(config.params)},
        "rates": asdict(config.rates),
        "evolve": asdict(config.evolve),
    }


def resolve_workers(workers: Optional[int] = None) -> int:
    """Worker count: explicit value, else $HBQED_WORKERS, else 1."""
    if workers is None:
        env = os.environ.get(WORKERS_ENV)
        if not env:
            return DEFAULT_WORKERS
        try:
            workers = int(env)
        except ValueError:
            raise ValidationError([("BAD_WORKERS", f"{WORKERS_ENV}={env!r} is not an integer")])
    if workers < 1:
        raise ValidationError([("BAD_WORKERS", f"worker count must be at least 1, got {workers}")])
    return workers
