"""Shared fixtures for the simulator tests."""

import sys
from pathlib import Path

import pytest

# Add project root to path for imports
sys.path.insert(0, str(Path(__file__).parent.parent))

from src.dynamics import build_system
from src.model import ClusterSpec, Coupling, EvolutionConfig, RateConfig, validate


def make_config(m=1, coupling="incoherent", gamma=0.02, mu_hyd=0.0, mu_dist=0.0, **evolve):
    """Validated configuration with both modes at the same rate."""
    rates = RateConfig(gamma_hyd=gamma, gamma_dist=gamma, mu_hyd=mu_hyd, mu_dist=mu_dist)
    return validate(ClusterSpec(m=m, coupling=Coupling(coupling)), rates=rates, evo=EvolutionConfig(**evolve))


@pytest.fixture
def config_factory():
    return make_config


@pytest.fixture
def single_unit():
    return make_config(m=1)


@pytest.fixture
def single_unit_system(single_unit):
    return build_system(single_unit)


@pytest.fixture
def pumped_pair_system():
    return build_system(make_config(m=2, coupling="coherent", mu_hyd=0.3, mu_dist=0.6))


@pytest.fixture
def db_path(tmp_path):
    return tmp_path / "results.db"
