"""Configuration validation, loading and overrides."""

import json

import pytest

from src.errors import ConfigWarning, ValidationError
from src.model import (
    ClusterSpec,
    Coupling,
    EvolutionConfig,
    ModelParams,
    RateConfig,
    apply_overrides,
    build_config,
    config_to_dict,
    default_config,
    load_config,
    resolve_workers,
    validate,
)
from src.model.loader import empty_config


class TestValidate:
    def test_defaults_fill_phonon_caps(self):
        incoherent = validate(ClusterSpec(m=3))
        coherent = validate(ClusterSpec(m=3, coupling=Coupling.COHERENT))
        assert (incoherent.spec.phonon_cap_hyd, incoherent.spec.phonon_cap_dist) == (1, 1)
        assert (coherent.spec.phonon_cap_hyd, coherent.spec.phonon_cap_dist) == (3, 3)

    def test_reports_every_problem(self):
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=0), rates=RateConfig(mu_hyd=1.0, gamma_dist=-1.0))
        codes = exc.value.codes
        assert "M_NOT_POSITIVE" in codes
        assert "MU_OUT_OF_RANGE" in codes
        assert "GAMMA_NEGATIVE" in codes

    def test_caps_must_be_integers(self):
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=2, coupling=Coupling.COHERENT, phonon_cap_dist=1.5))
        assert exc.value.codes == ["CAP_NOT_INTEGER"]

    def test_coherent_needs_two_units(self):
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=1, coupling=Coupling.COHERENT))
        assert exc.value.code == "COHERENT_REQUIRES_M_GE_2"

    def test_cap_above_m_rejected(self):
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=2, coupling=Coupling.COHERENT, phonon_cap_hyd=3))
        assert exc.value.codes == ["CAP_TOO_LARGE"]

    def test_time_step_checks(self):
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=1), evo=EvolutionConfig(dt=0.0))
        assert exc.value.code == "DT_NOT_POSITIVE"
        with pytest.raises(ValidationError) as exc:
            validate(ClusterSpec(m=1), evo=EvolutionConfig(dt=0.5, probe_interval=0.1))
        assert exc.value.code == "PROBE_INTERVAL_INVALID"

    def test_strong_coupling_warns(self):
        with pytest.warns(ConfigWarning):
            validate(ClusterSpec(m=1), params=ModelParams(g_hyd=0.5))

    def test_large_euler_step_warns(self):
        with pytest.warns(ConfigWarning):
            validate(ClusterSpec(m=1), rates=RateConfig(gamma_hyd=1.0), evo=EvolutionConfig(dt=0.1))

    def test_validation_error_is_value_error(self):
        with pytest.raises(ValueError):
            default_config(0)

    def test_rate_helpers(self):
        rates = RateConfig()
        assert not rates.has_inflow
        assert rates.has_dissipation
        assert rates.with_inflow(0.2, 0.0).has_inflow


class TestLoader:
    def test_load_file_and_defaults(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({
            "model": {"m": 2, "coupling": "coherent", "g_hyd": 0.05},
            "rates": {"mu_dist": 0.4},
        }))
        config = build_config(load_config(path))
        assert config.m == 2
        assert config.spec.coupling is Coupling.COHERENT
        assert config.params.g_hyd == 0.05
        assert config.params.g_dist == 0.1
        assert config.rates.mu_dist == 0.4
        assert config.evolve.dt == 0.1

    def test_unknown_key_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"model": {"temperature": 300}}))
        with pytest.raises(ValidationError) as exc:
            load_config(path)
        assert exc.value.code == "UNKNOWN_CONFIG_KEY"

    def test_unreadable_file(self, tmp_path):
        path = tmp_path / "broken.json"
        path.write_text("{not json")
        with pytest.raises(ValidationError) as exc:
            load_config(path)
        assert exc.value.code == "CONFIG_UNREADABLE"

    @pytest.mark.parametrize("value", [None, [0.1], {"x": 1}, True])
    def test_non_numeric_value_rejected(self, tmp_path, value):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"rates": {"gamma_hyd": value}}))
        with pytest.raises(ValidationError) as exc:
            build_config(load_config(path))
        assert exc.value.code == "BAD_CONFIG_VALUE"

    def test_fractional_unit_count_rejected(self, tmp_path):
        path = tmp_path / "run.json"
        path.write_text(json.dumps({"model": {"m": 2.0}}))
        with pytest.raises(ValidationError) as exc:
            build_config(load_config(path))
        assert exc.value.codes == ["M_NOT_INTEGER"]

    def test_list_coupling_rejected(self):
        raw = empty_config()
        raw["model"]["coupling"] = ["coherent"]
        with pytest.raises(ValidationError) as exc:
            build_config(raw)
        assert exc.value.code == "UNKNOWN_COUPLING"

    def test_overrides_qualified_and_bare(self):
        raw = apply_overrides(empty_config(), ["rates.mu_hyd=0.3", "dt=0.05", "m=3"])
        config = build_config(raw)
        assert config.rates.mu_hyd == 0.3
        assert config.evolve.dt == 0.05
        assert config.m == 3

    def test_overrides_do_not_modify_input(self):
        raw = empty_config()
        apply_overrides(raw, ["mu_dist=0.2"])
        assert raw["rates"] == {}

    def test_bad_overrides(self):
        with pytest.raises(ValidationError) as exc:
            apply_overrides(empty_config(), ["mu_hyd"])
        assert exc.value.code == "BAD_OVERRIDE"
        with pytest.raises(ValidationError) as exc:
            apply_overrides(empty_config(), ["rates.nothing=1"])
        assert exc.value.code == "UNKNOWN_CONFIG_KEY"
        with pytest.raises(ValidationError) as exc:
            apply_overrides(empty_config(), ["mu_hyd=abc"])
        assert exc.value.code == "BAD_OVERRIDE"

    def test_resolved_dict_round_trip(self):
        config = default_config(2, Coupling.COHERENT, mu_hyd=0.25)
        assert build_config(config_to_dict(config)) == config

    def test_resolved_dict_is_json(self):
        data = config_to_dict(default_config(1))
        assert json.loads(json.dumps(data)) == data
        assert data["model"]["coupling"] == "incoherent"


class TestWorkers:
    def test_explicit_value_wins(self, monkeypatch):
        monkeypatch.setenv("HBQED_WORKERS", "8")
        assert resolve_workers(2) == 2

    def test_environment_default(self, monkeypatch):
        monkeypatch.setenv("HBQED_WORKERS", "3")
        assert resolve_workers() == 3
        monkeypatch.delenv("HBQED_WORKERS")
        assert resolve_workers() == 1

    def test_bad_values(self, monkeypatch):
        monkeypatch.setenv("HBQED_WORKERS", "many")
        with pytest.raises(ValidationError):
            resolve_workers()
        with pytest.raises(ValidationError):
            resolve_workers(0)
