"""Tests for scenario configuration and project defaults."""

from pathlib import Path

import pytest

from lieprop.algebra import AlgebraKind
from lieprop.config import (
    DEFAULTS_FILENAME,
    OUT_ENV_VAR,
    Defaults,
    ScenarioConfig,
    Tolerances,
    find_git_root,
    load_scenario,
)
from lieprop.dynamics import DEFAULT_EPSILON, ConstantField, RotatingTransverseField, TabulatedField
from lieprop.errors import ConfigError

MINIMAL = {
    "algebra": "su2",
    "a0": [0.0, 1.0, 0.0],
    "field": {"type": "constant", "h": [0.0, 0.0, 1.0]},
    "t_end": 1.0,
    "dt": 0.01,
}


def _config(**changes):
    data = {**MINIMAL, **changes}
    return ScenarioConfig.from_dict({k: v for k, v in data.items() if v is not None})


class TestScenarioConfig:
    def test_minimal(self):
        config = _config()
        assert config.name == "scenario"
        assert config.algebra is AlgebraKind.SU2
        assert config.field == ConstantField((0.0, 0.0, 1.0))
        assert config.a0 == (0.0, 1.0, 0.0)
        assert config.oracle_dt == config.dt
        assert config.oracle_substeps == 1
        assert config.epsilon == DEFAULT_EPSILON
        assert config.tolerances == Tolerances()
        assert config.sweep == {}

    def test_oracle_substeps(self):
        assert _config(oracle_dt=0.001).oracle_substeps == 10

    @pytest.mark.parametrize("key", ["a0", "field", "t_end", "dt"])
    def test_missing_key(self, key):
        with pytest.raises(ConfigError, match=key):
            _config(**{key: None})

    def test_missing_algebra(self):
        with pytest.raises(ConfigError, match="algebra"):
            _config(algebra=None)

    def test_unknown_key(self):
        with pytest.raises(ConfigError, match="colour"):
            _config(colour="blue")

    def test_algebra_is_case_insensitive(self):
        assert _config(algebra="SU11", a0=[1.0, 0.0, 0.5]).algebra is AlgebraKind.SU11

    @pytest.mark.parametrize("a0", [[0.0, 0.0, 0.0], [1.0, 2.0], ["x", 0.0, 1.0], [float("nan"), 0.0, 1.0]])
    def test_bad_a0(self, a0):
        with pytest.raises(ConfigError, match="a0"):
            _config(a0=a0)

    @pytest.mark.parametrize("changes, message", [
        ({"dt": -0.01}, "dt"),
        ({"dt": "fast"}, "dt"),
        ({"oracle_dt": 0.02}, "must not exceed"),
        ({"oracle_dt": 0.003}, "integer multiple"),
        ({"t_end": 1.005}, "multiple of dt"),
        ({"t_end": 0.01}, "at least 2 steps"),
        ({"epsilon": 0.0}, "epsilon"),
    ])
    def test_grid_validation(self, changes, message):
        with pytest.raises(ConfigError, match=message):
            _config(**changes)

    def test_bad_field(self):
        with pytest.raises(ConfigError, match="Unknown field type"):
            _config(field={"type": "chirp"})
        with pytest.raises(ConfigError, match="constant"):
            _config(field={"type": "constant"})

    def test_bad_sweep(self):
        with pytest.raises(ConfigError, match="sweep"):
            _config(sweep={"field.h": []})

    def test_preset_merge(self):
        config = ScenarioConfig.from_dict({"preset": "rotating", "field": {"omega1": 2.0}, "t_end": 1.0})
        assert config.name == "rotating"
        assert config.field == RotatingTransverseField(2.0, 1.0, 1.5)
        assert config.t_end == 1.0
        assert config.dt == 1e-3
        assert config.oracle_substeps == 10

    def test_preset_field_type_change_replaces_table(self):
        config = ScenarioConfig.from_dict({"preset": "rotating", "field": {"type": "constant", "h": [0, 0, 2]}})
        assert config.field == ConstantField((0.0, 0.0, 2.0))

    def test_unknown_preset(self):
        with pytest.raises(ConfigError, match="Unknown preset"):
            ScenarioConfig.from_dict({"preset": "nope"})

    def test_round_trip(self):
        config = ScenarioConfig.from_dict({"preset": "su11-timelike"})
        assert ScenarioConfig.from_dict(config.to_dict()) == config

    def test_from_file(self, tmp_path):
        path = tmp_path / "spin.toml"
        path.write_text(
            'algebra = "su2"\n'
            "a0 = [1.0, 0.0, 0.0]\n"
            "t_end = 1.0\n"
            "dt = 0.01\n"
            "[field]\n"
            'type = "sweep"\n'
            "omega1 = 2.0\n"
            "rate = 0.4\n"
            "[tolerances]\n"
            "frobenius_U = 1e-5\n"
            "[outputs]\n"
            'dir = "out"\n'
        )
        config = ScenarioConfig.from_file(path)
        assert config.name == "spin"
        assert config.tolerances.frobenius_U == 1e-5
        assert config.tolerances.frobenius_a == Tolerances().frobenius_a
        assert config.base_dir == tmp_path
        assert config.field.to_dict() == {"type": "sweep", "omega1": 2.0, "rate": 0.4, "offset": 0.0}

    def test_tabulated_path_is_relative_to_config(self, tmp_path):
        (tmp_path / "fields").mkdir()
        (tmp_path / "fields" / "h.csv").write_text("t,h1,h2,h3\n0,0,0,1\n1,0,0,1\n")
        path = tmp_path / "scenario.toml"
        path.write_text(
            'algebra = "su2"\na0 = [0.0, 1.0, 0.0]\nt_end = 1.0\ndt = 0.01\n'
            '[field]\ntype = "tabulated"\npath = "fields/h.csv"\n'
        )
        config = ScenarioConfig.from_file(path)
        assert isinstance(config.field, TabulatedField)
        assert config.field.to_dict() == {"type": "tabulated", "path": "fields/h.csv"}

    def test_tabulated_missing_file(self, tmp_path):
        path = tmp_path / "scenario.toml"
        path.write_text(
            'algebra = "su2"\na0 = [0.0, 1.0, 0.0]\nt_end = 1.0\ndt = 0.01\n'
            '[field]\ntype = "tabulated"\npath = "missing.csv"\n'
        )
        with pytest.raises(ConfigError, match="tabulated"):
            ScenarioConfig.from_file(path)

    @pytest.mark.parametrize("times", [[0.0, 1.0], [0.5, 2.0]])
    def test_tabulated_must_cover_the_run(self, times):
        table = {"type": "tabulated", "times": times, "values": [[0.0, 0.0, 1.0]] * 2}
        with pytest.raises(ConfigError, match="does not contain"):
            _config(field=table, t_end=2.0)

    def test_missing_file(self, tmp_path):
        with pytest.raises(ConfigError, match="not found"):
            ScenarioConfig.from_file(tmp_path / "absent.toml")

    def test_invalid_toml(self, tmp_path):
        path = tmp_path / "broken.toml"
        path.write_text("algebra = \n")
        with pytest.raises(ConfigError, match="broken.toml"):
            ScenarioConfig.from_file(path)


class TestOverrides:
    def test_field_parameter(self):
        config = ScenarioConfig.from_dict({"preset": "rotating"})
        changed = config.with_overrides({"field.omega1": 3.0, "a0": [0.0, 1.0, 0.0]})
        assert changed.field == RotatingTransverseField(3.0, 1.0, 1.5)
        assert changed.a0 == (0.0, 1.0, 0.0)
        assert config.field.omega1 == 1.0

    def test_drops_sweep(self):
        config = _config(sweep={"dt": [0.01, 0.02]})
        assert config.sweep == {"dt": [0.01, 0.02]}
        assert config.with_overrides({"dt": 0.02}).sweep == {}

    def test_invalid_value(self):
        with pytest.raises(ConfigError):
            _config().with_overrides({"dt": 0.3})

    def test_not_a_table(self):
        with pytest.raises(ConfigError, match="not a table"):
            _config().with_overrides({"dt.value": 1})


class TestTolerances:
    def test_defaults(self):
        tolerances = Tolerances()
        assert tolerances.frobenius_U == 1e-6
        assert tolerances.frobenius_a == 1e-8
        assert tolerances.proposition == 1e-8
        assert tolerances.schrodinger == 1e-5

    def test_unknown(self):
        with pytest.raises(ConfigError, match="frobenius_V"):
            Tolerances.from_dict({"frobenius_V": 1e-3})

    @pytest.mark.parametrize("value", [0, -1e-3, "tight"])
    def test_invalid(self, value):
        with pytest.raises(ConfigError, match="unitarity"):
            Tolerances.from_dict({"unitarity": value})

    def test_base(self):
        base = Tolerances(schrodinger=1e-3)
        merged = Tolerances.from_dict({"unitarity": 1e-6}, base)
        assert merged.schrodinger == 1e-3
        assert merged.unitarity == 1e-6


class TestDefaults:
    def test_built_in(self, tmp_path):
        (tmp_path / ".git").mkdir()
        defaults = Defaults.load(tmp_path)
        assert defaults.epsilon == DEFAULT_EPSILON
        assert defaults.out_dir is None

    def test_walks_up_to_config(self, tmp_path):
        (tmp_path / ".git").mkdir()
        (tmp_path / DEFAULTS_FILENAME).write_text(
            "[defaults]\nepsilon = 1e-6\nout_dir = \"runs\"\n[defaults.tolerances]\nschrodinger = 1e-3\n"
        )
        nested = tmp_path / "a" / "b"
        nested.mkdir(parents=True)
        defaults = Defaults.load(nested)
        assert defaults.epsilon == 1e-6
        assert defaults.out_dir == "runs"
        assert defaults.tolerances.schrodinger == 1e-3

    def test_stops_at_git_root(self, tmp_path):
        (tmp_path / DEFAULTS_FILENAME).write_text("[defaults]\nepsilon = 1e-6\n")
        repo = tmp_path / "repo"
        (repo / ".git").mkdir(parents=True)
        (repo / "sub").mkdir()
        assert Defaults.load(repo / "sub").epsilon == DEFAULT_EPSILON

    def test_unknown_default(self, tmp_path):
        path = tmp_path / DEFAULTS_FILENAME
        path.write_text("[defaults]\ncolour = \"red\"\n")
        with pytest.raises(ConfigError, match="colour"):
            Defaults.from_file(path)

    def test_applied_to_scenario(self):
        defaults = Defaults(epsilon=1e-6, out_dir="runs", tolerances=Tolerances(schrodinger=1e-3))
        config = ScenarioConfig.from_dict(MINIMAL, defaults=defaults)
        assert config.epsilon == 1e-6
        assert config.out_dir == "runs"
        assert config.tolerances.schrodinger == 1e-3

    def test_scenario_wins_over_defaults(self):
        defaults = Defaults(epsilon=1e-6, tolerances=Tolerances(schrodinger=1e-3))
        data = {**MINIMAL, "epsilon": 1e-7, "tolerances": {"schrodinger": 1e-2}}
        config = ScenarioConfig.from_dict(data, defaults=defaults)
        assert config.epsilon == 1e-7
        assert config.tolerances.schrodinger == 1e-2

    def test_find_git_root(self, tmp_path):
        (tmp_path / ".git").mkdir()
        (tmp_path / "x" / "y").mkdir(parents=True)
        assert find_git_root(tmp_path / "x" / "y") == tmp_path.resolve()


class TestOutDir:
    @pytest.fixture(autouse=True)
    def _no_env(self, monkeypatch):
        monkeypatch.delenv(OUT_ENV_VAR, raising=False)

    def test_default(self):
        assert _config(name="demo").resolve_out_dir() == Path("lieprop-out") / "demo"

    def test_config_dir_is_relative_to_file(self, tmp_path):
        config = ScenarioConfig.from_dict({**MINIMAL, "outputs": {"dir": "out"}}, base_dir=tmp_path)
        assert config.resolve_out_dir() == tmp_path / "out"

    def test_env_beats_config(self, monkeypatch, tmp_path):
        monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path / "env"))
        config = _config(outputs={"dir": "out"})
        assert config.resolve_out_dir() == tmp_path / "env"

    def test_flag_beats_env(self, monkeypatch, tmp_path):
        monkeypatch.setenv(OUT_ENV_VAR, str(tmp_path / "env"))
        assert _config().resolve_out_dir(str(tmp_path / "flag")) == tmp_path / "flag"


class TestLoadScenario:
    def test_preset(self):
        assert load_scenario(preset="larmor").name == "larmor"

    def test_needs_exactly_one(self, tmp_path):
        with pytest.raises(ConfigError, match="exactly one"):
            load_scenario()
        with pytest.raises(ConfigError, match="exactly one"):
            load_scenario(tmp_path / "x.toml", "larmor")
