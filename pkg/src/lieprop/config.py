"""Scenario configuration and project defaults for lieprop."""

import copy
import math
import os
import sys
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Optional

from .algebra import AdjointVector, AlgebraKind
from .dynamics import DEFAULT_EPSILON, CoefficientField, TabulatedField, field_from_dict
from .errors import ConfigError
from .presets import get_preset

# Python 3.11+ has tomllib, fallback to tomli for 3.10
if sys.version_info >= (3, 11):
    import tomllib
else:
    try:
        import tomli as tomllib
    except ImportError:
        tomllib = None

DEFAULTS_FILENAME = ".lieprop.toml"
OUT_ENV_VAR = "LIEPROP_OUT"
DEFAULT_OUT_ROOT = "lieprop-out"


def _read_toml(path: Path) -> dict:
    if tomllib is None:
        raise RuntimeError(
            "TOML support requires Python 3.11+ or the 'tomli' package. "
            "Install with: uv add tomli"
        )
    try:
        with open(path, "rb") as f:
            return tomllib.load(f)
    except FileNotFoundError:
        raise ConfigError(f"Config file not found: {path}") from None
    except tomllib.TOMLDecodeError as e:
        raise ConfigError(f"{path}: {e}") from e


@dataclass(frozen=True)
class Tolerances:
    """Acceptance thresholds checked after every run."""

    frobenius_U: float = 1e-6
    frobenius_a: float = 1e-8
    proposition: float = 1e-8
    # Relative to 1 + |<a0|a0>|.
    norm_drift: float = 1e-7
    schrodinger: float = 1e-5
    unitarity: float = 1e-8

    @classmethod
    def from_dict(cls, data: dict, base: Optional["Tolerances"] = None) -> "Tolerances":
        base = base or cls()
        known = {f.name for f in fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ConfigError(f"Unknown tolerance(s): {', '.join(sorted(unknown))}")
        values = {}
        for name, value in data.items():
            try:
                value = float(value)
            except (TypeError, ValueError):
                raise ConfigError(f"Tolerance {name} must be a number, got {value!r}") from None
            if not value > 0:
                raise ConfigError(f"Tolerance {name} must be positive, got {value}")
            values[name] = value
        return replace(base, **values)

    def to_dict(self) -> dict:
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class Defaults:
    """Project-wide fallbacks from the [defaults] table of .lieprop.toml."""

    epsilon: float = DEFAULT_EPSILON
    out_dir: Optional[str] = None
    tolerances: Tolerances = field(default_factory=Tolerances)

    @classmethod
    def load(cls, start_path: Optional[Path] = None) -> "Defaults":
        """Load defaults from .lieprop.toml, walking up directory tree.

        Args:
            start_path: Starting directory (defaults to cwd)

        Returns:
            Defaults instance with loaded or built-in settings
        """
        if start_path is None:
            start_path = Path.cwd()

        # Walk up directory tree
        current = start_path.resolve()
        git_root = find_git_root(current)

        while True:
            config_file = current / DEFAULTS_FILENAME
            if config_file.exists():
                return cls.from_file(config_file)

            # Stop at git root or filesystem root
            if current == current.parent or (git_root and current == git_root):
                break
            current = current.parent

        return cls()

    @classmethod
    def from_file(cls, path: Path) -> "Defaults":
        """Load defaults from a .lieprop.toml file.

        Raises:
            ConfigError: If the file is not valid TOML or has bad values
        """
        data = _read_toml(path).get("defaults", {})
        data = dict(data)
        tolerances = Tolerances.from_dict(data.pop("tolerances", {}))
        try:
            epsilon = float(data.pop("epsilon", DEFAULT_EPSILON))
        except (TypeError, ValueError):
            raise ConfigError(f"{path}: epsilon must be a number") from None
        out_dir = data.pop("out_dir", None)
        if data:
            raise ConfigError(f"{path}: unknown default(s): {', '.join(sorted(data))}")
        return cls(epsilon=epsilon, out_dir=out_dir, tolerances=tolerances)


def _merge(base: dict, override: dict) -> dict:
    """Recursive merge of config tables; ``field`` is replaced as a whole when its type changes."""
    merged = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, dict) and isinstance(merged.get(key), dict):
            if key == "field" and value.get("type", merged[key].get("type")) != merged[key].get("type"):
                merged[key] = copy.deepcopy(value)
            else:
                merged[key] = _merge(merged[key], value)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def _positive(data: dict, key: str) -> float:
    if key not in data:
        raise ConfigError(f"Missing required key: {key}")
    try:
        value = float(data[key])
    except (TypeError, ValueError):
        raise ConfigError(f"{key} must be a number, got {data[key]!r}") from None
    if not (math.isfinite(value) and value > 0):
        raise ConfigError(f"{key} must be positive and finite, got {value}")
    return value


_TOP_LEVEL_KEYS = {
    "name", "description", "preset", "algebra", "a0", "t_end", "dt", "oracle_dt",
    "epsilon", "field", "outputs", "tolerances", "sweep",
}


@dataclass(frozen=True)
class ScenarioConfig:
    """One run: algebra, field, initial invariant, grid, thresholds and outputs."""

    name: str
    algebra: AlgebraKind
    field: CoefficientField
    a0: tuple[float, float, float]
    t_end: float
    dt: float
    oracle_dt: float
    epsilon: float = DEFAULT_EPSILON
    out_dir: Optional[str] = None
    tolerances: Tolerances = field(default_factory=Tolerances)
    sweep: dict[str, list] = field(default_factory=dict)
    description: str = ""
    base_dir: Optional[Path] = None

    @property
    def oracle_substeps(self) -> int:
        return int(round(self.dt / self.oracle_dt))

    @classmethod
    def from_dict(cls, data: dict, base_dir: Optional[Path] = None,
                  defaults: Optional[Defaults] = None) -> "ScenarioConfig":
        """Build and validate a scenario from its config table.

        A ``preset`` key names a base scenario that the remaining keys override.

        Raises:
            ConfigError: On any missing, unknown or inconsistent value
        """
        defaults = defaults or Defaults()
        data = dict(data)
        if "preset" in data:
            try:
                base = get_preset(str(data.pop("preset")))
            except KeyError as e:
                raise ConfigError(e.args[0]) from None
            data = _merge(base, data)

        unknown = set(data) - _TOP_LEVEL_KEYS
        if unknown:
            raise ConfigError(f"Unknown config key(s): {', '.join(sorted(unknown))}")

        try:
            algebra = AlgebraKind.parse(data.get("algebra", ""))
        except ValueError as e:
            raise ConfigError(str(e)) from None

        try:
            a0 = AdjointVector.of(data["a0"])
        except KeyError:
            raise ConfigError("Missing required key: a0") from None
        except (TypeError, ValueError) as e:
            raise ConfigError(f"a0 must be three finite numbers: {e}") from None
        if a0.to_list() == [0.0, 0.0, 0.0]:
            raise ConfigError("a0 must be nonzero")

        if "field" not in data or not isinstance(data["field"], dict):
            raise ConfigError("Missing required table: [field]")
        coefficient_field = field_from_dict(data["field"], base_dir)

        t_end = _positive(data, "t_end")
        dt = _positive(data, "dt")
        oracle_dt = _positive({"oracle_dt": data.get("oracle_dt", dt)}, "oracle_dt")
        epsilon = _positive({"epsilon": data.get("epsilon", defaults.epsilon)}, "epsilon")
        if oracle_dt > dt * (1 + 1e-12):
            raise ConfigError(f"oracle_dt={oracle_dt} must not exceed dt={dt}")
        ratio = dt / oracle_dt
        if abs(ratio - round(ratio)) > 1e-9 * ratio:
            raise ConfigError(f"dt={dt} must be an integer multiple of oracle_dt={oracle_dt}")
        steps = t_end / dt
        if abs(steps - round(steps)) > 1e-9 * steps or round(steps) < 2:
            raise ConfigError(f"t_end={t_end} must be a multiple of dt={dt} with at least 2 steps")
        if isinstance(coefficient_field, TabulatedField):
            lo, hi = coefficient_field.times[0], coefficient_field.times[-1]
            if lo > 0 or hi < t_end:
                raise ConfigError(f"Tabulated field covers [{lo:g}, {hi:g}], which does not contain [0, t_end={t_end:g}]")

        outputs = data.get("outputs", {})
        if not isinstance(outputs, dict):
            raise ConfigError("[outputs] must be a table")
        tolerances = Tolerances.from_dict(data.get("tolerances", {}), defaults.tolerances)

        sweep = data.get("sweep", {})
        if not isinstance(sweep, dict) or not all(isinstance(v, list) and v for v in sweep.values()):
            raise ConfigError("[sweep] must map dotted keys to non-empty lists")

        return cls(
            name=str(data.get("name", "scenario")),
            algebra=algebra,
            field=coefficient_field,
            a0=tuple(a0.to_list()),
            t_end=t_end,
            dt=dt,
            oracle_dt=oracle_dt,
            epsilon=epsilon,
            out_dir=outputs.get("dir", defaults.out_dir),
            tolerances=tolerances,
            sweep=dict(sweep),
            description=str(data.get("description", "")),
            base_dir=base_dir,
        )

    @classmethod
    def from_file(cls, path: Path, defaults: Optional[Defaults] = None) -> "ScenarioConfig":
        """Load a scenario from a TOML file; relative paths resolve against its directory."""
        path = Path(path)
        data = _read_toml(path)
        data.setdefault("name", path.stem)
        return cls.from_dict(data, base_dir=path.parent, defaults=defaults)

    def to_dict(self) -> dict:
        """Config echo, loadable again with ``from_dict``."""
        data: dict[str, Any] = {
            "name": self.name,
            "algebra": self.algebra.value,
            "a0": list(self.a0),
            "t_end": self.t_end,
            "dt": self.dt,
            "oracle_dt": self.oracle_dt,
            "epsilon": self.epsilon,
            "field": self.field.to_dict(),
            "tolerances": self.tolerances.to_dict(),
        }
        if self.description:
            data["description"] = self.description
        if self.out_dir is not None:
            data["outputs"] = {"dir": self.out_dir}
        return data

    def with_overrides(self, overrides: dict[str, Any]) -> "ScenarioConfig":
        """Copy with dotted keys (``field.omega1``, ``a0``) replaced; the sweep table is dropped."""
        data = self.to_dict()
        for dotted, value in overrides.items():
            target = data
            *parents, leaf = dotted.split(".")
            for key in parents:
                if not isinstance(target.get(key), dict):
                    raise ConfigError(f"Cannot override {dotted}: {key} is not a table")
                target = target[key]
            target[leaf] = value
        return ScenarioConfig.from_dict(data, base_dir=self.base_dir)

    def resolve_out_dir(self, flag: Optional[str] = None) -> Path:
        """--out flag > $LIEPROP_OUT > [outputs].dir (or project default) > lieprop-out/<name>."""
        if flag:
            return Path(flag)
        env = os.environ.get(OUT_ENV_VAR)
        if env:
            return Path(env)
        if self.out_dir:
            out = Path(self.out_dir)
            if self.base_dir is not None and not out.is_absolute():
                out = self.base_dir / out
            return out
        return Path(DEFAULT_OUT_ROOT) / self.name


def load_scenario(path: Optional[Path] = None, preset: Optional[str] = None,
                  defaults: Optional[Defaults] = None) -> ScenarioConfig:
    """Scenario from a config file or a preset name (exactly one of them)."""
    if (path is None) == (preset is None):
        raise ConfigError("Give exactly one of --config or --preset")
    if path is not None:
        return ScenarioConfig.from_file(Path(path), defaults=defaults)
    return ScenarioConfig.from_dict({"preset": preset}, defaults=defaults)


def find_git_root(path: Path) -> Optional[Path]:
    """Find git root directory.

    Args:
        path: Starting directory

    Returns:
        Git root path or None if not in a git repo
    """
    current = path.resolve()
    while current != current.parent:
        if (current / ".git").exists():
            return current
        current = current.parent
    return None
