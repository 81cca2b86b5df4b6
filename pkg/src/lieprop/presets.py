"""Named scenarios, stored as plain config tables."""

import copy

# Shared grid for every preset: construction dt 1e-3, oracle dt 1e-4, T = 10.
_GRID = {"t_end": 10.0, "dt": 1e-3, "oracle_dt": 1e-4}

# Elliptic su(1,1) drive: h3 dominates the rotating transverse part, so a(t) stays bounded.
_SU11_FIELD = {"type": "rotating", "omega1": 0.3, "omega": 0.5, "omega0": 2.0}

PRESETS: dict[str, dict] = {
    "larmor": {
        "description": "su(2) constant field along axis 3 (Larmor precession)",
        "algebra": "su2",
        "a0": [0.0, 1.0, 0.0],
        "field": {"type": "constant", "h": [0.0, 0.0, 1.0]},
        **_GRID,
    },
    "rotating": {
        "description": "su(2) rotating transverse field (Rabi problem)",
        "algebra": "su2",
        "a0": [1.0, 0.3, 0.5],
        "field": {"type": "rotating", "omega1": 1.0, "omega": 1.0, "omega0": 1.5},
        **_GRID,
    },
    "sweep": {
        "description": "su(2) linear sweep of h3 through resonance",
        "algebra": "su2",
        "a0": [1.0, 0.0, -1.0],
        "field": {"type": "sweep", "omega1": 2.0, "rate": 0.4, "offset": -2.0},
        **_GRID,
    },
    "su11-generic": {
        "description": "su(1,1) with z^2 > a3^2",
        "algebra": "su11",
        "a0": [1.0, 0.0, 0.5],
        "field": _SU11_FIELD,
        **_GRID,
    },
    "su11-null": {
        "description": "su(1,1) on the null cone z^2 = a3^2",
        "algebra": "su11",
        "a0": [0.0, 1.0, 1.0],
        "field": _SU11_FIELD,
        **_GRID,
    },
    "su11-timelike": {
        "description": "su(1,1) with a3^2 > z^2 and a3 > 0",
        "algebra": "su11",
        "a0": [0.5, 0.0, 1.0],
        "field": _SU11_FIELD,
        **_GRID,
    },
}


def preset_names() -> list[str]:
    return list(PRESETS)


def get_preset(name: str) -> dict:
    """Deep copy of a preset table; raises KeyError for unknown names."""
    if name not in PRESETS:
        raise KeyError(f"Unknown preset: {name!r}. Available: {', '.join(PRESETS)}")
    data = copy.deepcopy(PRESETS[name])
    data.setdefault("name", name)
    return data
