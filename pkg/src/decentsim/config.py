"""Flat key-value run configuration with a strict schema.

Every subcommand declares its keys once; values may come from a JSON
config file, from command-line flags (which override the file), or from
defaults.  Unknown keys, missing required keys and type mismatches are
rejected with the offending key named, and the fully resolved mapping is
echoed into every run report so a run can be reproduced from its output.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from .errors import ConfigError

REQUIRED = object()


@dataclass(frozen=True)
class Key:
    name: str
    kind: str  # float | int | str | bool | floats | ints
    default: Any = REQUIRED
    choices: tuple[str, ...] | None = None
    help: str = ""


def _coerce(key: Key, value: Any) -> Any:
    try:
        if key.kind == "float":
            if isinstance(value, bool):
                raise TypeError
            return float(value)
        if key.kind == "int":
            if isinstance(value, bool):
                raise TypeError
            as_float = float(value)
            if as_float != int(as_float):
                raise TypeError
            return int(as_float)
        if key.kind == "str":
            if not isinstance(value, str):
                raise TypeError
            if key.choices and value not in key.choices:
                raise ConfigError(
                    f"config key '{key.name}' must be one of {list(key.choices)}, got {value!r}"
                )
            return value
        if key.kind == "bool":
            if isinstance(value, bool):
                return value
            if isinstance(value, str) and value.lower() in ("true", "false"):
                return value.lower() == "true"
            raise TypeError
        if key.kind in ("floats", "ints"):
            if isinstance(value, str):
                parts = [p for p in value.split(",") if p.strip() != ""]
            elif isinstance(value, (list, tuple)):
                parts = list(value)
            else:
                raise TypeError
            caster = float if key.kind == "floats" else int
            return tuple(caster(p) for p in parts)
    except ConfigError:
        raise
    except (TypeError, ValueError):
        pass
    raise ConfigError(
        f"config key '{key.name}' expects {key.kind}, got {value!r}"
    )


SHARED_KEYS = [
    Key("out", "str", default="", help="path for the JSON run report; empty prints to stdout"),
]

MODEL_KEYS = [
    Key("model", "str", choices=("pow", "pos", "dpos", "gamma", "linear"),
        help="incentive model variant"),
    Key("br", "float", default=0.0, help="block reward per time unit"),
    Key("c1", "float", default=0.0, help="cost per power unit (pow)"),
    Key("c2", "float", default=0.0, help="fixed node cost (pow)"),
    Key("c", "float", default=0.0, help="fixed node cost (pos/dpos)"),
    Key("sb", "float", default=0.0, help="minimum stake to run a node (pos)"),
    Key("ndpos", "int", default=1, help="number of elected producers (dpos)"),
    Key("gamma", "float", default=0.5, help="lottery weight exponent (gamma)"),
    Key("kind", "str", default="inverse-total", choices=("constant", "inverse-total"),
        help="linear coefficient form (linear)"),
    Key("k", "float", default=1.0, help="linear coefficient scale (linear)"),
]

WALK_KEYS = [
    Key("epsilon", "float", default=0.0),
    Key("u", "float", default=1e-3, help="poor node's relative gain per micro-step"),
    Key("k_max", "int", default=100, help="rich-gain truncation"),
    Key("samples", "int", default=100_000),
    Key("seed", "int", default=0),
    Key("strategy", "str", default="micro", choices=("micro", "max-step", "hybrid")),
    Key("n_jump", "int", default=1, help="max-size wins a hybrid jump may span"),
    Key("budget", "float", default=4e9, help="cap on samples * k_max"),
]

SCHEMAS: dict[str, list[Key]] = {
    "simulate": SHARED_KEYS + [
        Key("model", "str", choices=("pow", "pos", "gamma")),
        Key("br", "float"),
        Key("c1", "float", default=0.0),
        Key("c2", "float", default=0.0),
        Key("c", "float", default=0.0),
        Key("sb", "float", default=0.0),
        Key("gamma", "float", default=0.5),
        Key("r", "float", default=1.0, help="reinvestment rate"),
        Key("r_max", "float", help="cap on per-step net reward"),
        Key("horizon", "int"),
        Key("n_nodes", "int"),
        Key("init", "str", choices=("explicit", "power-law", "two-point")),
        Key("init_powers", "floats", default=()),
        Key("init_exponent", "float", default=2.0),
        Key("init_f", "float", default=0.01),
        Key("init_count_rich", "int", default=1),
        Key("init_count_poor", "int", default=1),
        Key("seeds", "ints", default=(0,)),
        Key("epsilon", "float", default=0.0),
        Key("delta", "float", default=0.0),
        Key("window", "int", default=0, help="ED window in steps; 0 means final 10%"),
        Key("trajectories_dir", "str", default="", help="write per-seed CSVs here"),
    ],
    "bound": SHARED_KEYS + [Key("f", "float"), Key("rho", "float")] + WALK_KEYS + [
        Key("u_sweep", "bool", default=False,
            help="also report estimates at u in {1e-2, 1e-3, 1e-4}"),
    ],
    "sweep": SHARED_KEYS + [
        Key("f_grid", "floats"),
        Key("epsilon_grid", "floats"),
        Key("rho_grid", "floats"),
        Key("u", "float", default=1e-3),
        Key("k_max", "int", default=100),
        Key("samples", "int", default=100_000),
        Key("seed", "int", default=0),
        Key("strategy", "str", default="micro", choices=("micro", "max-step", "hybrid")),
        Key("n_jump", "int", default=1),
        Key("budget", "float", default=4e9),
        Key("csv_out", "str", default="", help="write the curve table here"),
    ],
    "metrics": SHARED_KEYS + [
        Key("input", "str", help="CSV with header 'address,blocks'"),
        Key("csv_out", "str", default="", help="write the one-row metrics table here"),
    ],
    "check": SHARED_KEYS + MODEL_KEYS + [
        Key("powers", "floats"),
        Key("owners", "str", default="", help="comma list parallel to powers; default one player per node"),
        Key("m", "int"),
        Key("delta", "float", default=0.0),
        Key("grid", "int", default=20),
        Key("max_nodes", "int", default=6),
        Key("sybil", "str", default="zero", choices=("zero", "threshold-cover")),
        Key("margin", "float", default=0.0),
        Key("linearity_trials", "int", default=64),
        Key("seed", "int", default=0),
    ],
    "anchors": SHARED_KEYS,
}


@dataclass(frozen=True)
class RunConfig:
    subcommand: str
    values: dict[str, Any]

    def __getitem__(self, key: str) -> Any:
        return self.values[key]


def parse_config(
    subcommand: str,
    file: str | Path | None = None,
    overrides: dict[str, Any] | None = None,
) -> RunConfig:
    """Resolve a subcommand configuration from file plus overrides."""
    if subcommand not in SCHEMAS:
        raise ConfigError(f"unknown subcommand '{subcommand}'")
    schema = {key.name: key for key in SCHEMAS[subcommand]}
    provided: dict[str, Any] = {}
    if file:
        path = Path(file)
        try:
            raw = json.loads(path.read_text(encoding="utf-8"))
        except FileNotFoundError as exc:
            raise ConfigError(f"config file not found: {path}") from exc
        except json.JSONDecodeError as exc:
            raise ConfigError(f"config file {path} is not valid JSON: {exc}") from exc
        if not isinstance(raw, dict):
            raise ConfigError(f"config file {path} must hold a JSON object")
        provided.update(raw)
    for name, value in (overrides or {}).items():
        if value is not None:
            provided[name] = value
    unknown = sorted(set(provided) - set(schema))
    if unknown:
        raise ConfigError(f"unknown config key '{unknown[0]}' for '{subcommand}'")
    resolved: dict[str, Any] = {}
    for name, key in schema.items():
        if name in provided:
            resolved[name] = _coerce(key, provided[name])
        elif key.default is REQUIRED:
            raise ConfigError(f"missing required config key '{name}' for '{subcommand}'")
        else:
            resolved[name] = key.default
    return RunConfig(subcommand=subcommand, values=resolved)


def echo_values(config: RunConfig) -> dict[str, Any]:
    """JSON-safe copy of the resolved configuration."""
    out: dict[str, Any] = {}
    for name, value in sorted(config.values.items()):
        out[name] = list(value) if isinstance(value, tuple) else value
    return out
