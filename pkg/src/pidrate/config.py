"""JSON run configs: strict schema, decimal-string numbers, Scenario building."""
from __future__ import annotations

import json
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from pidrate.controller import ControllerConfig
from pidrate.errors import ConfigError
from pidrate.fixed import Fixed, fx
from pidrate.sim import DEFAULT_DT, Constant, Points, RampHold, Scenario

DECIMAL = {"type": "string", "pattern": r"^[+-]?\d+(\.\d{1,18})?$"}

CONTROLLER_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "w_r": DECIMAL,
        "alpha": DECIMAL,
        "phi": DECIMAL,
        "k_i_fixed": {"oneOf": [DECIMAL, {"type": "null"}]},
        "k_d": DECIMAL,
        "period": DECIMAL,
        "e_i_floor": DECIMAL,
        "e_ctrl_max": DECIMAL,
    },
}

SCHEDULE_SCHEMA = {
    "oneOf": [
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "w"],
            "properties": {"kind": {"const": "constant"}, "w": DECIMAL},
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "w_start", "w_end", "step_increment"],
            "properties": {
                "kind": {"const": "ramp_hold"},
                "w_start": DECIMAL,
                "w_end": DECIMAL,
                "step_increment": DECIMAL,
                "steps_per_increment": {"type": "integer", "minimum": 1},
            },
        },
        {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind", "points"],
            "properties": {
                "kind": {"const": "points"},
                "points": {
                    "type": "array",
                    "minItems": 1,
                    "items": {"type": "array", "prefixItems": [DECIMAL, DECIMAL], "minItems": 2, "maxItems": 2},
                },
            },
        },
    ]
}

SCENARIO_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["initial_ratio", "duration", "weight_schedule"],
    "properties": {
        "description": {"type": "string"},
        "controller_cfg": CONTROLLER_SCHEMA,
        "initial_ratio": DECIMAL,
        "initial_debt": DECIMAL,
        "dt": DECIMAL,
        "duration": DECIMAL,
        "weight_schedule": SCHEDULE_SCHEMA,
        "out": {"type": "string"},
        "plot": {"type": "string"},
    },
}

SWEEP_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "description": {"type": "string"},
        "controller_cfg": CONTROLLER_SCHEMA,
        "ratios": {"type": "string"},
        "target_years": DECIMAL,
        "held_weight": DECIMAL,
        "tol": DECIMAL,
        "dt": DECIMAL,
        "workers": {"type": "integer", "minimum": 1},
        "out": {"type": "string"},
        "plot": {"type": "string"},
    },
}


def resolve_config_path(name: str | Path) -> Path:
    """Return ``name`` if it exists, else the bundled config of that name."""
    path = Path(name)
    if path.exists():
        return path
    bundled = resources.files("pidrate") / "configs" / path.name
    if bundled.is_file():
        return Path(str(bundled))
    raise ConfigError(f"config not found: {name}")


def bundled_configs() -> list[str]:
    root = resources.files("pidrate") / "configs"
    return sorted(p.name for p in root.iterdir() if p.name.endswith(".json"))


def load_json(path: str | Path, schema: dict) -> dict[str, Any]:
    path = resolve_config_path(path)
    try:
        data = json.loads(Path(path).read_text(encoding="utf-8"))
    except (OSError, UnicodeDecodeError) as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    except json.JSONDecodeError as exc:
        raise ConfigError(f"malformed JSON in {path}: {exc}") from None
    validate(data, schema)
    return data


def validate(data: Any, schema: dict) -> None:
    try:
        jsonschema.validate(data, schema)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None


def controller_from_dict(d: dict[str, Any] | None) -> ControllerConfig:
    kwargs: dict[str, Any] = {}
    for key, value in (d or {}).items():
        kwargs[key] = None if value is None else fx(value)
    return ControllerConfig(**kwargs)


def schedule_from_dict(d: dict[str, Any]):
    kind = d["kind"]
    if kind == "constant":
        return Constant(fx(d["w"]))
    if kind == "ramp_hold":
        return RampHold(
            w_start=fx(d["w_start"]),
            w_end=fx(d["w_end"]),
            step_increment=fx(d["step_increment"]),
            steps_per_increment=d.get("steps_per_increment", 1),
        )
    return Points(tuple((fx(t), fx(w)) for t, w in d["points"]))


def scenario_from_dict(d: dict[str, Any]) -> Scenario:
    validate(d, SCENARIO_SCHEMA)
    scenario = Scenario(
        controller_cfg=controller_from_dict(d.get("controller_cfg")),
        initial_ratio=fx(d["initial_ratio"]),
        initial_debt=fx(d.get("initial_debt", "1")),
        weight_schedule=schedule_from_dict(d["weight_schedule"]),
        duration=fx(d["duration"]),
        dt=fx(d["dt"]) if "dt" in d else DEFAULT_DT,
    )
    scenario.validate()
    return scenario


def scenario_to_dict(s: Scenario) -> dict[str, Any]:
    cfg = s.controller_cfg
    sched = s.weight_schedule
    if isinstance(sched, Constant):
        sd: dict[str, Any] = {"kind": "constant", "w": str(sched.w)}
    elif isinstance(sched, RampHold):
        sd = {
            "kind": "ramp_hold",
            "w_start": str(sched.w_start),
            "w_end": str(sched.w_end),
            "step_increment": str(sched.step_increment),
            "steps_per_increment": sched.steps_per_increment,
        }
    else:
        sd = {"kind": "points", "points": [[str(t), str(w)] for t, w in sched.points]}

    def text(x: Fixed | None):
        return None if x is None else str(x)

    return {
        "controller_cfg": {
            "w_r": text(cfg.w_r),
            "alpha": text(cfg.alpha),
            "phi": text(cfg.phi),
            "k_i_fixed": text(cfg.k_i_fixed),
            "k_d": text(cfg.k_d),
            "period": text(cfg.period),
            "e_i_floor": text(cfg.e_i_floor),
            "e_ctrl_max": text(cfg.e_ctrl_max),
        },
        "initial_ratio": str(s.initial_ratio),
        "initial_debt": str(s.initial_debt),
        "dt": str(s.dt),
        "duration": str(s.duration),
        "weight_schedule": sd,
    }
