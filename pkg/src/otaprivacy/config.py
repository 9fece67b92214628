"""Run configuration files.

A config file is a JSON object with a mandatory ``schema_version`` and any of
the blocks ``accountant``, ``system`` and ``task``. Unknown keys anywhere are
errors: a silently ignored typo in a privacy parameter is worse than a crash.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path

import jsonschema

from .accountant import AccountantConfig
from .simulator import ACCOUNTING_MODES, GAIN_MODELS, SystemConfig
from .tasks import LinearRegressionTask

SCHEMA_VERSION = 1

_PROB = {"type": "number", "exclusiveMinimum": 0, "maximum": 1}
_POS = {"type": "number", "exclusiveMinimum": 0}
_POS_INT = {"type": "integer", "minimum": 1}
_ORDER = {"type": "integer", "minimum": 2}

SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": ["schema_version"],
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "output": {"type": "string"},
        "accountant": {
            "type": "object",
            "additionalProperties": False,
            "required": ["noise_multiplier", "delta", "t_max"],
            "properties": {
                "sampling_rate": {"type": "number", "minimum": 0, "maximum": 1},
                "noise_multiplier": _POS,
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "alpha_min": _ORDER,
                "alpha_max": _ORDER,
                "t_max": _POS_INT,
            },
        },
        "system": {
            "type": "object",
            "additionalProperties": False,
            "required": [
                "n_devices",
                "participation_prob",
                "batch_prob",
                "clip_norm",
                "device_noise_std",
                "channel_noise_var",
                "learning_rate",
                "rounds",
                "csi_factor",
                "seed",
            ],
            "properties": {
                "n_devices": _POS_INT,
                "participation_prob": _PROB,
                "batch_prob": _PROB,
                "clip_norm": _POS,
                "device_noise_std": _POS,
                "channel_noise_var": {"type": "number", "minimum": 0},
                "learning_rate": _POS,
                "rounds": _POS_INT,
                "csi_factor": _PROB,
                "seed": {"type": "integer", "minimum": 0},
                "delta": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
                "accounting_mode": {"enum": list(ACCOUNTING_MODES)},
                "noise_multiplier": {"oneOf": [_POS, {"type": "null"}]},
                "alpha_min": _ORDER,
                "alpha_max": _ORDER,
                "gain_model": {"enum": list(GAIN_MODELS)},
                "gain_sigma": {"type": "number", "minimum": 0},
            },
        },
        "task": {
            "type": "object",
            "additionalProperties": False,
            "required": ["kind"],
            "properties": {
                "kind": {"const": "linear_regression"},
                "dim": _POS_INT,
                "samples_per_device": _POS_INT,
                "label_noise_std": {"type": "number", "minimum": 0},
            },
        },
    },
}


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class RunConfig:
    accountant: AccountantConfig | None
    system: SystemConfig | None
    task: LinearRegressionTask | None
    output: str | None = None
    document: dict = field(default_factory=dict, compare=False, repr=False)


def parse_config(doc: dict) -> RunConfig:
    """Validate a decoded config document and build the typed blocks."""
    try:
        jsonschema.validate(doc, SCHEMA)
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise ConfigError(f"invalid config at {where}: {exc.message}") from None
    try:
        acc = doc.get("accountant")
        accountant = None
        if acc is not None:
            acc = dict(acc)
            acc.setdefault("sampling_rate", 1.0)
            accountant = AccountantConfig(**acc)
        system = SystemConfig(**doc["system"]) if "system" in doc else None
        task = None
        if "task" in doc:
            task_doc = {k: v for k, v in doc["task"].items() if k != "kind"}
            task = LinearRegressionTask(**task_doc)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid config: {exc}") from None
    return RunConfig(accountant, system, task, doc.get("output"), doc)


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from None
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from None
    return parse_config(doc)
