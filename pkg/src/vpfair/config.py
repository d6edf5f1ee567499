"""TOML run configuration for ``vpfair simulate``.

Example::

    seed = 7
    replicates = 1000
    sets = ["S1", "S2", "S3"]
    alphas = [-1.0, -0.5, 0.0, 0.5, 1.0]    # optional, default -1.0..1.0 step 0.1
    threads = 1

    [custom_sets]
    S4 = [50, 50, 50, 150, 150, 150, 100]   # counts for labels -3..+3

    [binomial]
    metrics = ["nDD", "nDR", "nDKL"]
    protected = [-3, -2, -1]

    [multinomial]
    metrics = ["nDJS"]

    [output]
    dir = "results"

A scenario runs only if its table is present. Unknown keys are errors.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path

import jsonschema

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from .experiment import DEFAULT_ALPHAS, GridSpec
from .kernels import ALL_METRICS
from .simulator import SETS, LabelSet, ScenarioConfig

_LABEL = {"type": "integer", "minimum": -3, "maximum": 3}
_METRICS = {"type": "array", "items": {"enum": list(ALL_METRICS)}, "minItems": 1, "uniqueItems": True}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "properties": {
        "seed": {"type": "integer", "minimum": 0, "maximum": 2**64 - 1},
        "replicates": {"type": "integer", "minimum": 1},
        "sets": {"type": "array", "items": {"type": "string"}, "minItems": 1, "uniqueItems": True},
        "alphas": {"type": "array", "items": {"type": "number", "minimum": -1, "maximum": 1}, "minItems": 1},
        "threads": {"type": "integer", "minimum": 1},
        "custom_sets": {
            "type": "object",
            "additionalProperties": {
                "type": "array", "items": {"type": "integer", "minimum": 0}, "minItems": 7, "maxItems": 7,
            },
        },
        "binomial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "metrics": _METRICS,
                "protected": {"type": "array", "items": _LABEL, "minItems": 1, "uniqueItems": True},
            },
        },
        "multinomial": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"metrics": _METRICS},
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {"dir": {"type": "string", "minLength": 1}},
        },
    },
}

DEFAULT_CONFIG = {
    "seed": 0,
    "replicates": 1000,
    "sets": ["S1", "S2", "S3"],
    "binomial": {"metrics": ["nDD", "nDR", "nDKL"]},
    "multinomial": {"metrics": ["nDJS"]},
    "output": {"dir": "results"},
}


class ConfigError(ValueError):
    pass


@dataclass
class RunConfig:
    grids: dict[str, GridSpec]  # keyed by scenario kind
    output_dir: Path
    threads: int = 1


def _path(error) -> str:
    return "/".join(str(p) for p in error.absolute_path) or "<root>"


def parse_config(doc: dict, base_dir: Path = Path(".")) -> RunConfig:
    errors = sorted(jsonschema.Draft7Validator(SCHEMA).iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(f"config field {_path(e)}: {e.message}")

    label_sets = dict(SETS)
    for name, counts in doc.get("custom_sets", {}).items():
        try:
            label_sets[name] = LabelSet(name, tuple(counts))
        except ValueError as exc:
            raise ConfigError(f"config field custom_sets/{name}: {exc}") from None
    sets = tuple(doc.get("sets", DEFAULT_CONFIG["sets"]))
    for i, name in enumerate(sets):
        if name not in label_sets:
            raise ConfigError(f"config field sets/{i}: unknown label set {name!r}")

    common = dict(
        sets=sets,
        alphas=tuple(float(a) for a in doc.get("alphas", DEFAULT_ALPHAS)),
        replicates=doc.get("replicates", 1000),
        base_seed=doc.get("seed", 0),
        label_sets=label_sets,
    )
    grids = {}
    if "binomial" in doc:
        table = doc["binomial"]
        scenario = ScenarioConfig("binomial", frozenset(table.get("protected", (-3, -2, -1))))
        grids["binomial"] = GridSpec(scenario, tuple(table.get("metrics", ("nDD", "nDR", "nDKL"))), **common)
    if "multinomial" in doc:
        table = doc["multinomial"]
        grids["multinomial"] = GridSpec(ScenarioConfig("multinomial"), tuple(table.get("metrics", ("nDJS",))), **common)
    if not grids:
        raise ConfigError("config field <root>: at least one of [binomial] or [multinomial] is required")
    out = Path(doc.get("output", {}).get("dir", "results"))
    if not out.is_absolute():
        out = base_dir / out
    return RunConfig(grids, out, doc.get("threads", 1))


def load_config(path) -> RunConfig:
    path = Path(path)
    try:
        with open(path, "rb") as fh:
            doc = tomllib.load(fh)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(doc, path.parent)
