"""Run configuration: JSON schema, semantic checks and construction of the field Z."""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

import jsonschema

from .battery import random_field
from .genfun import OperatorStepField
from .space import DiscreteSpace
from .suites import SUITES, Settings

RATIONAL = {"type": "string", "pattern": r"^\s*[+-]?(\d+(\.\d*)?|\.\d+)(/\d+)?\s*$"}

SCHEMA = {
    "type": "object",
    "required": ["space", "coefficient_dim", "z_spec", "degree", "depth"],
    "additionalProperties": False,
    "properties": {
        "space": {
            "type": "object",
            "required": ["cells", "sigma", "lambda", "eta"],
            "additionalProperties": False,
            "properties": {
                "cells": {"type": "array", "items": {"type": "string"}, "minItems": 1, "uniqueItems": True},
                "sigma": {"type": "array", "items": RATIONAL},
                "lambda": {"type": "array", "items": RATIONAL},
                "eta": {"type": "array", "items": RATIONAL},
            },
        },
        "coefficient_dim": {"type": "integer", "minimum": 1},
        "z_spec": {
            "type": "object",
            "if": {"required": ["matrices"]},
            "then": {
                "additionalProperties": False,
                "properties": {
                    "matrices": {
                        "type": "object",
                        "additionalProperties": {"type": "array", "items": {"type": "array", "items": RATIONAL}},
                    }
                },
            },
            "else": {
                "required": ["seed", "norm_cap"],
                "additionalProperties": False,
                "properties": {"seed": {"type": "integer"}, "norm_cap": RATIONAL},
            },
        },
        "degree": {"type": "integer", "minimum": 0},
        "depth": {"type": "integer", "minimum": 2},
        "tolerance": {"type": "number", "exclusiveMinimum": 0},
        "seed": {"type": "integer"},
        "suites": {"type": "array", "items": {"enum": list(SUITES)}, "uniqueItems": True},
    },
}

DEMO_CONFIG = {
    "space": {"cells": ["a", "b"], "sigma": ["1", "2"], "lambda": ["1", "-1"], "eta": ["0", "0"]},
    "coefficient_dim": 2,
    "z_spec": {"seed": 7, "norm_cap": "1/20"},
    "degree": 5,
    "depth": 8,
    "tolerance": 1e-10,
    "seed": 0,
    "suites": list(SUITES),
}


class ConfigError(ValueError):
    """Invalid configuration; ``pointer`` locates the offending field."""

    def __init__(self, pointer: str, message: str):
        super().__init__(f"{pointer or '/'}: {message}")
        self.pointer = pointer
        self.message = message


def _pointer(path) -> str:
    return "".join("/" + str(p).replace("~", "~0").replace("/", "~1") for p in path)


@dataclass(frozen=True)
class RunConfig:
    space: DiscreteSpace
    Z: OperatorStepField
    settings: Settings
    suites: tuple
    raw: dict


def validate(raw: dict, suites_override=None, degree=None, depth=None) -> RunConfig:
    """Check ``raw`` (after command-line overrides) and build the run objects."""
    raw = dict(raw) if isinstance(raw, dict) else raw
    if isinstance(raw, dict):
        if suites_override:
            raw["suites"] = list(suites_override)
        if degree is not None:
            raw["degree"] = degree
        if depth is not None:
            raw["depth"] = depth
    e = jsonschema.exceptions.best_match(jsonschema.Draft202012Validator(SCHEMA).iter_errors(raw))
    if e is not None:
        raise ConfigError(_pointer(e.absolute_path), e.message)

    sp_raw = raw["space"]
    n = len(sp_raw["cells"])
    for key in ("sigma", "lambda", "eta"):
        if len(sp_raw[key]) != n:
            raise ConfigError(f"/space/{key}", f"expected {n} entries, one per cell")
    for key, ok, what in (("sigma", lambda v: v > 0, "positive"), ("eta", lambda v: v >= 0, "non-negative")):
        for i, v in enumerate(sp_raw[key]):
            if not ok(Fraction(v.strip())):
                raise ConfigError(f"/space/{key}/{i}", f"{key} must be {what}")
    space = DiscreteSpace.from_lists(sp_raw["sigma"], sp_raw["lambda"], sp_raw["eta"], cells=tuple(sp_raw["cells"]))

    suites = tuple(s for s in SUITES if s in raw.get("suites", []))
    if "globality" in suites and not space.gauss_poisson:
        raise ConfigError("/space/eta", "the globality suite requires eta = 0 on every cell")
    deg, dep = raw["degree"], raw["depth"]
    if {"genfun-numeric", "orthogonality"} & set(suites) and deg + 2 > dep:
        raise ConfigError("/depth", f"depth must be at least degree + 2 = {deg + 2} for the selected suites")

    g = raw["coefficient_dim"]
    zs = raw["z_spec"]
    if "matrices" in zs:
        for c, m in zs["matrices"].items():
            if c not in space.cells:
                raise ConfigError(f"/z_spec/matrices/{c}", "unknown cell")
            if len(m) != g or any(len(row) != g for row in m):
                raise ConfigError(f"/z_spec/matrices/{c}", f"expected a {g} x {g} matrix")
        Z = OperatorStepField(space, g, {c: m for c, m in zs["matrices"].items()})
    else:
        cap = Fraction(zs["norm_cap"].strip())
        if cap <= 0:
            raise ConfigError("/z_spec/norm_cap", "norm_cap must be positive")
        Z = random_field(random.Random(zs["seed"]), space, g, cap)

    settings = Settings(deg, dep, float(raw.get("tolerance", 1e-10)), raw.get("seed", 0))
    return RunConfig(space, Z, settings, suites, raw)
