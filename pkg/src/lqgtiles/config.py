"""Run configuration: a strict JSON key-value document plus CLI overrides.

Exactly one of ``c_m`` / ``q`` must be given.  Unknown keys are rejected
(all of them reported at once).  The canonical form is the JSON encoding
with sorted keys of the fully resolved configuration; ``config_hash`` is
its 128-bit MD5 digest, stable across platforms and key order.

Environment overrides: any key may be supplied as LQGTILES_<KEY> (upper
case); flags beat environment, environment beats file, file beats
defaults.
"""
import hashlib
import json
import math
import os
from dataclasses import dataclass

from .errors import ConfigError, DomainError
from .experiment import FieldSpec, Ladder
from .fractal import FractalSet
from .params import Params, params_from_cm, params_from_q
from .squares import DyadicSquare

ENV_PREFIX = "LQGTILES_"

# key -> (type, default); None default means "no value until resolved"
SCHEMA: dict[str, tuple] = {
    "c_m": (float, None),
    "q": (float, None),
    "epsilon": (float, 2.0 ** -6),
    "ladder_steps": (int, 1),
    "replicas": (int, 1),
    "seed": (int, 0),
    "depth_cap": (int, 16),
    "backend": (str, "octave"),
    "stub_value": (float, 0.0),
    "alpha": (float, None),
    "z0": (list, [0.5, 0.5]),
    "domain_level": (int, 0),
    "field_depth": (int, None),
    "max_global_cells": (int, 4224),
    "workers": (int, 1),
    "out": (str, None),
    "fractal": (dict, {"kind": "horizontal-segment"}),
    "z": (list, [0.25, 0.5]),
    "w": (list, [0.75, 0.5]),
    "radii": (list, [4, 8, 16, 32, 64, 128, 256]),
    "center": (list, [0.5, 0.5]),
}

_BACKENDS = ("octave", "exact", "stub")

# keys that change how a run executes but never what it computes; they are
# excluded from the config hash so outputs stay byte-identical across them
_NON_SEMANTIC_KEYS = ("workers", "out")


@dataclass
class RunConfig:
    values: dict
    config_hash: str

    def __getattr__(self, name):
        try:
            return self.values[name]
        except KeyError:
            raise AttributeError(name)

    @property
    def params(self) -> Params:
        if self.values["q"] is not None:
            return params_from_q(self.values["q"])
        return params_from_cm(self.values["c_m"])

    @property
    def domain(self) -> DyadicSquare:
        return DyadicSquare(self.values["domain_level"], 0, 0)

    @property
    def ladder(self) -> Ladder:
        return Ladder(eps0=self.values["epsilon"],
                      steps=self.values["ladder_steps"],
                      replicas=self.values["replicas"],
                      base_seed=self.values["seed"])

    @property
    def fieldspec(self) -> FieldSpec:
        depth = self.values["field_depth"]
        if depth is None:
            depth = self.values["depth_cap"] + 1
        d = self.domain
        return FieldSpec(backend=self.values["backend"],
                         window=(d.level, d.ix, d.iy),
                         depth=depth,
                         stub_value=self.values["stub_value"],
                         alpha=self.values["alpha"],
                         z0=tuple(self.values["z0"]) if self.values["alpha"] is not None else None,
                         max_global_cells=self.values["max_global_cells"])

    @property
    def fractal_set(self) -> FractalSet:
        return FractalSet.from_dict(self.values["fractal"])


def _coerce(key: str, value):
    typ, _ = SCHEMA[key]
    if value is None:
        return None
    if typ is float and isinstance(value, (int, float)) and not isinstance(value, bool):
        return float(value)
    if typ is int:
        if isinstance(value, bool) or (isinstance(value, float) and value != int(value)):
            raise ConfigError(f"key {key!r} must be an integer, got {value!r}")
        if isinstance(value, (int, float)):
            return int(value)
    if typ is str and isinstance(value, str):
        return value
    if typ is list and isinstance(value, (list, tuple)):
        return list(value)
    if typ is dict and isinstance(value, dict):
        return dict(value)
    if isinstance(value, str) and typ in (float, int):
        try:
            return typ(value)
        except ValueError:
            pass
    raise ConfigError(f"key {key!r} expects {typ.__name__}, got {value!r}")


def canonical_json(values: dict) -> str:
    return json.dumps(values, sort_keys=True, separators=(",", ":"))


def resolve_config(file_values: dict | None = None,
                   overrides: dict | None = None,
                   environ: dict | None = None) -> RunConfig:
    """Merge defaults < file < environment < explicit overrides; validate."""
    merged = {k: d for k, (_, d) in SCHEMA.items()}
    bad = []
    for source in (file_values or {},):
        for k, v in source.items():
            if k not in SCHEMA:
                bad.append(k)
        if bad:
            raise ConfigError(f"unknown config keys: {sorted(bad)}")
        for k, v in source.items():
            merged[k] = _coerce(k, v)
    env = environ if environ is not None else os.environ
    for k in SCHEMA:
        ev = env.get(ENV_PREFIX + k.upper())
        if ev is not None:
            typ = SCHEMA[k][0]
            merged[k] = _coerce(k, json.loads(ev) if typ in (list, dict) else ev)
    for k, v in (overrides or {}).items():
        if k not in SCHEMA:
            raise ConfigError(f"unknown override key {k!r}")
        if v is not None:
            merged[k] = _coerce(k, v)

    if merged["c_m"] is not None and merged["q"] is not None:
        raise ConfigError("give exactly one of c_m / q, not both")
    if merged["c_m"] is None and merged["q"] is None:
        raise ConfigError("one of c_m / q is required")
    if merged["c_m"] is not None and not merged["c_m"] < 25.0:
        raise DomainError(f"c_m must be < 25, got {merged['c_m']}")
    if merged["backend"] not in _BACKENDS:
        raise ConfigError(f"backend must be one of {_BACKENDS}")
    if merged["epsilon"] <= 0.0:
        raise DomainError("epsilon must be > 0")

    semantic = {k: v for k, v in merged.items() if k not in _NON_SEMANTIC_KEYS}
    digest = hashlib.md5(canonical_json(semantic).encode()).hexdigest()
    return RunConfig(values=merged, config_hash=digest)


def parse_config(text: str, overrides: dict | None = None) -> RunConfig:
    """Parse a JSON config document and resolve it."""
    try:
        data = json.loads(text) if text.strip() else {}
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config document must be a JSON object")
    return resolve_config(data, overrides)
