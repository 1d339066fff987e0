"""Dataclass configs loaded strictly from JSON: unknown keys are rejected and
every error names the offending key."""
from __future__ import annotations

import dataclasses
import json
import types
import typing
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Union

from .errors import ConfigError
from .lambda_chem import DEFAULT_PHI

CHEMISTRIES = ("lambda", "tile", "arms")
OUTFLOW_POLICIES = ("default", "none", "constant_population", "rate")


def _type_name(tp) -> str:
    return getattr(tp, "__name__", str(tp))


def _convert(tp, value, where: str):
    origin = typing.get_origin(tp)
    if origin in (Union, types.UnionType):
        args = typing.get_args(tp)
        if value is None and type(None) in args:
            return None
        (inner,) = [a for a in args if a is not type(None)]
        return _convert(inner, value, where)
    if origin is list:
        if not isinstance(value, list):
            raise ConfigError(f"key '{where}' must be a list")
        (inner,) = typing.get_args(tp)
        return [_convert(inner, v, f"{where}[{i}]") for i, v in enumerate(value)]
    if dataclasses.is_dataclass(tp):
        return from_dict(tp, value, where)
    if tp is Any:
        return value
    if tp is float:
        if isinstance(value, bool) or not isinstance(value, (int, float)):
            raise ConfigError(f"key '{where}' must be a number")
        return float(value)
    if tp is int:
        if isinstance(value, bool) or not isinstance(value, int):
            raise ConfigError(f"key '{where}' must be an integer")
        return value
    if tp is dict:
        if not isinstance(value, dict):
            raise ConfigError(f"key '{where}' must be an object")
        return value
    if not isinstance(value, tp):
        raise ConfigError(f"key '{where}' must be of type {_type_name(tp)}")
    return value


def from_dict(cls, data, where: str = ""):
    """Build dataclass ``cls`` from a JSON object, rejecting unknown keys."""
    label = where or cls.__name__
    if not isinstance(data, dict):
        raise ConfigError(f"key '{label}' must be an object")
    hints = typing.get_type_hints(cls)
    names = {f.name for f in dataclasses.fields(cls)}
    prefix = f"{where}." if where else ""
    for key in data:
        if key not in names:
            raise ConfigError(f"unknown key '{prefix}{key}'")
    kwargs = {k: _convert(hints[k], v, f"{prefix}{k}") for k, v in data.items()}
    try:
        return cls(**kwargs)
    except ConfigError:
        raise
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"invalid '{label}': {exc}") from exc


def to_dict(obj) -> dict:
    return dataclasses.asdict(obj)


def load_json(path) -> dict:
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc


# -- reactor -----------------------------------------------------------------


@dataclass
class MoleculeSpec:
    molecule: str
    count: int = 1

    def __post_init__(self):
        if self.count < 1:
            raise ConfigError("key 'count' must be >= 1")


@dataclass
class OutflowConfig:
    policy: str = "default"
    p: float = 0.0

    def __post_init__(self):
        if self.policy not in OUTFLOW_POLICIES:
            raise ConfigError(f"key 'outflow.policy' must be one of {OUTFLOW_POLICIES}")
        if not 0.0 <= self.p <= 1.0:
            raise ConfigError("key 'outflow.p' must lie in [0, 1]")


@dataclass
class ReactorConfig:
    seed: int = 0
    max_steps: int = 1000
    chemistry: str = "lambda"
    chemistry_params: dict = field(default_factory=dict)
    initial_population: dict = field(default_factory=dict)
    outflow: OutflowConfig = field(default_factory=OutflowConfig)
    symmetric_collisions: bool = False
    track_instances: bool = False
    sample_every: int = 100

    def __post_init__(self):
        if self.chemistry not in CHEMISTRIES:
            raise ConfigError(f"key 'chemistry': unknown chemistry {self.chemistry!r}, "
                              f"expected one of {CHEMISTRIES}")
        if self.max_steps < 1:
            raise ConfigError("key 'max_steps' must be >= 1")
        if self.sample_every < 1:
            raise ConfigError("key 'sample_every' must be >= 1")
        if not 0 <= self.seed < 2**64:
            raise ConfigError("key 'seed' must be a non-negative 64-bit integer")

    def resolved_outflow(self) -> str:
        if self.outflow.policy != "default":
            return self.outflow.policy
        return "constant_population" if self.chemistry == "lambda" else "none"


# per-chemistry parameter blocks


@dataclass
class LambdaParams:
    phi: str = DEFAULT_PHI
    max_steps: int = 10_000
    max_nodes: int = 100_000


@dataclass
class TileParams:
    pass


@dataclass
class RandomRulesSpec:
    n_rules: int = 6
    alphabet_size: int = 3
    max_side_size: int = 3
    target_order_parameter: float = 0.5


@dataclass
class ArmsParams:
    rules: Optional[list[str]] = None
    random_rules: Optional[RandomRulesSpec] = None
    stochastic_rule_choice: bool = False

    def __post_init__(self):
        if (self.rules is None) == (self.random_rules is None):
            raise ConfigError("chemistry_params needs exactly one of 'rules' or 'random_rules'")


@dataclass
class LambdaRandomInit:
    count: int = 100
    max_depth: int = 6
    var_pool_size: int = 3
    p_var: float = 0.3
    p_abs: float = 0.4
    p_app: float = 0.3
    closed: bool = True
    max_attempts: int = 1_000_000


@dataclass
class TileRandomInit:
    count: int = 100
    min_area: int = 1
    max_area: int = 4

    def __post_init__(self):
        if not 1 <= self.min_area <= self.max_area:
            raise ConfigError("need 1 <= min_area <= max_area")


@dataclass
class ArmsRandomInit:
    size: int = 4
    alphabet_size: int = 3


@dataclass
class LambdaInit:
    molecules: Optional[list[MoleculeSpec]] = None
    random: Optional[LambdaRandomInit] = None


@dataclass
class TileInit:
    molecules: Optional[list[MoleculeSpec]] = None
    random: Optional[TileRandomInit] = None


@dataclass
class ArmsInit:
    state: Optional[str] = None
    random: Optional[ArmsRandomInit] = None


def _one_of(init, names, where="initial_population"):
    given = [n for n in names if getattr(init, n) is not None]
    if len(given) != 1:
        raise ConfigError(f"key '{where}' needs exactly one of {names}")
    return init


PARAMS = {"lambda": LambdaParams, "tile": TileParams, "arms": ArmsParams}
INITS = {"lambda": (LambdaInit, ("molecules", "random")),
         "tile": (TileInit, ("molecules", "random")),
         "arms": (ArmsInit, ("state", "random"))}


def chemistry_params(cfg: ReactorConfig):
    return from_dict(PARAMS[cfg.chemistry], cfg.chemistry_params, "chemistry_params")


def initial_population(cfg: ReactorConfig):
    cls, names = INITS[cfg.chemistry]
    return _one_of(from_dict(cls, cfg.initial_population, "initial_population"), names)


# -- experiments -------------------------------------------------------------


@dataclass
class OutputPaths:
    event_log: Optional[str] = None
    timeseries: Optional[str] = None
    report: Optional[str] = None

    def __post_init__(self):
        paths = [p for p in (self.event_log, self.timeseries, self.report) if p is not None]
        if len(set(paths)) != len(paths):
            raise ConfigError("key 'outputs': output paths must be distinct")


@dataclass
class ExperimentConfig(ReactorConfig):
    outputs: OutputPaths = field(default_factory=OutputPaths)


@dataclass
class SweepRunParams:
    n_rules: int = 6
    alphabet_size: int = 3
    max_side_size: int = 3
    initial_size: int = 4
    max_steps: int = 500
    stochastic_rule_choice: bool = False


@dataclass
class SweepConfig:
    seed: int = 20261016
    grid: list[float] = field(default_factory=lambda: [0.0, 0.25, 0.5, 0.75, 1.0])
    runs_per_point: int = 200
    run_params: SweepRunParams = field(default_factory=SweepRunParams)
    workers: int = 1
    output: Optional[str] = None

    def __post_init__(self):
        if not self.grid:
            raise ConfigError("key 'grid' must be nonempty")
        if any(not 0.0 <= g <= 1.0 for g in self.grid):
            raise ConfigError("key 'grid' values must lie in [0, 1]")
        if self.runs_per_point < 1:
            raise ConfigError("key 'runs_per_point' must be >= 1")


@dataclass
class OdeConfig:
    x0: list[float]
    W: list[list[float]]
    t_end: float
    dt: float
    output: Optional[str] = None
