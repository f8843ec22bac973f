"""Experiment configuration: a frozen, JSON-loadable record.

Every run is determined by (experiment, seed, knobs); the same config must
reproduce identical CSV bytes, so nothing here may depend on wall clock,
hostnames, or dict iteration order.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields, replace

SCHEMA_VERSION = 1

EXPERIMENTS = {
    "cuculescu":
        "stopping projections: weak (1,1) and the refined trace bound",
    "strong_maximal":
        "two-pass strong-maximal projection: corner and trace bounds",
    "jmz_tensor_martingale":
        "one-majorant certificates vs brute force on tensor grids",
    "ergodic_tensor":
        "ergodic means of bistochastic channels: certificates, fixed points",
    "limsup":
        "limsup/tail mixed norms and almost-uniform convergence witnesses",
    "freegroup_sigma":
        "length identity on the no-sign-change set, growth of its spheres",
    "freegroup_diagram":
        "free vs torus Poisson multiplier agreement on Sigma supports",
    "stein_integral":
        "level integral of stopping complements vs the L log L norm",
    "tail_divergence":
        "running-tail maximal norms that grow with dimension (dual routes)",
}


class ConfigError(ValueError):
    """Invalid experiment configuration (CLI exit status 2)."""


@dataclass(frozen=True)
class ExperimentConfig:
    experiment: str
    seed: int = 20260817
    dims: tuple = (4, 8, 16)
    corpus_size: int = 50
    r_min: int = 1
    r_max: int = 8
    epsilon: float = 0.5
    phi_alpha: float = 1.0
    depth: int = 4
    max_len: int = 8
    t_values: tuple = (0.1, 1.0)
    tolerances: tuple = ()          # sorted (name, value) override pairs
    output: str = "reports"
    figures: bool = True

    def __post_init__(self):
        if self.experiment not in EXPERIMENTS:
            raise ConfigError(
                f"unknown experiment {self.experiment!r}; "
                f"known: {', '.join(sorted(EXPERIMENTS))}")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2 ** 64:
            raise ConfigError(f"seed must be a 64-bit integer, got {self.seed!r}")
        dims = tuple(int(d) for d in self.dims)
        if not dims or any(d < 2 for d in dims):
            raise ConfigError(f"dims must each be >= 2, got {self.dims!r}")
        object.__setattr__(self, "dims", dims)
        if self.corpus_size < 1:
            raise ConfigError(f"corpus_size must be >= 1, got {self.corpus_size}")
        if self.r_min > self.r_max:
            raise ConfigError(f"r_min {self.r_min} > r_max {self.r_max}")
        if self.r_min < 0:
            raise ConfigError("r_min must be nonnegative")
        if self.epsilon <= 0:
            raise ConfigError(f"epsilon must be positive, got {self.epsilon}")
        if self.phi_alpha < 0:
            raise ConfigError(f"phi_alpha must be >= 0, got {self.phi_alpha}")
        if self.depth < 1:
            raise ConfigError(f"depth must be >= 1, got {self.depth}")
        if not 0 <= self.max_len <= 12:
            raise ConfigError(f"max_len must be in [0, 12], got {self.max_len}")
        tv = tuple(float(t) for t in self.t_values)
        if any(t < 0 for t in tv):
            raise ConfigError("t_values must be nonnegative")
        object.__setattr__(self, "t_values", tv)
        tol = self.tolerances
        if isinstance(tol, dict):
            tol = tuple(sorted(tol.items()))
        else:
            tol = tuple(sorted((str(k), float(v)) for k, v in tol))
        object.__setattr__(self, "tolerances", tol)

    def tolerance(self, name: str, default: float) -> float:
        for k, v in self.tolerances:
            if k == name:
                return float(v)
        return default

    def to_jsonable(self) -> dict:
        out = {"schema_version": SCHEMA_VERSION}
        for f in fields(self):
            v = getattr(self, f.name)
            if f.name == "tolerances":
                v = {k: val for k, val in v}
            elif isinstance(v, tuple):
                v = list(v)
            out[f.name] = v
        return out


_FIELD_NAMES = {f.name for f in fields(ExperimentConfig)}


def config_from_dict(data: dict) -> ExperimentConfig:
    data = dict(data)
    version = data.pop("schema_version", SCHEMA_VERSION)
    if version != SCHEMA_VERSION:
        raise ConfigError(
            f"unsupported schema_version {version!r}; this build reads "
            f"{SCHEMA_VERSION}")
    unknown = set(data) - _FIELD_NAMES
    if unknown:
        raise ConfigError(f"unknown config keys: {', '.join(sorted(unknown))}")
    if "experiment" not in data:
        raise ConfigError("config must name an experiment")
    try:
        return ExperimentConfig(**data)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc


def load_config(path: str) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise ConfigError("config root must be a JSON object")
    return config_from_dict(data)


def override(cfg: ExperimentConfig, **kwargs) -> ExperimentConfig:
    kwargs = {k: v for k, v in kwargs.items() if v is not None}
    try:
        return replace(cfg, **kwargs)
    except TypeError as exc:
        raise ConfigError(str(exc)) from exc
