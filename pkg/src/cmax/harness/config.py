"""Experiment configuration stored as YAML.

A config names one environment family, one algorithm with its
hyperparameters, a seed range and a step cutoff. Loading validates every
field and reports problems by dotted path (``algorithm.K: must be >= 1``).
"""

from __future__ import annotations

from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import yaml

ENV_KINDS = ("icy", "push", "pickplace", "arm")
ALGORITHMS = ("cmax", "rtaa", "qlearning", "knn")


class ConfigError(ValueError):
    """Invalid configuration; the message starts with the offending field path."""


@dataclass
class EnvironmentSpec:
    kind: str = "icy"
    params: dict = field(default_factory=dict)
    seed_start: int = 0
    n_seeds: int = 10

    def seeds(self) -> list[int]:
        return list(range(self.seed_start, self.seed_start + self.n_seeds))


@dataclass
class AlgorithmSpec:
    name: str = "cmax"
    # "exact" flags single pairs; "hypersphere" flags delta-balls and refits
    # the estimator from a replay buffer
    loop: str = "exact"
    estimator: str = "tabular"
    K: int = 1
    N: int = 5
    B: int = 64
    delta: float = 0.02
    xi: float = 0.01
    gamma: float = 10.0
    alpha: float = 0.5
    epsilon: float = 0.1
    eta: float = 0.001
    q_init: str = "zero"
    knn_radius: float = 0.02
    buffer_capacity: int = 100_000


@dataclass
class ExperimentConfig:
    name: str = "experiment"
    condition: str = ""
    environment: EnvironmentSpec = field(default_factory=EnvironmentSpec)
    algorithm: AlgorithmSpec = field(default_factory=AlgorithmSpec)
    max_steps: int = 1000
    out_dir: str = "results"

    def validate(self) -> "ExperimentConfig":
        env, alg = self.environment, self.algorithm
        checks = [
            ("environment.kind", env.kind in ENV_KINDS, f"must be one of {', '.join(ENV_KINDS)}"),
            ("environment.n_seeds", env.n_seeds >= 1, "must be >= 1"),
            ("environment.seed_start", env.seed_start >= 0, "must be >= 0"),
            ("algorithm.name", alg.name in ALGORITHMS, f"must be one of {', '.join(ALGORITHMS)}"),
            ("algorithm.loop", alg.loop in ("exact", "hypersphere"), "must be exact or hypersphere"),
            ("algorithm.loop", not (alg.loop == "exact" and alg.estimator == "kernel" and alg.name == "cmax"),
             "the exact loop needs the tabular estimator"),
            ("algorithm.estimator", alg.estimator in ("tabular", "kernel"), "must be tabular or kernel"),
            ("algorithm.K", alg.K >= 1, "must be >= 1"),
            ("algorithm.N", alg.N >= 1, "must be >= 1"),
            ("algorithm.B", 1 <= alg.B <= alg.buffer_capacity, "must be in [1, buffer_capacity]"),
            ("algorithm.delta", alg.delta > 0, "must be positive"),
            ("algorithm.xi", alg.xi >= 0, "must be non-negative"),
            ("algorithm.gamma", alg.gamma > 0, "must be positive"),
            ("algorithm.alpha", 0 < alg.alpha <= 1, "must be in (0, 1]"),
            ("algorithm.epsilon", 0 <= alg.epsilon <= 1, "must be in [0, 1]"),
            ("algorithm.q_init", alg.q_init in ("zero", "model"), "must be zero or model"),
            ("algorithm.knn_radius", alg.knn_radius > 0, "must be positive"),
            ("max_steps", self.max_steps >= 1, "must be >= 1"),
        ]
        for path, ok, msg in checks:
            if not ok:
                raise ConfigError(f"{path}: {msg}")
        return self

    def to_dict(self) -> dict:
        return asdict(self)

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        if not isinstance(data, dict):
            raise ConfigError("<root>: expected a mapping")
        data = dict(data)
        env = _build(EnvironmentSpec, data.pop("environment", {}) or {}, "environment")
        alg = _build(AlgorithmSpec, data.pop("algorithm", {}) or {}, "algorithm")
        cfg = _build(cls, data, "", environment=env, algorithm=alg)
        return cfg.validate()

    def to_yaml(self) -> str:
        return yaml.safe_dump(self.to_dict(), sort_keys=False)

    @classmethod
    def from_yaml(cls, text: str) -> "ExperimentConfig":
        try:
            data = yaml.safe_load(text)
        except yaml.YAMLError as exc:
            raise ConfigError(f"<root>: unreadable YAML ({exc})") from exc
        return cls.from_dict(data or {})

    def save(self, path) -> None:
        Path(path).write_text(self.to_yaml())

    @classmethod
    def load(cls, path) -> "ExperimentConfig":
        return cls.from_yaml(Path(path).read_text())


def _build(kind, data: dict, prefix: str, **extra):
    if not isinstance(data, dict):
        raise ConfigError(f"{prefix or '<root>'}: expected a mapping")
    known = {f.name: f for f in fields(kind)}
    kwargs = dict(extra)
    for key, value in data.items():
        path = f"{prefix}.{key}" if prefix else key
        if key not in known:
            raise ConfigError(f"{path}: unknown field")
        default = known[key].default
        if isinstance(default, bool) or default is None:
            pass
        elif isinstance(default, int) and not isinstance(value, int):
            raise ConfigError(f"{path}: expected an integer, got {value!r}")
        elif isinstance(default, float) and not isinstance(value, (int, float)):
            raise ConfigError(f"{path}: expected a number, got {value!r}")
        elif isinstance(default, float):
            value = float(value)
        elif isinstance(default, str) and not isinstance(value, str):
            raise ConfigError(f"{path}: expected a string, got {value!r}")
        kwargs[key] = value
    if "params" in kwargs and not isinstance(kwargs["params"], dict):
        raise ConfigError(f"{prefix}.params: expected a mapping")
    return kind(**kwargs)
