"""Seeded trial batches: build an instance per seed, run one algorithm, collect records."""

from __future__ import annotations

import hashlib
import json
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace

from cmax.baselines import run_knn, run_qlearning, run_rtaa_patch
from cmax.envs import PickPlaceGrid, generate_arm, generate_icy, generate_push
from cmax.harness.config import ExperimentConfig
from cmax.loop import LargeConfig, SmallConfig, TrialRecord, run_large, run_small
from cmax.value import KernelValueEstimator, TabularValues


def derive_seed(seed: int, stream: str) -> int:
    """Independent integer seed for a named random stream of one trial."""
    digest = hashlib.sha256(f"{seed}:{stream}".encode()).digest()
    return int.from_bytes(digest[:8], "big")


def make_env(cfg: ExperimentConfig, seed: int):
    kind, p = cfg.environment.kind, dict(cfg.environment.params)
    if kind == "icy":
        return generate_icy(p.get("width", 100), p.get("height", 100), p.get("ice_fraction", 0.0),
                            seed, mode=p.get("mode", "stress"))
    if kind == "push":
        return generate_push(seed, obstacles=p.get("obstacles", True))
    if kind == "pickplace":
        return PickPlaceGrid(**p)
    if kind == "arm":
        return generate_arm(seed, **p)
    raise ValueError(f"unknown environment kind {kind!r}")


def _large_config(cfg: ExperimentConfig) -> LargeConfig:
    a = cfg.algorithm
    return LargeConfig(K=a.K, N=a.N, B=a.B, delta=a.delta, xi=a.xi,
                       buffer_capacity=a.buffer_capacity, max_steps=cfg.max_steps, eta=a.eta)


def _estimator(cfg: ExperimentConfig, env):
    a = cfg.algorithm
    if a.estimator == "tabular":
        return TabularValues(env.initial_heuristic, key=env.key)
    return KernelValueEstimator(env.initial_heuristic, a.gamma, len(env.start),
                                replace_radius=a.delta / 10, key=env.key, eta=a.eta)


def run_trial(cfg: ExperimentConfig, seed: int) -> TrialRecord:
    env = make_env(cfg, seed)
    a = cfg.algorithm
    if a.name == "qlearning":
        return run_qlearning(env, cfg.max_steps, derive_seed(seed, "explore"), a.alpha, a.epsilon, a.q_init)
    if a.name == "rtaa":
        return run_rtaa_patch(env, SmallConfig(a.K, cfg.max_steps))
    if a.name == "knn":
        return run_knn(env, _large_config(cfg), _estimator(cfg, env), derive_seed(seed, "buffer"),
                       a.knn_radius)
    if a.estimator == "tabular" and a.loop == "exact":
        return run_small(env, SmallConfig(a.K, cfg.max_steps))
    return run_large(env, _large_config(cfg), _estimator(cfg, env), derive_seed(seed, "buffer"))


def _run_one(args) -> TrialRecord:
    return run_trial(*args)


def run_batch(cfg: ExperimentConfig, jobs: int = 1, seeds=None) -> list[TrialRecord]:
    """One record per seed, in seed order. Trials are independent, so ``jobs`` only affects speed."""
    cfg.validate()
    seeds = cfg.environment.seeds() if seeds is None else list(seeds)
    work = [(cfg, s) for s in seeds]
    if jobs <= 1 or len(work) <= 1:
        return [_run_one(w) for w in work]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(_run_one, work))


def batch_to_json(cfg: ExperimentConfig, records: list[TrialRecord], timing: bool = False) -> str:
    seeds = cfg.environment.seeds()
    body = {
        "config": cfg.to_dict(),
        "trials": [{"seed": s, **r.to_dict(timing)} for s, r in zip(seeds, records)],
    }
    return json.dumps(body, sort_keys=True)


def with_overrides(cfg: ExperimentConfig, **alg) -> ExperimentConfig:
    return replace(cfg, algorithm=replace(cfg.algorithm, **alg))


SWEEP_DEFAULTS = {
    "gamma": (0.1, 1.0, 3.0, 10.0, 30.0, 100.0),
    "delta": (0.005, 0.01, 0.02, 0.05, 0.1, 0.2),
}
SWEEP_CUTOFFS = {"gamma": 100, "delta": 400}


def sweep(cfg: ExperimentConfig, parameter: str, values=None, n: int = 10, jobs: int = 1):
    """Run ``n`` seeds per value of ``gamma`` or ``delta``; returns ``(values, rows)``."""
    from cmax.harness.stats import summarize

    if parameter not in SWEEP_DEFAULTS:
        raise ValueError(f"sweep parameter must be one of {sorted(SWEEP_DEFAULTS)}")
    values = list(SWEEP_DEFAULTS[parameter] if values is None else values)
    rows = []
    for v in values:
        c = replace(with_overrides(cfg, **{parameter: float(v)}),
                    environment=replace(cfg.environment, n_seeds=n),
                    max_steps=SWEEP_CUTOFFS[parameter], condition=f"{parameter}={v:g}")
        rows.append(summarize(run_batch(c, jobs), c.algorithm.name, c.condition))
    return values, rows
