"""Interleaved plan-execute loops that penalize rather than repair the model."""

from __future__ import annotations

import json
import random
import time
from dataclasses import dataclass, field

from cmax.core import ActionId, Environment, PenalizedModel, State
from cmax.discrepancy import (
    ExactDiscrepancySet,
    HypersphereStore,
    detect_discrepancy,
    lattice_threshold,
)
from cmax.search import DeadEnd, lookahead
from cmax.value import TabularValues


@dataclass
class SmallConfig:
    K: int = 1
    max_steps: int = 10_000

    def __post_init__(self):
        if self.K < 1 or self.max_steps < 1:
            raise ValueError("K and max_steps must be at least 1")


@dataclass
class LargeConfig:
    K: int = 5
    N: int = 5
    B: int = 64
    delta: float = 0.02
    xi: float = 0.01
    buffer_capacity: int = 100_000
    max_steps: int = 1000
    eta: float = 0.001

    def __post_init__(self):
        for name in ("K", "N", "B", "delta", "buffer_capacity", "max_steps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be positive")
        if self.xi < 0:
            raise ValueError("xi must be non-negative")
        if self.B > self.buffer_capacity:
            raise ValueError("B cannot exceed buffer_capacity")


@dataclass
class TrialRecord:
    steps: int = 0
    reached_goal: bool = False
    trajectory: list[tuple[State, ActionId, State]] = field(default_factory=list)
    discrepancies: list[tuple[State, ActionId, int]] = field(default_factory=list)
    expansions: list[int] = field(default_factory=list)
    failure: str | None = None
    # wall-clock is the one nondeterministic field; equality ignores it
    per_step_plan_time: list[float] = field(default_factory=list, compare=False)

    def to_dict(self, timing: bool = True) -> dict:
        d = {
            "steps": self.steps,
            "reached_goal": self.reached_goal,
            "failure": self.failure,
            "trajectory": [[list(s), a, list(n)] for s, a, n in self.trajectory],
            "discrepancies": [[list(s), a, t] for s, a, t in self.discrepancies],
            "expansions": list(self.expansions),
        }
        if timing:
            d["per_step_plan_time_us"] = [round(x * 1e6) for x in self.per_step_plan_time]
        return d

    def to_json(self, timing: bool = True) -> str:
        return json.dumps(self.to_dict(timing), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> "TrialRecord":
        return cls(
            steps=d["steps"],
            reached_goal=d["reached_goal"],
            trajectory=[(tuple(s), a, tuple(n)) for s, a, n in d["trajectory"]],
            discrepancies=[(tuple(s), a, t) for s, a, t in d["discrepancies"]],
            expansions=list(d.get("expansions", [])),
            failure=d.get("failure"),
            per_step_plan_time=[x / 1e6 for x in d.get("per_step_plan_time_us", [])],
        )


class ReplayBuffer:
    """Ring buffer of visited states, sampled uniformly with replacement."""

    def __init__(self, capacity: int = 100_000):
        self.capacity = capacity
        self.items: list[State] = []
        self._next = 0

    def push(self, s: State) -> None:
        if len(self.items) < self.capacity:
            self.items.append(s)
        else:
            self.items[self._next] = s
        self._next = (self._next + 1) % self.capacity

    def sample(self, n: int, rng: random.Random) -> list[State]:
        return rng.choices(self.items, k=n)

    def __len__(self) -> int:
        return len(self.items)


def run_small(env: Environment, cfg: SmallConfig, seed=None, values=None) -> TrialRecord:
    """Tabular loop with an exact set of discovered-incorrect pairs.

    ``seed`` is accepted for interface symmetry; the loop is deterministic.
    """
    store = ExactDiscrepancySet()
    model = PenalizedModel(env, store)
    V = values if values is not None else TabularValues(env.initial_heuristic, key=env.key)
    rec = TrialRecord()
    s = env.start
    while not env.is_goal(s) and rec.steps < cfg.max_steps:
        t0 = time.perf_counter()
        try:
            res = lookahead(s, model, V, cfg.K)
        except DeadEnd:
            rec.failure = "dead_end"
            break
        V.apply_updates(res.value_updates)
        rec.per_step_plan_time.append(time.perf_counter() - t0)
        rec.expansions.append(res.expansions_used)
        a = res.best_action
        nxt = env.true_step(s, a)
        if nxt != env.model_step(s, a):
            store.record(s, a)
            rec.discrepancies.append((s, a, rec.steps))
        rec.trajectory.append((s, a, nxt))
        rec.steps += 1
        s = nxt
    rec.reached_goal = env.is_goal(s)
    if not rec.reached_goal and rec.failure is None:
        rec.failure = "cutoff"
    return rec


def update_estimator(current: State, model, est, buffer: ReplayBuffer, cfg: LargeConfig,
                     rng: random.Random) -> None:
    """``N`` rounds of: sample ``B`` buffered states, look ahead from each, fit once.

    A state closed by several lookaheads in one round keeps its largest target.
    Identical roots give identical lookaheads, so each distinct root is searched once.
    """
    for _ in range(cfg.N):
        targets: dict = {}
        searched = set()
        for root in buffer.sample(cfg.B, rng):
            k = model.key(root)
            if k in searched or model.is_goal(root):
                continue
            searched.add(k)
            try:
                res = lookahead(root, model, est, cfg.K)
            except DeadEnd:
                continue
            for s, v in res.value_updates:
                sk = model.key(s)
                old = targets.get(sk)
                if old is None or v > old[1]:
                    targets[sk] = (s, v)
        est.apply_updates(list(targets.values()))


def run_large(env: Environment, cfg: LargeConfig, estimator, seed=0,
              dim: int | None = None) -> TrialRecord:
    """Hypersphere loop with an approximate estimator refit from a replay buffer."""
    rng = random.Random(seed)
    dim = dim if dim is not None else len(env.start)
    store = HypersphereStore(env.n_actions, dim, cfg.delta, cfg.xi, key=env.key)
    model = PenalizedModel(env, store)
    threshold = lattice_threshold(cfg.xi, env.integer_lattice)
    buffer = ReplayBuffer(cfg.buffer_capacity)
    rec = TrialRecord()
    s = env.start
    while not env.is_goal(s) and rec.steps < cfg.max_steps:
        t0 = time.perf_counter()
        try:
            res = lookahead(s, model, estimator, cfg.K)
        except DeadEnd:
            rec.failure = "dead_end"
            break
        rec.expansions.append(res.expansions_used)
        a = res.best_action
        nxt = env.true_step(s, a)
        if detect_discrepancy(nxt, env.model_step(s, a), env.metric, threshold):
            store.record(s, a)
            rec.discrepancies.append((s, a, rec.steps))
        buffer.push(s)
        update_estimator(s, model, estimator, buffer, cfg, rng)
        rec.per_step_plan_time.append(time.perf_counter() - t0)
        rec.trajectory.append((s, a, nxt))
        rec.steps += 1
        s = nxt
    rec.reached_goal = env.is_goal(s)
    if not rec.reached_goal and rec.failure is None:
        rec.failure = "cutoff"
    return rec
