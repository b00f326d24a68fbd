"""Comparison methods: model patching, tabular Q-learning, KNN residual dynamics."""

from __future__ import annotations

import random
import time

import numpy as np
from scipy.spatial import cKDTree

from cmax.core import ActionId, Environment, State
from cmax.loop import LargeConfig, ReplayBuffer, SmallConfig, TrialRecord, update_estimator
from cmax.search import DeadEnd, lookahead
from cmax.value import TabularValues


class PatchedModel:
    """The environment model with observed true successors written over it."""

    def __init__(self, env: Environment):
        self.env = env
        self.n_actions = env.n_actions
        self.overlay: dict[tuple, State] = {}

    def patch(self, s: State, a: ActionId, observed: State) -> None:
        self.overlay[(self.env.key(s), a)] = observed

    def successor(self, s, a):
        hit = self.overlay.get((self.env.key(s), a))
        return self.env.model_step(s, a) if hit is None else hit

    def cost(self, s, a):
        return self.env.cost(s, a)

    def is_goal(self, s):
        return self.env.is_goal(s)

    def key(self, s):
        return self.env.key(s)


def rtaa_patch_step(s: State, env: Environment, model: PatchedModel, V, K: int, rec: TrialRecord) -> State:
    """One plan-execute step of RTAA* that patches the model on mismatch."""
    t0 = time.perf_counter()
    res = lookahead(s, model, V, K)
    V.apply_updates(res.value_updates)
    rec.per_step_plan_time.append(time.perf_counter() - t0)
    rec.expansions.append(res.expansions_used)
    a = res.best_action
    nxt = env.true_step(s, a)
    if nxt != model.successor(s, a):
        model.patch(s, a, nxt)
        rec.discrepancies.append((s, a, rec.steps))
    rec.trajectory.append((s, a, nxt))
    rec.steps += 1
    return nxt


def run_rtaa_patch(env: Environment, cfg: SmallConfig, seed=None, values=None) -> TrialRecord:
    model = PatchedModel(env)
    V = values if values is not None else TabularValues(env.initial_heuristic, key=env.key)
    rec = TrialRecord()
    s = env.start
    while not env.is_goal(s) and rec.steps < cfg.max_steps:
        try:
            s = rtaa_patch_step(s, env, model, V, cfg.K, rec)
        except DeadEnd:
            rec.failure = "dead_end"
            break
    rec.reached_goal = env.is_goal(s)
    if not rec.reached_goal and rec.failure is None:
        rec.failure = "cutoff"
    return rec


class QTable:
    """Cost-minimizing Q-values; unseen entries come from ``init(s, a)``."""

    def __init__(self, env: Environment, alpha: float = 0.5, epsilon: float = 0.1, init: str = "zero"):
        self.env = env
        self.alpha = alpha
        self.epsilon = epsilon
        self.init = init
        self.table: dict[tuple, float] = {}

    def _initial(self, s, a) -> float:
        if self.env.is_goal(s) or self.init == "zero":
            return 0.0
        # "model": one-step lookahead through the model onto the heuristic
        return self.env.cost(s, a) + self.env.initial_heuristic(self.env.model_step(s, a))

    def q(self, s, a) -> float:
        if self.env.is_goal(s):
            return 0.0
        k = (self.env.key(s), a)
        v = self.table.get(k)
        if v is None:
            v = self.table[k] = self._initial(s, a)
        return v

    def greedy(self, s) -> ActionId:
        qs = [self.q(s, a) for a in range(self.env.n_actions)]
        return qs.index(min(qs))

    def backup(self, s, a, nxt) -> None:
        if self.env.is_goal(s):
            return
        target = self.env.cost(s, a) + min(self.q(nxt, b) for b in range(self.env.n_actions))
        k = (self.env.key(s), a)
        self.table[k] = (1 - self.alpha) * self.q(s, a) + self.alpha * target


def q_step(qtable: QTable, env: Environment, s: State, rng: random.Random) -> tuple[ActionId, State]:
    """Epsilon-greedy action, executed in the true dynamics and backed up."""
    if rng.random() < qtable.epsilon:
        a = rng.randrange(env.n_actions)
    else:
        a = qtable.greedy(s)
    nxt = env.true_step(s, a)
    qtable.backup(s, a, nxt)
    return a, nxt


def run_qlearning(env: Environment, max_steps: int, seed=0, alpha: float = 0.5,
                  epsilon: float = 0.1, init: str = "zero") -> TrialRecord:
    rng = random.Random(seed)
    qt = QTable(env, alpha, epsilon, init)
    rec = TrialRecord()
    s = env.start
    while not env.is_goal(s) and rec.steps < max_steps:
        a, nxt = q_step(qt, env, s, rng)
        rec.trajectory.append((s, a, nxt))
        rec.steps += 1
        s = nxt
    rec.reached_goal = env.is_goal(s)
    if not rec.reached_goal:
        rec.failure = "cutoff"
    return rec


class KnnResidualModel:
    """Model successor plus the mean residual observed within ``radius`` for the same action."""

    def __init__(self, env: Environment, radius: float = 0.02):
        self.env = env
        self.radius = radius
        self.n_actions = env.n_actions
        self._points: list[list[np.ndarray]] = [[] for _ in range(env.n_actions)]
        self._residuals: list[list[np.ndarray]] = [[] for _ in range(env.n_actions)]
        self._trees: list[cKDTree | None] = [None] * env.n_actions
        self._cache: dict = {}

    def record(self, s: State, a: ActionId, observed: State) -> None:
        predicted = np.asarray(self.env.model_step(s, a), dtype=float)
        self._points[a].append(np.asarray(s, dtype=float))
        self._residuals[a].append(np.asarray(observed, dtype=float) - predicted)
        self._trees[a] = None
        self._cache.clear()

    def residual(self, s: State, a: ActionId) -> np.ndarray | None:
        pts = self._points[a]
        if not pts:
            return None
        if self._trees[a] is None:
            self._trees[a] = cKDTree(np.asarray(pts))
        hits = self._trees[a].query_ball_point(np.asarray(s, dtype=float), self.radius)
        if not hits:
            return None
        return np.mean([self._residuals[a][i] for i in hits], axis=0)

    def predict(self, s: State, a: ActionId) -> State:
        k = (self.env.key(s), a)
        hit = self._cache.get(k)
        if hit is None:
            base = self.env.model_step(s, a)
            r = self.residual(s, a)
            hit = base if r is None else tuple(round(float(x), 9) for x in np.asarray(base) + r)
            self._cache[k] = hit
        return hit

    successor = predict

    def cost(self, s, a):
        return self.env.cost(s, a)

    def is_goal(self, s):
        return self.env.is_goal(s)

    def key(self, s):
        return self.env.key(s)


knn_predict = KnnResidualModel.predict


def run_knn(env: Environment, cfg: LargeConfig, estimator, seed=0, radius: float = 0.02) -> TrialRecord:
    """Same plan/update schedule as the hypersphere loop, but learning residual dynamics."""
    rng = random.Random(seed)
    model = KnnResidualModel(env, radius)
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
        if env.metric(nxt, model.predict(s, a)) > cfg.xi:
            rec.discrepancies.append((s, a, rec.steps))
        model.record(s, a, nxt)
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
