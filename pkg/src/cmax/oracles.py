"""Brute-force oracles over finite environments, independent of the planners."""

from __future__ import annotations

import heapq
import math
from collections import deque
from typing import Callable, Hashable, Iterable, Sequence

from cmax.core import ActionId, Environment, State

INF = math.inf


def incorrect_pairs(env: Environment, threshold: float | None = None) -> set[tuple[State, ActionId]]:
    """Every (s, a) whose true and modeled successors differ.

    With ``threshold`` set, a pair counts only when the metric distance
    between the two successors exceeds it.
    """
    out = set()
    for s in env.states():
        for a in range(env.n_actions):
            t, m = env.true_step(s, a), env.model_step(s, a)
            if threshold is None:
                wrong = t != m
            else:
                wrong = env.metric(t, m) > threshold
            if wrong:
                out.add((s, a))
    return out


def dijkstra_oracle(
    states: Iterable[State],
    n_actions: int,
    step: Callable[[State, ActionId], State],
    cost: Callable[[State, ActionId], float],
    is_goal: Callable[[State], bool],
) -> dict[State, float]:
    """Optimal cost-to-go by uniform-cost search backwards from the goals.

    Unreachable states map to ``inf``.
    """
    states = list(states)
    preds: dict[State, list[tuple[State, float]]] = {s: [] for s in states}
    for s in states:
        if is_goal(s):
            continue
        for a in range(n_actions):
            preds.setdefault(step(s, a), []).append((s, cost(s, a)))
    dist = {s: INF for s in states}
    heap = []
    for s in states:
        if is_goal(s):
            dist[s] = 0.0
            heap.append((0.0, s))
    heapq.heapify(heap)
    while heap:
        d, s = heapq.heappop(heap)
        if d > dist[s]:
            continue
        for p, c in preds.get(s, ()):
            nd = d + c
            if nd < dist[p]:
                dist[p] = nd
                heapq.heappush(heap, (nd, p))
    return dist


def true_reachable(env: Environment, start: State | None = None) -> set[State]:
    start = env.start if start is None else start
    seen = {start}
    queue = deque([start])
    while queue:
        s = queue.popleft()
        if env.is_goal(s):
            continue
        for a in range(env.n_actions):
            n = env.true_step(s, a)
            if n not in seen:
                seen.add(n)
                queue.append(n)
    return seen


def can_reach_goal_avoiding(env: Environment, forbidden: set[tuple[State, ActionId]]) -> set[State]:
    """States with a model path to a goal that uses no forbidden pair."""
    preds: dict[State, list[State]] = {}
    goals = []
    for s in env.states():
        if env.is_goal(s):
            goals.append(s)
            continue
        for a in range(env.n_actions):
            if (s, a) in forbidden:
                continue
            preds.setdefault(env.model_step(s, a), []).append(s)
    good = set(goals)
    queue = deque(goals)
    while queue:
        s = queue.popleft()
        for p in preds.get(s, ()):
            if p not in good:
                good.add(p)
                queue.append(p)
    return good


def assumption_holds(env: Environment, forbidden: set[tuple[State, ActionId]]) -> bool:
    """Offline check that no reachable state can get cut off from the goal.

    Every state the true dynamics can reach from the start must keep a model
    path to a goal that avoids ``forbidden`` (the full incorrect set, or its
    delta-inflation), which implies the online assumption at every timestep.
    """
    good = can_reach_goal_avoiding(env, forbidden)
    return true_reachable(env) <= good


def inflate_pairs(
    pairs: Iterable[tuple[State, ActionId]],
    states: Sequence[State],
    delta: float,
    metric: Callable[[State, State], float],
) -> set[tuple[State, ActionId]]:
    """All (s, a) within ``delta`` of some pair with the same action."""
    out = set()
    by_action: dict[ActionId, list[State]] = {}
    for s, a in pairs:
        by_action.setdefault(a, []).append(s)
    for a, centers in by_action.items():
        for s in states:
            if any(metric(s, c) <= delta for c in centers):
                out.add((s, a))
    return out


def greedy_cover(
    points: Sequence[tuple[State, ActionId]],
    delta: float,
    metric: Callable[[State, State], float],
) -> int:
    """Size of a greedy radius-``delta`` cover, an upper bound on the covering number."""
    uncovered = list(points)
    picks = 0
    while uncovered:
        cs, ca = uncovered[0]
        picks += 1
        uncovered = [(s, a) for s, a in uncovered if not (a == ca and metric(s, cs) <= delta)]
    return picks


def minimum_cover_bruteforce(
    points: Sequence[tuple[State, ActionId]],
    delta: float,
    metric: Callable[[State, State], float],
) -> int:
    """Exact covering number with centers drawn from the points; exponential, tiny inputs only."""
    from itertools import combinations

    points = list(points)
    if not points:
        return 0
    for size in range(1, len(points) + 1):
        for centers in combinations(points, size):
            if all(
                any(a == ca and metric(s, cs) <= delta for cs, ca in centers) for s, a in points
            ):
                return size
    return len(points)


def bellman_residual(
    values: dict[Hashable, float],
    n_actions: int,
    step: Callable[[State, ActionId], State],
    cost: Callable[[State, ActionId], float],
    is_goal: Callable[[State], bool],
) -> float:
    worst = 0.0
    for s, v in values.items():
        if is_goal(s):
            target = 0.0
        else:
            target = min(cost(s, a) + values[step(s, a)] for a in range(n_actions))
        if math.isinf(v) and math.isinf(target):
            continue
        worst = max(worst, abs(v - target))
    return worst
