"""Limited-expansion lookahead search (RTAA*-style)."""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from typing import Hashable, Protocol

from cmax.core import ActionId, State


class PlanningModel(Protocol):
    n_actions: int

    def successor(self, s: State, a: ActionId) -> State: ...
    def cost(self, s: State, a: ActionId) -> float: ...
    def is_goal(self, s: State) -> bool: ...
    def key(self, s: State) -> Hashable: ...


class ValueFunction(Protocol):
    def predict(self, s: State) -> float: ...


class DeadEnd(RuntimeError):
    """The open list ran dry before any goal or frontier leaf was found."""

    def __init__(self, closed_size: int):
        super().__init__(f"no reachable frontier after closing {closed_size} states")
        self.closed_size = closed_size


@dataclass
class LookaheadResult:
    best_action: ActionId
    best_leaf: State
    value_updates: list[tuple[State, float]] = field(default_factory=list)
    expansions_used: int = 0


def lookahead(root: State, model: PlanningModel, V: ValueFunction, K: int) -> LookaheadResult:
    """Expand at most ``K`` states best-first from ``root`` and back up values.

    Open-list priority is ``g + V``; ties prefer the larger ``g``, then
    insertion order (successors are inserted in action-index order).
    ``V`` is only read. The returned updates assign every closed state
    ``g(best) + V(best) - g(state)``; applying them is the caller's job.
    """
    if K < 1:
        raise ValueError("K must be at least 1")
    if model.is_goal(root):
        raise ValueError("lookahead root is already a goal")

    key = model.key
    counter = itertools.count()
    root_key = key(root)
    states = {root_key: root}
    g = {root_key: 0.0}
    h = {root_key: V.predict(root)}
    parent: dict[Hashable, tuple[Hashable, ActionId] | None] = {root_key: None}
    closed: dict[Hashable, State] = {}
    heap = [(h[root_key], -0.0, next(counter), root_key)]

    def pop():
        while heap:
            _, neg_g, _, k = heapq.heappop(heap)
            # stale entries: already closed or superseded by a cheaper g
            if k in closed or -neg_g != g[k]:
                continue
            return k
        return None

    best = None
    expansions = 0
    while expansions < K:
        k = pop()
        if k is None:
            raise DeadEnd(len(closed))
        s = states[k]
        if model.is_goal(s):
            best = k
            break
        # closing at pop time makes self-loops and back-edges skip as closed
        closed[k] = s
        expansions += 1
        gk = g[k]
        for a in range(model.n_actions):
            s2 = model.successor(s, a)
            k2 = key(s2)
            if k2 in closed:
                continue
            ng = gk + model.cost(s, a)
            if k2 in g:
                if g[k2] > ng:
                    g[k2] = ng
                    parent[k2] = (k, a)
                    heapq.heappush(heap, (ng + h[k2], -ng, next(counter), k2))
            else:
                states[k2] = s2
                g[k2] = ng
                h[k2] = V.predict(s2)
                parent[k2] = (k, a)
                heapq.heappush(heap, (ng + h[k2], -ng, next(counter), k2))

    if best is None:
        best = pop()
        if best is None:
            raise DeadEnd(len(closed))

    f_best = g[best] + h[best]
    updates = [(s, f_best - g[k]) for k, s in closed.items()]

    k, action = best, None
    while parent[k] is not None:
        k, action = parent[k]
    return LookaheadResult(
        best_action=action,
        best_leaf=states[best],
        value_updates=updates,
        expansions_used=expansions,
    )
