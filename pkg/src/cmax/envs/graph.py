"""Random finite graphs with explicit successor tables, for oracle comparisons."""

from __future__ import annotations

import random
from typing import Iterator

from cmax.core import Environment, State


class FiniteGraph(Environment):
    """States are ``(i,)`` for ``i < n``; ``succ[i][a]`` and ``costs[i][a]`` define the model.

    ``true_succ`` defaults to the model table. ``heuristic`` maps state index to
    the initial cost-to-go (zero when omitted).
    """

    integer_lattice = True

    def __init__(self, succ, costs, goals, start=0, true_succ=None, heuristic=None):
        self.succ = [list(row) for row in succ]
        self.costs = [list(map(float, row)) for row in costs]
        self.true_succ = [list(row) for row in (true_succ or succ)]
        self.goals = frozenset(goals)
        self.n_actions = len(self.succ[0])
        self.start = (int(start),)
        self.heuristic = list(heuristic) if heuristic is not None else [0.0] * len(self.succ)

    def true_step(self, s, a):
        return s if self.is_goal(s) else (self.true_succ[s[0]][a],)

    def model_step(self, s, a):
        return s if self.is_goal(s) else (self.succ[s[0]][a],)

    def cost(self, s, a):
        return 0.0 if self.is_goal(s) else self.costs[s[0]][a]

    def is_goal(self, s):
        return s[0] in self.goals

    def in_bounds(self, s):
        return len(s) == 1 and 0 <= s[0] < len(self.succ)

    @property
    def state_space_size(self):
        return float(len(self.succ))

    def initial_heuristic(self, s):
        return self.heuristic[s[0]]

    def states(self) -> Iterator[State]:
        return ((i,) for i in range(len(self.succ)))


def random_graph(seed: int, max_states: int = 50, n_actions: int = 3) -> FiniteGraph:
    """Random graph with positive costs in (0, 1] and one or two goals; start is never a goal."""
    rng = random.Random(seed)
    n = rng.randint(3, max_states)
    goals = set(rng.sample(range(1, n), rng.randint(1, min(2, n - 1))))
    succ = [[rng.randrange(n) for _ in range(n_actions)] for _ in range(n)]
    costs = [[rng.choice((0.25, 0.5, 0.75, 1.0)) for _ in range(n_actions)] for _ in range(n)]
    return FiniteGraph(succ, costs, goals, start=0)
