"""2D gridworld whose icy cells make horizontal moves slip by two cells."""

from __future__ import annotations

import random
from typing import Iterator

from cmax.core import Environment, State
from cmax.oracles import assumption_holds, incorrect_pairs

RIGHT, LEFT, UP, DOWN = range(4)
MOVES = ((1, 0), (-1, 0), (0, 1), (0, -1))


class IcyGrid(Environment):
    """Grid navigation; the planning model is the same grid without ice."""

    n_actions = 4
    integer_lattice = True

    def __init__(self, width: int, height: int, ice, start, goal):
        self.width = int(width)
        self.height = int(height)
        self.ice = frozenset(tuple(c) for c in ice)
        self.start = tuple(start)
        self.goal = tuple(goal)
        if self.start in self.ice or self.goal in self.ice:
            raise ValueError("start and goal must not be icy")

    def _move(self, s: State, a: int, n: int) -> State:
        dx, dy = MOVES[a]
        x = min(max(s[0] + n * dx, 0), self.width - 1)
        y = min(max(s[1] + n * dy, 0), self.height - 1)
        return (x, y)

    def true_step(self, s, a):
        if s == self.goal:
            return s
        slip = 2 if (a == LEFT or a == RIGHT) and s in self.ice else 1
        return self._move(s, a, slip)

    def model_step(self, s, a):
        if s == self.goal:
            return s
        return self._move(s, a, 1)

    def is_goal(self, s):
        return s == self.goal

    def in_bounds(self, s):
        return 0 <= s[0] < self.width and 0 <= s[1] < self.height

    @property
    def state_space_size(self):
        return float(self.width * self.height)

    def initial_heuristic(self, s):
        return float(abs(s[0] - self.goal[0]) + abs(s[1] - self.goal[1]))

    def states(self) -> Iterator[State]:
        for x in range(self.width):
            for y in range(self.height):
                yield (x, y)

    def to_dict(self) -> dict:
        return {
            "kind": "icy",
            "width": self.width,
            "height": self.height,
            "ice": sorted(list(c) for c in self.ice),
            "start": list(self.start),
            "goal": list(self.goal),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "IcyGrid":
        return cls(d["width"], d["height"], [tuple(c) for c in d["ice"]], d["start"], d["goal"])


def generate_icy(
    width: int,
    height: int,
    ice_fraction: float,
    seed: int,
    mode: str = "stress",
    forbidden=None,
    max_tries: int = 1000,
) -> IcyGrid:
    """Uniformly sample start, goal and icy cells.

    ``mode="assumption1"`` rejects instances where some state reachable under
    the true dynamics has no model path to the goal free of incorrect pairs.
    ``forbidden`` may map an instance to a custom set of pairs to avoid
    instead (used for the hypersphere variant of the check).
    """
    rng = random.Random(seed)
    cells = [(x, y) for x in range(width) for y in range(height)]
    for _ in range(max_tries):
        start, goal = rng.sample(cells, 2)
        rest = [c for c in cells if c != start and c != goal]
        n_ice = round(ice_fraction * len(rest))
        env = IcyGrid(width, height, rng.sample(rest, n_ice), start, goal)
        if mode == "stress":
            return env
        avoid = forbidden(env) if forbidden is not None else incorrect_pairs(env)
        if assumption_holds(env, avoid):
            return env
    raise RuntimeError(f"no valid instance after {max_tries} tries (seed {seed})")
