"""3D end-effector lattice carrying an object that may be too heavy to lift high."""

from __future__ import annotations

from typing import Iterator

from cmax.core import Environment, State
from cmax.oracles import dijkstra_oracle

MOVES = ((1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1))
UP = 4


class PickPlaceGrid(Environment):
    """Unit moves along each axis around a modeled box obstacle.

    When ``heavy`` is set the true arm cannot raise the object above
    ``z_limit``; the model ignores the mass. The initial heuristic is the
    model's exact cost-to-go, computed once by a backward search.
    """

    n_actions = 6
    integer_lattice = True

    def __init__(self, size=20, obstacle=((9, 2, 0), (10, 17, 7)), z_limit=5, heavy=False,
                 start=(5, 10, 2), goal=(14, 10, 2)):
        self.size = int(size)
        self.obstacle = (tuple(obstacle[0]), tuple(obstacle[1]))
        self.z_limit = int(z_limit)
        self.heavy = bool(heavy)
        self.start = tuple(start)
        self.goal = tuple(goal)
        for c in (self.start, self.goal):
            if self.blocked(c):
                raise ValueError(f"{c} lies inside the obstacle")
        self._h: dict[State, float] | None = None

    def blocked(self, c: State) -> bool:
        lo, hi = self.obstacle
        return all(lo[i] <= c[i] <= hi[i] for i in range(3))

    def model_step(self, s, a):
        if s == self.goal:
            return s
        n = tuple(s[i] + MOVES[a][i] for i in range(3))
        if not self.in_bounds(n) or self.blocked(n):
            return s
        return n

    def true_step(self, s, a):
        if self.heavy and a == UP and s[2] >= self.z_limit and s != self.goal:
            return s
        return self.model_step(s, a)

    def is_goal(self, s):
        return s == self.goal

    def in_bounds(self, s):
        return all(0 <= c < self.size for c in s)

    @property
    def state_space_size(self):
        return float(self.size**3)

    def states(self) -> Iterator[State]:
        n = self.size
        for x in range(n):
            for y in range(n):
                for z in range(n):
                    yield (x, y, z)

    def initial_heuristic(self, s):
        if self._h is None:
            self._h = dijkstra_oracle(
                self.states(), self.n_actions, self.model_step, self.cost, self.is_goal
            )
        return self._h[s]

    def to_dict(self) -> dict:
        return {
            "kind": "pickplace",
            "size": self.size,
            "obstacle": [list(self.obstacle[0]), list(self.obstacle[1])],
            "z_limit": self.z_limit,
            "heavy": self.heavy,
            "start": list(self.start),
            "goal": list(self.goal),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PickPlaceGrid":
        return cls(d["size"], d["obstacle"], d["z_limit"], d["heavy"], d["start"], d["goal"])
