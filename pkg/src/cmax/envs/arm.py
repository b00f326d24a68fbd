"""7-joint planar arm on a joint-bin lattice with one non-operational joint."""

from __future__ import annotations

import itertools
import math
import random

from cmax.core import Environment, State


class ArmLattice(Environment):
    """Unit-link planar chain; action ``2j`` raises joint ``j`` one bin, ``2j+1`` lowers it.

    The true arm ignores commands to ``broken_joint``; the model does not know.
    The goal is an end-effector ball of radius ``goal_radius`` around ``target``.
    """

    integer_lattice = True

    def __init__(self, start, target, broken_joint=1, n_joints=7, bins=10,
                 joint_range=(-math.pi / 2, math.pi / 2), goal_radius=1.0, link=1.0):
        self.n_joints = int(n_joints)
        self.bins = int(bins)
        self.n_actions = 2 * self.n_joints
        self.joint_range = (float(joint_range[0]), float(joint_range[1]))
        self.bin_width = (self.joint_range[1] - self.joint_range[0]) / (self.bins - 1)
        self.link = float(link)
        self.broken_joint = broken_joint
        self.target = (float(target[0]), float(target[1]))
        self.goal_radius = float(goal_radius)
        self.start = tuple(int(b) for b in start)
        # the chain beyond joint j has length (n - j) * link, bounding one bin's sweep
        self.max_step = 2 * self.n_joints * self.link * math.sin(self.bin_width / 2)

    def end_effector(self, s: State) -> tuple[float, float]:
        phi = 0.0
        x = y = 0.0
        lo, w = self.joint_range[0], self.bin_width
        for b in s:
            phi += lo + b * w
            x += self.link * math.cos(phi)
            y += self.link * math.sin(phi)
        return (x, y)

    def _goal_distance(self, s: State) -> float:
        x, y = self.end_effector(s)
        return math.hypot(x - self.target[0], y - self.target[1])

    def is_goal(self, s):
        return self._goal_distance(s) <= self.goal_radius

    def model_step(self, s, a):
        if self.is_goal(s):
            return s
        j, sign = divmod(a, 2)
        b = s[j] + (1 if sign == 0 else -1)
        if not 0 <= b < self.bins:
            return s
        return s[:j] + (b,) + s[j + 1:]

    def true_step(self, s, a):
        if a // 2 == self.broken_joint:
            return s
        return self.model_step(s, a)

    def in_bounds(self, s):
        return len(s) == self.n_joints and all(0 <= b < self.bins for b in s)

    @property
    def state_space_size(self):
        return float(self.bins**self.n_joints)

    def states(self):
        return itertools.product(range(self.bins), repeat=self.n_joints)

    def initial_heuristic(self, s):
        return max(0.0, self._goal_distance(s) - self.goal_radius) / self.max_step

    def to_dict(self) -> dict:
        return {
            "kind": "arm",
            "start": list(self.start),
            "target": list(self.target),
            "broken_joint": self.broken_joint,
            "n_joints": self.n_joints,
            "bins": self.bins,
            "joint_range": list(self.joint_range),
            "goal_radius": self.goal_radius,
            "link": self.link,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ArmLattice":
        return cls(d["start"], d["target"], d["broken_joint"], d["n_joints"], d["bins"],
                   d["joint_range"], d["goal_radius"], d["link"])


def generate_arm(seed: int, broken_joint: int | None = 1, min_distance: float = 0.0,
                 **kwargs) -> ArmLattice:
    """Random start; the target is reachable with the broken joint frozen at its start bin.

    Starts whose end effector is closer than ``min_distance`` to the target are resampled.
    """
    rng = random.Random(seed)
    n = kwargs.get("n_joints", 7)
    bins = kwargs.get("bins", 10)
    while True:
        start = tuple(rng.randrange(bins) for _ in range(n))
        config = [rng.randrange(bins) for _ in range(n)]
        if broken_joint is not None:
            config[broken_joint] = start[broken_joint]
        probe = ArmLattice(start, (0.0, 0.0), broken_joint, **kwargs)
        target = probe.end_effector(tuple(config))
        env = ArmLattice(start, target, broken_joint, **kwargs)
        if not env.is_goal(start) and env._goal_distance(start) >= min_distance:
            return env

