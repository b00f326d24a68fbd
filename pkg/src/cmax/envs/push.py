"""Kinematic planar pushing: a point gripper pushes a square object on a table.

State is ``(gx, gy, ox, oy)``. Each action moves the gripper ``offset`` along
one cardinal direction. If the moved gripper would end strictly inside the
object's footprint, the object moves by the same vector. Motion is truncated
at table edges and, in the true world only, at obstacle faces; the object
collides with obstacles grown by half its width.
"""

from __future__ import annotations

import math
import random

from cmax.core import Environment, State

MOVES = ((1.0, 0.0), (-1.0, 0.0), (0.0, 1.0), (0.0, -1.0))
_ROUND = 9


def _segment_fraction(p, v, box, eps: float = 1e-9) -> float:
    """Largest t in [0, 1] such that p + t v stays outside ``box`` (axis-aligned move).

    Points within ``eps`` of a face count as touching it, so coordinates
    rounded after an earlier truncation cannot tunnel through.
    """
    x0, y0, x1, y1 = box
    px, py = p
    vx, vy = v
    if vx != 0.0:
        if not (y0 + eps < py < y1 - eps):
            return 1.0
        if vx > 0 and px <= x0 + eps and x0 < px + vx:
            return max(0.0, (x0 - px) / vx)
        if vx < 0 and px >= x1 - eps and x1 > px + vx:
            return max(0.0, (x1 - px) / vx)
        return 1.0
    if not (x0 + eps < px < x1 - eps):
        return 1.0
    if vy > 0 and py <= y0 + eps and y0 < py + vy:
        return max(0.0, (y0 - py) / vy)
    if vy < 0 and py >= y1 - eps and y1 > py + vy:
        return max(0.0, (y1 - py) / vy)
    return 1.0


def _wall_fraction(p, v, lo, hi) -> float:
    t = 1.0
    for c, dc in zip(p, v):
        if dc > 0:
            t = min(t, max(0.0, (hi - c) / dc))
        elif dc < 0:
            t = min(t, max(0.0, (lo - c) / dc))
    return t


class PlanarPushWorld(Environment):
    n_actions = 4
    integer_lattice = False

    def __init__(self, start, target, obstacles=(), offset=0.02, width=0.04,
                 goal_tolerance=None, xi=0.01):
        self.start = tuple(round(float(c), _ROUND) for c in start)
        self.target = (float(target[0]), float(target[1]))
        self.obstacles = tuple(tuple(float(c) for c in b) for b in obstacles)
        self.offset = float(offset)
        self.width = float(width)
        self.goal_tolerance = float(offset / 2 if goal_tolerance is None else goal_tolerance)
        self.xi = float(xi)
        self._key_scale = 2.0 / self.xi
        self._keys: dict = {}

    def _step(self, s: State, a: int, obstacles) -> State:
        if self.is_goal(s):
            return s
        g, o = (s[0], s[1]), (s[2], s[3])
        v = (MOVES[a][0] * self.offset, MOVES[a][1] * self.offset)
        half = self.width / 2
        ng = (g[0] + v[0], g[1] + v[1])
        pushing = max(abs(ng[0] - o[0]), abs(ng[1] - o[1])) < half - 1e-12
        t = _wall_fraction(g, v, 0.0, 1.0)
        for box in obstacles:
            t = min(t, _segment_fraction(g, v, box))
        if pushing:
            t = min(t, _wall_fraction(o, v, half, 1.0 - half))
            for x0, y0, x1, y1 in obstacles:
                t = min(t, _segment_fraction(o, v, (x0 - half, y0 - half, x1 + half, y1 + half)))
        g = (g[0] + t * v[0], g[1] + t * v[1])
        if pushing:
            o = (o[0] + t * v[0], o[1] + t * v[1])
        return tuple(round(c, _ROUND) for c in (*g, *o))

    def true_step(self, s, a):
        return self._step(s, a, self.obstacles)

    def model_step(self, s, a):
        return self._step(s, a, ())

    def is_goal(self, s):
        return math.hypot(s[2] - self.target[0], s[3] - self.target[1]) <= self.goal_tolerance

    def in_bounds(self, s):
        return len(s) == 4 and all(0.0 <= c <= 1.0 for c in s)

    @property
    def state_space_size(self):
        # cells of the xi-resolution discretization of the 4D workspace
        return float(round(1.0 / self.xi) ** 4)

    def key(self, s):
        hit = self._keys.get(s)
        if hit is None:
            k = self._key_scale
            hit = self._keys[s] = (round(s[0] * k), round(s[1] * k), round(s[2] * k), round(s[3] * k))
        return hit

    def initial_heuristic(self, s):
        return push_heuristic(s, self)

    def to_dict(self) -> dict:
        return {
            "kind": "push",
            "start": list(self.start),
            "target": list(self.target),
            "obstacles": [list(b) for b in self.obstacles],
            "offset": self.offset,
            "width": self.width,
            "goal_tolerance": self.goal_tolerance,
            "xi": self.xi,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "PlanarPushWorld":
        return cls(d["start"], d["target"], d["obstacles"], d["offset"], d["width"],
                   d["goal_tolerance"], d["xi"])

    def without_obstacles(self) -> "PlanarPushWorld":
        return PlanarPushWorld(self.start, self.target, (), self.offset, self.width,
                               self.goal_tolerance, self.xi)


def push_heuristic(s: State, world: PlanarPushWorld) -> float:
    """Gripper-to-pushing-spot plus object-to-target Manhattan distance, in steps.

    The pushing spot sits half an object width behind the object on the
    target-to-object ray.
    """
    if world.is_goal(s):
        return 0.0
    gx, gy, ox, oy = s
    tx, ty = world.target
    theta = math.atan2(tx - ox, ty - oy)
    half = world.width / 2
    gtx = ox - math.sin(theta) * half
    gty = oy - math.cos(theta) * half
    manhattan = abs(gx - gtx) + abs(gy - gty) + abs(ox - tx) + abs(oy - ty)
    return manhattan / world.offset


def generate_push(seed: int, obstacles: bool = True, offset: float = 0.02, width: float = 0.04,
                  xi: float = 0.01) -> PlanarPushWorld:
    """Lattice-aligned instance; with ``obstacles`` a wall crosses the push.

    Object, gripper and target share one ``offset`` lattice so the target is
    exactly reachable. The push runs mostly along one axis; the wall is thin
    along that axis, long across it, and centred on the object path that
    lookahead search produces in the obstacle-free world.
    """
    rng = random.Random(seed)
    d = offset
    n = round(1.0 / d)
    lo, hi = round(0.25 * n), round(0.75 * n)
    while True:
        ox, oy = rng.randrange(lo, hi + 1), rng.randrange(lo, hi + 1)
        along = rng.choice((-1, 1)) * rng.randrange(10, 17)
        across = rng.randrange(-3, 4)
        horizontal = rng.random() < 0.5
        dx, dy = (along, across) if horizontal else (across, along)
        gx, gy = ox + rng.randrange(-5, 6), oy + rng.randrange(-5, 6)
        thick = rng.uniform(0.04, 0.06)
        span = rng.uniform(0.08, 0.14)
        tx, ty = ox + dx, oy + dy
        if not all(2 <= c <= n - 2 for c in (ox, oy, tx, ty, gx, gy)):
            continue
        if max(abs(gx - ox), abs(gy - oy)) * d < width / 2:
            continue
        free = PlanarPushWorld((gx * d, gy * d, ox * d, oy * d), (tx * d, ty * d),
                               offset=d, width=width, xi=xi)
        if not obstacles:
            return free
        path = _model_object_path(free)
        if path is None:
            continue
        cx, cy = path[len(path) // 2]
        w, h = (thick, span) if horizontal else (span, thick)
        box = (cx - w / 2, cy - h / 2, cx + w / 2, cy + h / 2)
        if not _clear_of(box, free.start, free.target, width):
            continue
        return PlanarPushWorld(free.start, free.target, [box], offset=d, width=width, xi=xi)


def _model_object_path(world: PlanarPushWorld, K: int = 5, max_steps: int = 300):
    """Distinct object positions along a tabular lookahead rollout in ``world``."""
    from cmax.search import lookahead
    from cmax.value import TabularValues

    V = TabularValues(world.initial_heuristic, key=world.key)
    model = _FreeModel(world)
    s = world.start
    path = [(s[2], s[3])]
    for _ in range(max_steps):
        if world.is_goal(s):
            return path
        res = lookahead(s, model, V, K)
        V.apply_updates(res.value_updates)
        s = world.model_step(s, res.best_action)
        if (s[2], s[3]) != path[-1]:
            path.append((s[2], s[3]))
    return None


class _FreeModel:
    def __init__(self, world):
        self.world = world
        self.n_actions = world.n_actions

    def successor(self, s, a):
        return self.world.model_step(s, a)

    def cost(self, s, a):
        return self.world.cost(s, a)

    def is_goal(self, s):
        return self.world.is_goal(s)

    def key(self, s):
        return self.world.key(s)


def _clear_of(box, start, target, width) -> bool:
    x0, y0, x1, y1 = box
    margin = width
    pts = [(start[0], start[1]), (start[2], start[3]), target]
    return all(not (x0 - margin <= px <= x1 + margin and y0 - margin <= py <= y1 + margin)
               for px, py in pts)
