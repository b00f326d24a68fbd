"""Stores for discovered-incorrect transitions.

``ExactDiscrepancySet`` keeps exact (state, action) pairs for small spaces.
``HypersphereStore`` keeps, per action, the centers of radius-``delta``
balls and answers coverage queries through a KD-tree per action.
"""

from __future__ import annotations

import json
from typing import Callable, Hashable

import numpy as np
from scipy.spatial import cKDTree

from cmax.core import ActionId, State


def detect_discrepancy(
    observed: State, predicted: State, metric: Callable[[State, State], float], xi: float
) -> bool:
    return metric(observed, predicted) > xi


def lattice_threshold(xi: float, integer_lattice: bool) -> float:
    """Threshold actually compared against; half a bin lower on integer lattices.

    On an integer lattice the smallest possible mismatch is exactly one bin,
    which ``d > xi`` with ``xi = 1`` never detects.
    """
    if integer_lattice:
        return max(0.0, xi - 0.5)
    return xi


class ExactDiscrepancySet:
    def __init__(self):
        self.pairs: set[tuple[State, ActionId]] = set()

    def record(self, s: State, a: ActionId) -> None:
        self.pairs.add((tuple(s), a))

    def is_flagged(self, s: State, a: ActionId) -> bool:
        return (tuple(s), a) in self.pairs

    def __len__(self) -> int:
        return len(self.pairs)

    def to_dict(self) -> dict:
        return {
            "kind": "exact",
            "pairs": [{"state": list(s), "action": a} for s, a in sorted(self.pairs)],
        }

    @classmethod
    def from_dict(cls, data: dict) -> "ExactDiscrepancySet":
        store = cls()
        for item in data["pairs"]:
            store.record(tuple(item["state"]), item["action"])
        return store


class _ActionIndex:
    """Centers for one action: a KD-tree over the bulk plus a small linear tail.

    The tree is rebuilt once the number of centers doubles since the last build.
    """

    def __init__(self, dim: int):
        self.dim = dim
        self.centers = np.empty((0, dim))
        self.tree: cKDTree | None = None
        self.built = 0

    def add(self, c: np.ndarray) -> None:
        self.centers = np.vstack([self.centers, c[None, :]])
        if len(self.centers) >= 2 * max(self.built, 8):
            self.tree = cKDTree(self.centers)
            self.built = len(self.centers)

    def min_distance(self, q: np.ndarray) -> float:
        best = np.inf
        if self.tree is not None:
            best, _ = self.tree.query(q)
        tail = self.centers[self.built:]
        if len(tail):
            best = min(best, float(np.sqrt(((tail - q) ** 2).sum(axis=1)).min()))
        return float(best)

    def __len__(self) -> int:
        return len(self.centers)


class HypersphereStore:
    """Per-action cover of discovered xi-incorrect pairs by radius-``delta`` balls.

    Coverage is inclusive (``distance <= delta``) and Euclidean. A new center
    closer than ``delta / 10`` to an existing one for the same action is
    dropped.
    """

    def __init__(
        self,
        n_actions: int,
        dim: int,
        delta: float,
        xi: float,
        key: Callable[[State], Hashable] | None = None,
    ):
        if delta <= 0:
            raise ValueError("delta must be positive")
        self.n_actions = n_actions
        self.dim = dim
        self.delta = float(delta)
        self.xi = float(xi)
        self._key = key or tuple
        self._indexes = [_ActionIndex(dim) for _ in range(n_actions)]
        self._cache: dict[tuple[Hashable, ActionId], bool] = {}

    def record(self, s: State, a: ActionId) -> bool:
        """Add a sphere at ``s`` for ``a``; returns False when deduplicated."""
        c = np.asarray(s, dtype=float)
        index = self._indexes[a]
        if len(index) and index.min_distance(c) <= self.delta / 10:
            return False
        index.add(c)
        self._cache.clear()
        return True

    def is_covered(self, s: State, a: ActionId) -> bool:
        k = (self._key(s), a)
        hit = self._cache.get(k)
        if hit is None:
            index = self._indexes[a]
            hit = bool(len(index)) and index.min_distance(np.asarray(s, dtype=float)) <= self.delta
            self._cache[k] = hit
        return hit

    is_flagged = is_covered

    def count(self, a: ActionId | None = None) -> int:
        if a is None:
            return sum(len(ix) for ix in self._indexes)
        return len(self._indexes[a])

    def __len__(self) -> int:
        return self.count()

    def centers(self, a: ActionId) -> np.ndarray:
        return self._indexes[a].centers.copy()

    def to_dict(self) -> dict:
        return {
            "kind": "hyperspheres",
            "delta": self.delta,
            "xi": self.xi,
            "dim": self.dim,
            "n_actions": self.n_actions,
            "centers": [
                {"action": a, "center": c.tolist()}
                for a, ix in enumerate(self._indexes)
                for c in ix.centers
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict())

    @classmethod
    def from_dict(cls, data: dict) -> "HypersphereStore":
        store = cls(data["n_actions"], data["dim"], data["delta"], data["xi"])
        for item in data["centers"]:
            store._indexes[item["action"]].add(np.asarray(item["center"], dtype=float))
        return store
