"""Cost-to-go estimators sharing a ``predict`` / ``apply_updates`` contract."""

from __future__ import annotations

from typing import Callable, Hashable, Iterable

import numpy as np
from scipy.spatial import cKDTree

from cmax.core import State


class TabularValues:
    """Exact table of cost-to-go values; unseen states fall back to ``heuristic``."""

    def __init__(
        self,
        heuristic: Callable[[State], float],
        key: Callable[[State], Hashable] | None = None,
    ):
        self.heuristic = heuristic
        self.key = key or (lambda s: s)
        self.table: dict[Hashable, float] = {}

    def predict(self, s: State) -> float:
        k = self.key(s)
        v = self.table.get(k)
        return self.heuristic(s) if v is None else v

    def apply_updates(self, updates: Iterable[tuple[State, float]]) -> None:
        for s, v in updates:
            self.table[self.key(s)] = float(v)

    def __len__(self) -> int:
        return len(self.table)

    def to_dict(self) -> dict:
        return {
            "kind": "tabular",
            "table": [{"state": list(k), "value": v} for k, v in self.table.items()],
        }


class KernelValueEstimator:
    """RBF-kernel residual regression on top of a base heuristic.

    ``predict(s) = base(s) + sum_i w_i r_i / sum_i w_i`` with
    ``w_i = exp(-|s - x_i|^2 / (2 gamma^2))`` (Euclidean) and ``r_i`` the stored
    residual target minus base. Below ``weight_floor`` total weight the base is
    returned unchanged.

    Fitting is exact at the datapoints by construction, so the gradient step
    size ``eta`` is kept only for configuration round-trips.
    """

    def __init__(
        self,
        base: Callable[[State], float],
        gamma: float,
        dim: int,
        replace_radius: float = 0.0,
        weight_floor: float = 1e-6,
        capacity: int = 50_000,
        key: Callable[[State], Hashable] | None = None,
        eta: float = 0.001,
    ):
        if gamma <= 0:
            raise ValueError("gamma must be positive")
        self.base = base
        self.gamma = float(gamma)
        self.dim = dim
        self.replace_radius = float(replace_radius)
        self.weight_floor = weight_floor
        self.capacity = capacity
        self.eta = eta
        self.key = key or tuple
        self.X = np.empty((0, dim))
        self.targets = np.empty(0)
        self.residuals = np.empty(0)
        self._inv_two_gamma_sq = 1.0 / (2.0 * self.gamma**2)
        self._cache: dict[Hashable, float] = {}

    def __len__(self) -> int:
        return len(self.targets)

    def residual(self, s: State) -> float:
        if not len(self.targets):
            return 0.0
        q = np.asarray(s, dtype=float)
        diff = self.X - q
        d2 = np.einsum("ij,ij->i", diff, diff)
        w = np.exp(-d2 * self._inv_two_gamma_sq)
        total = w.sum()
        if total < self.weight_floor:
            return 0.0
        return float(w @ self.residuals / total)

    def predict(self, s: State) -> float:
        k = self.key(s)
        v = self._cache.get(k)
        if v is None:
            v = self.base(s) + self.residual(s)
            self._cache[k] = v
        return v

    def apply_updates(self, updates: Iterable[tuple[State, float]]) -> None:
        updates = list(updates)
        if not updates:
            return
        P = np.asarray([s for s, _ in updates], dtype=float).reshape(len(updates), self.dim)
        T = np.asarray([v for _, v in updates], dtype=float)
        keep_new = np.ones(len(P), dtype=bool)
        # within the batch the later of two near-duplicates wins
        for i, j in cKDTree(P).query_pairs(self.replace_radius, output_type="ndarray"):
            keep_new[min(i, j)] = False
        P, T = P[keep_new], T[keep_new]
        kept = [s for (s, _), k in zip(updates, keep_new) if k]
        if len(self.X):
            drop = np.zeros(len(self.X), dtype=bool)
            for hits in cKDTree(self.X).query_ball_point(P, self.replace_radius):
                drop[hits] = True
            self.X = self.X[~drop]
            self.targets = self.targets[~drop]
            self.residuals = self.residuals[~drop]
        R = T - np.asarray([self.base(s) for s in kept], dtype=float)
        self.X = np.vstack([self.X, P])
        self.targets = np.concatenate([self.targets, T])
        self.residuals = np.concatenate([self.residuals, R])
        if len(self.targets) > self.capacity:
            cut = len(self.targets) - self.capacity
            self.X, self.targets, self.residuals = self.X[cut:], self.targets[cut:], self.residuals[cut:]
        self._cache.clear()

    def to_dict(self) -> dict:
        return {
            "kind": "kernel",
            "gamma": self.gamma,
            "eta": self.eta,
            "weight_floor": self.weight_floor,
            "replace_radius": self.replace_radius,
            "points": self.X.tolist(),
            "targets": self.targets.tolist(),
        }
